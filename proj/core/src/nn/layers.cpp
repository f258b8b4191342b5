// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcgnet/nn/gemm.hpp"

namespace pcgnet::nn {
namespace {

template <typename T>
void apply_activation(Activation a, std::span<T> v) {
  switch (a) {
    case Activation::Identity: return;
    case Activation::Relu:
      for (T& x : v) x = x > T(0) ? x : T(0);
      return;
    case Activation::Sigmoid:
      for (T& x : v) x = sigmoid(x);
      return;
  }
}

// grad w.r.t. pre-activation, from the post-activation output. ReLU passes
// gradient only where the output (equivalently the pre-activation) is > 0.
template <typename T>
void activation_backward(Activation a, std::span<const T> out, std::span<const T> grad_out,
                         std::span<T> grad_pre) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (a) {
      case Activation::Identity: grad_pre[i] = grad_out[i]; break;
      case Activation::Relu: grad_pre[i] = out[i] > T(0) ? grad_out[i] : T(0); break;
      case Activation::Sigmoid: grad_pre[i] = grad_out[i] * out[i] * (T(1) - out[i]); break;
    }
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ShapeMismatch, what);
}

}  // namespace

// ---- Conv2D -----------------------------------------------------------------

template <typename T>
Conv2D<T>::Conv2D(std::string name, std::size_t in_channels, Conv2DSpec spec)
    : Layer<T>(std::move(name)), in_channels_(in_channels), spec_(spec) {
  this->params_.emplace_back(std::vector<std::size_t>{spec.filters, in_channels, spec.kh, spec.kw});
  this->params_.emplace_back(std::vector<std::size_t>{spec.filters});
}

template <typename T>
void Conv2D<T>::forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode, Rng*) const {
  require(in.rank() == 3 && in.dim(0) == in_channels_,
          this->name() + ": expected " + std::to_string(in_channels_) + " input channels, got " +
              shape_string(in.shape()));
  const std::size_t c_in = in.dim(0), h = in.dim(1), w = in.dim(2);
  const std::size_t kh = spec_.kh, kw = spec_.kw, hw = h * w;
  const std::size_t k = c_in * kh * kw;
  const long pad_t = static_cast<long>((kh - 1) / 2);
  const long pad_l = static_cast<long>((kw - 1) / 2);

  cache.columns.assign(k * hw, T(0));
  const T* src = in.ptr();
  for (std::size_t c = 0; c < c_in; ++c) {
    for (std::size_t i = 0; i < kh; ++i) {
      for (std::size_t j = 0; j < kw; ++j) {
        T* row = cache.columns.data() + ((c * kh + i) * kw + j) * hw;
        const long dx = static_cast<long>(j) - pad_l;
        const long x_lo = std::max(0L, -dx);
        const long x_hi = std::min(static_cast<long>(w), static_cast<long>(w) - dx);
        for (std::size_t y = 0; y < h; ++y) {
          const long yy = static_cast<long>(y) + static_cast<long>(i) - pad_t;
          if (yy < 0 || yy >= static_cast<long>(h) || x_lo >= x_hi) continue;
          const T* s = src + (c * h + static_cast<std::size_t>(yy)) * w;
          T* d = row + y * w;
          std::copy(s + x_lo + dx, s + x_hi + dx, d + x_lo);
        }
      }
    }
  }

  out.resize({spec_.filters, h, w});
  const T* weight = this->params_[0].ptr();
  const T* bias = this->params_[1].ptr();
  for (std::size_t f = 0; f < spec_.filters; ++f) std::fill_n(out.ptr() + f * hw, hw, bias[f]);
  gemm(false, false, spec_.filters, hw, k, T(1), weight, k, cache.columns.data(), hw, T(1),
       out.ptr(), hw);
  apply_activation(spec_.activation, out.data());
}

template <typename T>
void Conv2D<T>::backward(const TensorT& in, const TensorT& out, const TensorT& grad_out,
                         TensorT* grad_in, LayerCache<T>& cache, std::span<TensorT> param_grads,
                         bool grad_is_preactivation) const {
  require(grad_out.size() == out.size(), this->name() + ": grad/output size mismatch");
  const std::size_t c_in = in.dim(0), h = in.dim(1), w = in.dim(2);
  const std::size_t kh = spec_.kh, kw = spec_.kw, hw = h * w;
  const std::size_t k = c_in * kh * kw;
  const std::size_t f_out = spec_.filters;

  cache.buffer.resize(f_out * hw);
  if (grad_is_preactivation) {
    std::copy(grad_out.data().begin(), grad_out.data().end(), cache.buffer.begin());
  } else {
    activation_backward<T>(spec_.activation, out.data(), grad_out.data(), cache.buffer);
  }
  const T* g = cache.buffer.data();

  gemm(false, true, f_out, k, hw, T(1), g, hw, cache.columns.data(), hw, T(1),
       param_grads[0].ptr(), k);
  T* db = param_grads[1].ptr();
  for (std::size_t f = 0; f < f_out; ++f) {
    T acc = T(0);
    for (std::size_t p = 0; p < hw; ++p) acc += g[f * hw + p];
    db[f] += acc;
  }
  if (!grad_in) return;

  // columns are no longer needed; reuse them for d(columns).
  gemm(true, false, k, hw, f_out, T(1), this->params_[0].ptr(), k, g, hw, T(0),
       cache.columns.data(), hw);
  grad_in->resize(in.shape());
  grad_in->fill(T(0));
  const long pad_t = static_cast<long>((kh - 1) / 2);
  const long pad_l = static_cast<long>((kw - 1) / 2);
  T* dst = grad_in->ptr();
  for (std::size_t c = 0; c < c_in; ++c) {
    for (std::size_t i = 0; i < kh; ++i) {
      for (std::size_t j = 0; j < kw; ++j) {
        const T* row = cache.columns.data() + ((c * kh + i) * kw + j) * hw;
        const long dx = static_cast<long>(j) - pad_l;
        const long x_lo = std::max(0L, -dx);
        const long x_hi = std::min(static_cast<long>(w), static_cast<long>(w) - dx);
        for (std::size_t y = 0; y < h; ++y) {
          const long yy = static_cast<long>(y) + static_cast<long>(i) - pad_t;
          if (yy < 0 || yy >= static_cast<long>(h)) continue;
          T* d = dst + (c * h + static_cast<std::size_t>(yy)) * w;
          const T* s = row + y * w;
          for (long x = x_lo; x < x_hi; ++x) d[x + dx] += s[x];
        }
      }
    }
  }
}

// ---- MaxPool2D --------------------------------------------------------------

template <typename T>
void MaxPool2D<T>::forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode,
                           Rng*) const {
  require(in.rank() == 3, this->name() + ": expected CHW input");
  const std::size_t c_n = in.dim(0), h = in.dim(1), w = in.dim(2);
  require(h >= spec_.ph && w >= spec_.pw,
          this->name() + ": input " + shape_string(in.shape()) + " smaller than pool");
  const std::size_t oh = h / spec_.ph, ow = w / spec_.pw;
  out.resize({c_n, oh, ow});
  cache.argmax.resize(out.size());
  const T* src = in.ptr();
  std::size_t o = 0;
  for (std::size_t c = 0; c < c_n; ++c) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox, ++o) {
        std::size_t best = (c * h + oy * spec_.ph) * w + ox * spec_.pw;
        T best_v = src[best];
        for (std::size_t i = 0; i < spec_.ph; ++i) {
          for (std::size_t j = 0; j < spec_.pw; ++j) {
            const std::size_t idx = (c * h + oy * spec_.ph + i) * w + ox * spec_.pw + j;
            if (src[idx] > best_v) {  // strict: first occurrence wins ties
              best_v = src[idx];
              best = idx;
            }
          }
        }
        out[o] = best_v;
        cache.argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

template <typename T>
void MaxPool2D<T>::backward(const TensorT& in, const TensorT&, const TensorT& grad_out,
                            TensorT* grad_in, LayerCache<T>& cache, std::span<TensorT>,
                            bool) const {
  if (!grad_in) return;
  grad_in->resize(in.shape());
  grad_in->fill(T(0));
  for (std::size_t o = 0; o < grad_out.size(); ++o) (*grad_in)[cache.argmax[o]] += grad_out[o];
}

// ---- Dropout ----------------------------------------------------------------

template <typename T>
void Dropout<T>::forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode mode,
                         Rng* rng) const {
  out = in;
  cache.mask.clear();
  if (mode == Mode::Infer || spec_.rate == 0.0) return;
  if (!rng) fail(ErrorCode::InvalidConfig, this->name() + ": training-mode dropout needs an RNG");
  const T keep_scale = T(1.0 / (1.0 - spec_.rate));
  cache.mask.resize(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    cache.mask[i] = rng->uniform() < spec_.rate ? T(0) : keep_scale;
    out[i] *= cache.mask[i];
  }
}

template <typename T>
void Dropout<T>::backward(const TensorT&, const TensorT&, const TensorT& grad_out,
                          TensorT* grad_in, LayerCache<T>& cache, std::span<TensorT>,
                          bool) const {
  if (!grad_in) return;
  *grad_in = grad_out;
  if (cache.mask.empty()) return;
  for (std::size_t i = 0; i < grad_in->size(); ++i) (*grad_in)[i] *= cache.mask[i];
}

// ---- Flatten ----------------------------------------------------------------

template <typename T>
void Flatten<T>::forward(const TensorT& in, TensorT& out, LayerCache<T>&, Mode, Rng*) const {
  out = in;
  out.reshape({in.size()});
}

template <typename T>
void Flatten<T>::backward(const TensorT& in, const TensorT&, const TensorT& grad_out,
                          TensorT* grad_in, LayerCache<T>&, std::span<TensorT>, bool) const {
  if (!grad_in) return;
  *grad_in = grad_out;
  grad_in->reshape(in.shape());
}

// ---- Dense ------------------------------------------------------------------

template <typename T>
Dense<T>::Dense(std::string name, std::size_t inputs, DenseSpec spec)
    : Layer<T>(std::move(name)), inputs_(inputs), spec_(spec) {
  this->params_.emplace_back(std::vector<std::size_t>{spec.units, inputs});
  this->params_.emplace_back(std::vector<std::size_t>{spec.units});
}

template <typename T>
void Dense<T>::forward(const TensorT& in, TensorT& out, LayerCache<T>&, Mode, Rng*) const {
  require(in.size() == inputs_, this->name() + ": expected " + std::to_string(inputs_) +
                                    " inputs, got " + std::to_string(in.size()));
  out.resize({spec_.units});
  const T* w = this->params_[0].ptr();
  const T* b = this->params_[1].ptr();
  for (std::size_t u = 0; u < spec_.units; ++u) {
    T acc = b[u];
    const T* row = w + u * inputs_;
    for (std::size_t i = 0; i < inputs_; ++i) acc += row[i] * in[i];
    out[u] = acc;
  }
  apply_activation(spec_.activation, out.data());
}

template <typename T>
void Dense<T>::backward(const TensorT& in, const TensorT& out, const TensorT& grad_out,
                        TensorT* grad_in, LayerCache<T>& cache, std::span<TensorT> param_grads,
                        bool grad_is_preactivation) const {
  require(grad_out.size() == spec_.units, this->name() + ": grad size mismatch");
  cache.buffer.resize(spec_.units);
  if (grad_is_preactivation) {
    std::copy(grad_out.data().begin(), grad_out.data().end(), cache.buffer.begin());
  } else {
    activation_backward<T>(spec_.activation, out.data(), grad_out.data(), cache.buffer);
  }
  T* dw = param_grads[0].ptr();
  T* db = param_grads[1].ptr();
  for (std::size_t u = 0; u < spec_.units; ++u) {
    const T g = cache.buffer[u];
    db[u] += g;
    T* row = dw + u * inputs_;
    for (std::size_t i = 0; i < inputs_; ++i) row[i] += g * in[i];
  }
  if (!grad_in) return;
  grad_in->resize(in.shape());
  grad_in->fill(T(0));
  const T* w = this->params_[0].ptr();
  for (std::size_t u = 0; u < spec_.units; ++u) {
    const T g = cache.buffer[u];
    const T* row = w + u * inputs_;
    for (std::size_t i = 0; i < inputs_; ++i) (*grad_in)[i] += g * row[i];
  }
}

// ---- Loss -------------------------------------------------------------------

double bce_loss(double p, int y) {
  const double q = std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
  return y ? -std::log(q) : -std::log(1.0 - q);
}

double bce_grad_prob(double p, int y) {
  if (p < kProbabilityClip || p > 1.0 - kProbabilityClip) return 0.0;
  return y ? -1.0 / p : 1.0 / (1.0 - p);
}

template class Conv2D<float>;
template class Conv2D<double>;
template class MaxPool2D<float>;
template class MaxPool2D<double>;
template class Dropout<float>;
template class Dropout<double>;
template class Flatten<float>;
template class Flatten<double>;
template class Dense<float>;
template class Dense<double>;

}  // namespace pcgnet::nn
