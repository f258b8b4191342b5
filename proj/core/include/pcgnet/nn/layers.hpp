// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pcgnet/nn/config.hpp"
#include "pcgnet/nn/tensor.hpp"
#include "pcgnet/rng.hpp"

namespace pcgnet::nn {

enum class Mode { Train, Infer };

// Per-call scratch owned by a Workspace, never by the layer, so a model can
// be evaluated concurrently from several workspaces.
template <typename T>
struct LayerCache {
  std::vector<T> columns;             // conv: im2col of the input
  std::vector<T> buffer;              // conv/dense: gradient scratch
  std::vector<std::uint32_t> argmax;  // pool: flat input index per output
  std::vector<T> mask;                // dropout: 0 or 1/(1-rate)
};

template <typename T>
class Layer {
 public:
  using TensorT = BasicTensor<T>;

  explicit Layer(std::string name) : name_(std::move(name)) {}
  virtual ~Layer() = default;

  const std::string& name() const noexcept { return name_; }

  virtual void forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode mode,
                       Rng* rng) const = 0;

  // Accumulates parameter gradients into `param_grads` (same order as
  // params()) and writes the input gradient when `grad_in` is non-null.
  // When `grad_is_preactivation` is set, `grad_out` is already dL/dz.
  virtual void backward(const TensorT& in, const TensorT& out, const TensorT& grad_out,
                        TensorT* grad_in, LayerCache<T>& cache, std::span<TensorT> param_grads,
                        bool grad_is_preactivation) const = 0;

  std::span<TensorT> params() noexcept { return params_; }
  std::span<const TensorT> params() const noexcept { return params_; }

 protected:
  std::vector<TensorT> params_;

 private:
  std::string name_;
};

template <typename T>
class Conv2D final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  // params: weight [F, C, kh, kw], bias [F]
  Conv2D(std::string name, std::size_t in_channels, Conv2DSpec spec);

  void forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode mode,
               Rng* rng) const override;
  void backward(const TensorT& in, const TensorT& out, const TensorT& grad_out, TensorT* grad_in,
                LayerCache<T>& cache, std::span<TensorT> param_grads,
                bool grad_is_preactivation) const override;

  const Conv2DSpec& spec() const noexcept { return spec_; }

 private:
  std::size_t in_channels_;
  Conv2DSpec spec_;
};

template <typename T>
class MaxPool2D final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  MaxPool2D(std::string name, MaxPoolSpec spec) : Layer<T>(std::move(name)), spec_(spec) {}

  void forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode mode,
               Rng* rng) const override;
  void backward(const TensorT& in, const TensorT& out, const TensorT& grad_out, TensorT* grad_in,
                LayerCache<T>& cache, std::span<TensorT> param_grads,
                bool grad_is_preactivation) const override;

 private:
  MaxPoolSpec spec_;
};

// Inverted dropout: survivors scaled by 1 / (1 - rate) in training.
template <typename T>
class Dropout final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  Dropout(std::string name, DropoutSpec spec) : Layer<T>(std::move(name)), spec_(spec) {}

  void forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode mode,
               Rng* rng) const override;
  void backward(const TensorT& in, const TensorT& out, const TensorT& grad_out, TensorT* grad_in,
                LayerCache<T>& cache, std::span<TensorT> param_grads,
                bool grad_is_preactivation) const override;

 private:
  DropoutSpec spec_;
};

template <typename T>
class Flatten final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  using Layer<T>::Layer;

  void forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode mode,
               Rng* rng) const override;
  void backward(const TensorT& in, const TensorT& out, const TensorT& grad_out, TensorT* grad_in,
                LayerCache<T>& cache, std::span<TensorT> param_grads,
                bool grad_is_preactivation) const override;
};

template <typename T>
class Dense final : public Layer<T> {
 public:
  using TensorT = BasicTensor<T>;
  // params: weight [units, inputs], bias [units]
  Dense(std::string name, std::size_t inputs, DenseSpec spec);

  void forward(const TensorT& in, TensorT& out, LayerCache<T>& cache, Mode mode,
               Rng* rng) const override;
  void backward(const TensorT& in, const TensorT& out, const TensorT& grad_out, TensorT* grad_in,
                LayerCache<T>& cache, std::span<TensorT> param_grads,
                bool grad_is_preactivation) const override;

  const DenseSpec& spec() const noexcept { return spec_; }

 private:
  std::size_t inputs_;
  DenseSpec spec_;
};

template <typename T>
T sigmoid(T x) {
  // Split on sign so exp never overflows.
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// Binary cross-entropy with p clipped to [1e-7, 1 - 1e-7].
inline constexpr double kProbabilityClip = 1e-7;
double bce_loss(double p, int y);
// dL/dp of the clipped loss (zero outside the clip range).
double bce_grad_prob(double p, int y);
// Fused sigmoid + BCE: dL/dz = p - y.
inline double bce_grad_logit(double p, int y) { return p - static_cast<double>(y); }

extern template class Conv2D<float>;
extern template class Conv2D<double>;
extern template class MaxPool2D<float>;
extern template class MaxPool2D<double>;
extern template class Dropout<float>;
extern template class Dropout<double>;
extern template class Flatten<float>;
extern template class Flatten<double>;
extern template class Dense<float>;
extern template class Dense<double>;

}  // namespace pcgnet::nn
