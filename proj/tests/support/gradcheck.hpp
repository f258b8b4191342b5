#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pcgnet/nn/model.hpp"
#include "pcgnet/rng.hpp"

namespace pcgnet::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kGradTol = 1e-4;

inline void randomize(nn::Tensor64& t, Rng& rng, double lo = -1.0, double hi = 1.0) {
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
}

// ||a - b|| / (||a|| + ||b||); zero when both vanish.
inline double norm_rel_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nb);
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

// Central differences of loss() with respect to every entry of values.
template <class Loss>
std::vector<double> numeric_gradient(std::span<double> values, Loss&& loss) {
  std::vector<double> g(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double keep = values[i];
    values[i] = keep + kFdStep;
    const double up = loss();
    values[i] = keep - kFdStep;
    const double down = loss();
    values[i] = keep;
    g[i] = (up - down) / (2 * kFdStep);
  }
  return g;
}

// Checks d(sum(out * R))/d(input, params) of a single layer against central
// differences. Returns the worst relative error over all tensors.
inline double layer_gradcheck(nn::Layer<double>& layer, nn::Tensor64 x, std::uint64_t seed,
                              nn::Mode mode = nn::Mode::Infer) {
  using nn::LayerCache;
  using nn::Tensor64;
  Rng init(seed);
  auto run = [&](LayerCache<double>& cache, Tensor64& out) {
    Rng rng(seed + 1);  // identical dropout masks on every call
    layer.forward(x, out, cache, mode, &rng);
  };
  LayerCache<double> cache;
  Tensor64 out;
  run(cache, out);
  Tensor64 r(out.shape());
  randomize(r, init);
  auto loss = [&] {
    LayerCache<double> c;
    Tensor64 o;
    run(c, o);
    double s = 0;
    for (std::size_t i = 0; i < o.size(); ++i) s += o[i] * r[i];
    return s;
  };

  std::vector<Tensor64> pgrads;
  for (const auto& p : layer.params()) pgrads.emplace_back(p.shape());
  Tensor64 gin;
  layer.backward(x, out, r, &gin, cache, pgrads, false);

  double worst = norm_rel_error(gin.data(), numeric_gradient(x.data(), loss));
  auto params = layer.params();
  for (std::size_t k = 0; k < params.size(); ++k) {
    worst = std::max(worst, norm_rel_error(pgrads[k].data(), numeric_gradient(params[k].data(), loss)));
  }
  return worst;
}

// Whole model with sigmoid + BCE on one labelled input. `fused` selects the
// logit-space backward; otherwise the gradient goes through the sigmoid.
// Returns the worst relative error over the input and every parameter.
inline double model_gradcheck(nn::Model<double>& model, nn::Tensor64& x, int y, nn::Mode mode,
                              bool fused, std::uint64_t dropout_seed = 77) {
  auto ws = model.make_workspace();
  auto loss = [&] {
    Rng drop(dropout_seed);
    return nn::bce_loss(model.forward(x, mode, ws, &drop), y);
  };
  Rng drop(dropout_seed);
  const double p = model.forward(x, mode, ws, &drop);
  auto grads = model.make_gradients();
  nn::Tensor64 gin;
  if (fused) {
    model.backward_logit(ws, nn::bce_grad_logit(p, y), grads, &gin);
  } else {
    model.backward_prob(ws, nn::bce_grad_prob(p, y), grads, &gin);
  }
  double worst = norm_rel_error(gin.data(), numeric_gradient(x.data(), loss));
  for (std::size_t i = 0; i < model.param_count(); ++i) {
    worst = std::max(worst, norm_rel_error(grads[i].data(), numeric_gradient(model.param(i).data(), loss)));
  }
  return worst;
}

}  // namespace pcgnet::testing
