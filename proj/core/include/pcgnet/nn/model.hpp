// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pcgnet/nn/config.hpp"
#include "pcgnet/nn/layers.hpp"
#include "pcgnet/nn/tensor.hpp"
#include "pcgnet/rng.hpp"

namespace pcgnet::nn {

template <typename T>
struct Workspace {
  std::vector<BasicTensor<T>> activations;  // [0] = input, [i + 1] = output of layer i
  std::vector<LayerCache<T>> caches;
  BasicTensor<T> grad_a, grad_b;
};

template <typename T>
using Gradients = std::vector<BasicTensor<T>>;

// A sequential CNN built from a ModelConfig. Parameters live here; all
// per-call state lives in a Workspace, so const methods are safe to call
// concurrently with distinct workspaces.
template <typename T>
class Model {
 public:
  // Conv and ReLU dense weights ~ N(0, sqrt(2 / fan_in)); the sigmoid head
  // ~ U(+-sqrt(6 / (fan_in + fan_out))); biases 0. Deterministic in `seed`.
  Model(ModelConfig config, std::uint64_t seed);

  static Model zeros(ModelConfig config);

  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const ModelConfig& config() const noexcept { return config_; }
  const std::vector<Shape3>& shapes() const noexcept { return shapes_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  std::size_t param_count() const noexcept { return param_refs_.size(); }
  BasicTensor<T>& param(std::size_t i);
  const BasicTensor<T>& param(std::size_t i) const;
  const std::string& param_name(std::size_t i) const { return param_names_.at(i); }
  const std::string& param_layer(std::size_t i) const { return param_layers_.at(i); }
  bool trainable(std::size_t i) const { return trainable_.at(i); }
  void set_trainable(std::size_t i, bool on) { trainable_.at(i) = on; }
  // Returns false if no parameterised layer has that name.
  bool set_layer_trainable(const std::string& layer_name, bool on);

  Workspace<T> make_workspace() const;
  Gradients<T> make_gradients() const;

  // Returns the output probability. `input` must be input.c x input.h x input.w.
  T forward(const BasicTensor<T>& input, Mode mode, Workspace<T>& ws, Rng* rng = nullptr) const;

  // Backpropagates from the last forward() held in `ws`, accumulating into
  // `grads`. `dlogit` is dL/dz for the sigmoid head (p - y for BCE).
  void backward_logit(Workspace<T>& ws, T dlogit, Gradients<T>& grads,
                      BasicTensor<T>* input_grad = nullptr) const;
  // Same, from dL/dp through the sigmoid.
  void backward_prob(Workspace<T>& ws, T dprob, Gradients<T>& grads,
                     BasicTensor<T>* input_grad = nullptr) const;

  template <typename U>
  Model<U> cast() const;

 private:
  template <typename>
  friend class Model;

  Model(ModelConfig config, std::uint64_t seed, bool zero);
  void build();
  void index_params();
  void backward_impl(Workspace<T>& ws, const BasicTensor<T>& top, bool preact,
                     Gradients<T>& grads, BasicTensor<T>* input_grad) const;

  ModelConfig config_;
  std::vector<Shape3> shapes_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  struct ParamRef {
    std::size_t layer, slot;
  };
  std::vector<ParamRef> param_refs_;
  std::vector<std::string> param_names_;
  std::vector<std::string> param_layers_;
  std::vector<bool> trainable_;
};

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamHyper hyper;
  std::uint64_t step = 0;
  std::vector<BasicTensor<T>> m, v;
};

template <typename T>
AdamState<T> make_adam(const Model<T>& model, AdamHyper hyper = {});

// One update of a flat parameter block with its moments; `step` is the
// already-incremented step counter.
template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads, std::span<T> m, std::span<T> v,
                 std::uint64_t step, const AdamHyper& hyper);

// Increments state.step, then updates every trainable tensor. Frozen
// tensors and their moments are left untouched.
template <typename T>
void adam_step(Model<T>& model, const Gradients<T>& grads, AdamState<T>& state);

extern template class Model<float>;
extern template class Model<double>;

}  // namespace pcgnet::nn
