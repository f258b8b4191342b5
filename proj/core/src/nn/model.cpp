// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/nn/model.hpp"

#include <cmath>

namespace pcgnet::nn {

template <typename T>
Model<T>::Model(ModelConfig config, std::uint64_t seed) : Model(std::move(config), seed, false) {}

template <typename T>
Model<T> Model<T>::zeros(ModelConfig config) {
  return Model(std::move(config), 0, true);
}

template <typename T>
Model<T>::Model(ModelConfig config, std::uint64_t seed, bool zero) : config_(std::move(config)) {
  shapes_ = propagate_shapes(config_);
  build();
  if (zero) return;

  for (std::size_t li = 0; li < layers_.size(); ++li) {
    auto params = layers_[li]->params();
    if (params.empty()) continue;
    Rng rng(derive_seed(seed, li));
    auto& weight = params[0];
    const std::size_t fan_out = weight.dim(0);
    const std::size_t fan_in = weight.size() / fan_out;
    Activation act = Activation::Relu;
    if (const auto* d = std::get_if<DenseSpec>(&config_.layers[li])) act = d->activation;
    if (const auto* c = std::get_if<Conv2DSpec>(&config_.layers[li])) act = c->activation;
    if (act == Activation::Relu) {
      const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
      for (T& w : weight.data()) w = static_cast<T>(rng.normal() * stddev);
    } else {
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (T& w : weight.data()) w = static_cast<T>(rng.uniform(-limit, limit));
    }
  }
}

template <typename T>
void Model<T>::build() {
  const auto names = layer_names(config_);
  layers_.clear();
  Shape3 in = config_.input;
  for (std::size_t i = 0; i < config_.layers.size(); ++i) {
    const auto& spec = config_.layers[i];
    std::unique_ptr<Layer<T>> layer;
    if (const auto* c = std::get_if<Conv2DSpec>(&spec)) {
      layer = std::make_unique<Conv2D<T>>(names[i], in.c, *c);
    } else if (const auto* p = std::get_if<MaxPoolSpec>(&spec)) {
      layer = std::make_unique<MaxPool2D<T>>(names[i], *p);
    } else if (const auto* d = std::get_if<DropoutSpec>(&spec)) {
      layer = std::make_unique<Dropout<T>>(names[i], *d);
    } else if (std::holds_alternative<FlattenSpec>(spec)) {
      layer = std::make_unique<Flatten<T>>(names[i]);
    } else {
      layer = std::make_unique<Dense<T>>(names[i], in.size(), std::get<DenseSpec>(spec));
    }
    layers_.push_back(std::move(layer));
    in = shapes_[i];
  }
  index_params();
}

template <typename T>
void Model<T>::index_params() {
  param_refs_.clear();
  param_names_.clear();
  param_layers_.clear();
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const auto params = layers_[li]->params();
    for (std::size_t s = 0; s < params.size(); ++s) {
      param_refs_.push_back({li, s});
      param_layers_.push_back(layers_[li]->name());
      param_names_.push_back(layers_[li]->name() + (s == 0 ? ".weight" : ".bias"));
    }
  }
  trainable_.assign(param_refs_.size(), true);
}

template <typename T>
Model<T>::Model(const Model& other) : config_(other.config_), shapes_(other.shapes_) {
  build();
  for (std::size_t i = 0; i < param_count(); ++i) param(i) = other.param(i);
  trainable_ = other.trainable_;
}

template <typename T>
Model<T>& Model<T>::operator=(const Model& other) {
  if (this != &other) {
    Model copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
BasicTensor<T>& Model<T>::param(std::size_t i) {
  const auto& r = param_refs_.at(i);
  return layers_[r.layer]->params()[r.slot];
}

template <typename T>
const BasicTensor<T>& Model<T>::param(std::size_t i) const {
  const auto& r = param_refs_.at(i);
  return std::as_const(*layers_[r.layer]).params()[r.slot];
}

template <typename T>
bool Model<T>::set_layer_trainable(const std::string& layer_name, bool on) {
  bool found = false;
  for (std::size_t i = 0; i < param_count(); ++i) {
    if (param_layers_[i] == layer_name) {
      trainable_[i] = on;
      found = true;
    }
  }
  return found;
}

template <typename T>
Workspace<T> Model<T>::make_workspace() const {
  Workspace<T> ws;
  ws.activations.resize(layers_.size() + 1);
  ws.caches.resize(layers_.size());
  return ws;
}

template <typename T>
Gradients<T> Model<T>::make_gradients() const {
  Gradients<T> g;
  g.reserve(param_count());
  for (std::size_t i = 0; i < param_count(); ++i) g.emplace_back(param(i).shape());
  return g;
}

template <typename T>
T Model<T>::forward(const BasicTensor<T>& input, Mode mode, Workspace<T>& ws, Rng* rng) const {
  const Shape3& s = config_.input;
  if (input.size() != s.size()) {
    fail(ErrorCode::ShapeMismatch, "model " + config_.name + " expects " + std::to_string(s.c) +
                                       "x" + std::to_string(s.h) + "x" + std::to_string(s.w) +
                                       " input, got " + shape_string(input.shape()));
  }
  if (ws.activations.size() != layers_.size() + 1) ws = make_workspace();
  ws.activations[0] = input;
  ws.activations[0].reshape({s.c, s.h, s.w});
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->forward(ws.activations[i], ws.activations[i + 1], ws.caches[i], mode, rng);
  }
  return ws.activations.back()[0];
}

template <typename T>
void Model<T>::backward_impl(Workspace<T>& ws, const BasicTensor<T>& top, bool preact,
                             Gradients<T>& grads, BasicTensor<T>* input_grad) const {
  BasicTensor<T>* g_out = &ws.grad_a;
  BasicTensor<T>* g_in = &ws.grad_b;
  *g_out = top;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto params = layers_[i]->params();
    std::span<BasicTensor<T>> pg;
    if (!params.empty()) {
      const auto first = static_cast<std::size_t>(
          std::find_if(param_refs_.begin(), param_refs_.end(),
                       [&](const ParamRef& r) { return r.layer == i; }) -
          param_refs_.begin());
      pg = std::span<BasicTensor<T>>(grads.data() + first, params.size());
    }
    const bool need_input = i > 0 || input_grad != nullptr;
    layers_[i]->backward(ws.activations[i], ws.activations[i + 1], *g_out,
                         need_input ? g_in : nullptr, ws.caches[i], pg,
                         preact && i + 1 == layers_.size());
    std::swap(g_out, g_in);
  }
  if (input_grad) *input_grad = *g_out;
}

template <typename T>
void Model<T>::backward_logit(Workspace<T>& ws, T dlogit, Gradients<T>& grads,
                              BasicTensor<T>* input_grad) const {
  backward_impl(ws, BasicTensor<T>({1}, dlogit), true, grads, input_grad);
}

template <typename T>
void Model<T>::backward_prob(Workspace<T>& ws, T dprob, Gradients<T>& grads,
                             BasicTensor<T>* input_grad) const {
  backward_impl(ws, BasicTensor<T>({1}, dprob), false, grads, input_grad);
}

template <typename T>
template <typename U>
Model<U> Model<T>::cast() const {
  Model<U> out = Model<U>::zeros(config_);
  for (std::size_t i = 0; i < param_count(); ++i) {
    const auto src = param(i).data();
    auto dst = out.param(i).data();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = static_cast<U>(src[k]);
    out.set_trainable(i, trainable(i));
  }
  return out;
}

template <typename T>
AdamState<T> make_adam(const Model<T>& model, AdamHyper hyper) {
  AdamState<T> s;
  s.hyper = hyper;
  for (std::size_t i = 0; i < model.param_count(); ++i) {
    s.m.emplace_back(model.param(i).shape());
    s.v.emplace_back(model.param(i).shape());
  }
  return s;
}

template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads, std::span<T> m, std::span<T> v,
                 std::uint64_t step, const AdamHyper& h) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    fail(ErrorCode::ShapeMismatch, "adam: parameter/gradient/moment sizes differ");
  }
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double mi = h.beta1 * m[i] + (1.0 - h.beta1) * g;
    const double vi = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    const double update = h.learning_rate * (mi / c1) / (std::sqrt(vi / c2) + h.epsilon);
    params[i] = static_cast<T>(params[i] - update);
  }
}

template <typename T>
void adam_step(Model<T>& model, const Gradients<T>& grads, AdamState<T>& state) {
  if (grads.size() != model.param_count() || state.m.size() != model.param_count()) {
    fail(ErrorCode::ShapeMismatch, "adam: gradient list does not match the model");
  }
  ++state.step;
  for (std::size_t i = 0; i < model.param_count(); ++i) {
    if (!model.trainable(i)) continue;
    adam_update<T>(model.param(i).data(), grads[i].data(), state.m[i].data(), state.v[i].data(),
                   state.step, state.hyper);
  }
}

template class Model<float>;
template class Model<double>;
template Model<double> Model<float>::cast<double>() const;
template Model<float> Model<double>::cast<float>() const;
template Model<float> Model<float>::cast<float>() const;
template Model<double> Model<double>::cast<double>() const;
template AdamState<float> make_adam(const Model<float>&, AdamHyper);
template AdamState<double> make_adam(const Model<double>&, AdamHyper);
template void adam_update<float>(std::span<float>, std::span<const float>, std::span<float>,
                                 std::span<float>, std::uint64_t, const AdamHyper&);
template void adam_update<double>(std::span<double>, std::span<const double>, std::span<double>,
                                  std::span<double>, std::uint64_t, const AdamHyper&);
template void adam_step(Model<float>&, const Gradients<float>&, AdamState<float>&);
template void adam_step(Model<double>&, const Gradients<double>&, AdamState<double>&);

}  // namespace pcgnet::nn
