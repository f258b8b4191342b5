// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "pcgnet/errors.hpp"
#include "pcgnet/rng.hpp"

namespace pcgnet {

template <typename T>
nn::BasicTensor<T> image_tensor(const SpectrogramImage& img, const nn::Shape3& input) {
  if (input.c != 1 || img.rows != input.h || img.cols != input.w ||
      img.pixels.size() != img.rows * img.cols) {
    fail(ErrorCode::ShapeMismatch, "image " + std::to_string(img.rows) + "x" +
                                       std::to_string(img.cols) + " does not fit model input " +
                                       std::to_string(input.c) + "x" + std::to_string(input.h) +
                                       "x" + std::to_string(input.w));
  }
  return nn::BasicTensor<T>({1, img.rows, img.cols},
                            std::vector<T>(img.pixels.begin(), img.pixels.end()));
}

template nn::BasicTensor<float> image_tensor(const SpectrogramImage&, const nn::Shape3&);
template nn::BasicTensor<double> image_tensor(const SpectrogramImage&, const nn::Shape3&);

std::vector<double> predict(const nn::Model<float>& model, std::span<const SpectrogramImage> images,
                            std::span<const std::size_t> indices) {
  auto ws = model.make_workspace();
  std::vector<double> out;
  const std::size_t n = indices.empty() ? images.size() : indices.size();
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& img = images[indices.empty() ? k : indices[k]];
    out.push_back(model.forward(image_tensor<float>(img, model.config().input), nn::Mode::Infer, ws));
  }
  return out;
}

namespace {

struct EvalStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

EvalStats evaluate(const nn::Model<float>& model, std::span<const SpectrogramImage> images,
                   std::span<const std::size_t> indices, double threshold) {
  const auto probs = predict(model, images, indices);
  EvalStats s;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const int y = encode(images[indices[k]].label);
    s.loss += nn::bce_loss(probs[k], y);
    correct += static_cast<std::size_t>((probs[k] >= threshold) == (y == 1));
  }
  s.loss /= static_cast<double>(probs.size());
  s.accuracy = static_cast<double>(correct) / static_cast<double>(probs.size());
  return s;
}

}  // namespace

TrainResult train_model(const nn::ModelConfig& config, const TrainConfig& tc, const FoldData& data,
                        const nn::Checkpoint* init, std::span<const std::string> frozen_layers,
                        const EpochCallback& on_epoch) {
  if (tc.batch_size == 0) fail(ErrorCode::InvalidConfig, "batch size must be positive");
  if (!(tc.threshold > 0.0 && tc.threshold < 1.0)) {
    fail(ErrorCode::InvalidConfig, "threshold must lie in (0, 1)");
  }
  if (tc.epochs > 0 && data.train.empty()) fail(ErrorCode::EmptyInput, "no training items");

  nn::Model<float> model(config, derive_seed(tc.seed, 0));
  if (init) nn::load_parameters(model, *init);
  for (const auto& name : frozen_layers) {
    if (!model.set_layer_trainable(name, false)) {
      fail(ErrorCode::InvalidConfig, "no parameterised layer named '" + name + "'");
    }
  }
  auto adam = nn::make_adam(model, {.learning_rate = tc.learning_rate});

  std::array<double, 2> class_weight = {1.0, 1.0};
  if (tc.class_weighting) {
    std::array<std::size_t, 2> counts{};
    for (auto i : data.train) ++counts[encode(data.images[i].label)];
    for (int c = 0; c < 2; ++c) {
      if (counts[c]) {
        class_weight[c] = static_cast<double>(data.train.size()) / (2.0 * static_cast<double>(counts[c]));
      }
    }
  }

  TrainResult result;
  result.best_checkpoint = nn::to_checkpoint(model);
  std::optional<double> best_valid;

  Rng rng(derive_seed(tc.seed, 1));
  std::vector<std::size_t> order(data.train.begin(), data.train.end());
  auto ws = model.make_workspace();
  auto grads = model.make_gradients();

  // Pre-convert once; the float tensors are reused every epoch.
  std::vector<nn::Tensor> inputs(data.images.size());
  for (auto i : data.train) {
    if (inputs[i].size() == 0) inputs[i] = image_tensor<float>(data.images[i], config.input);
  }

  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t end = std::min(order.size(), start + tc.batch_size);
      for (auto& g : grads) g.fill(0.0f);
      for (std::size_t k = start; k < end; ++k) {
        const auto idx = order[k];
        const int y = encode(data.images[idx].label);
        const double p = model.forward(inputs[idx], nn::Mode::Train, ws, &rng);
        const double loss = nn::bce_loss(p, y) * class_weight[y];
        if (!std::isfinite(loss) || !std::isfinite(p)) {
          fail(ErrorCode::DivergedLoss, "non-finite loss at epoch " + std::to_string(epoch) +
                                            ", item " + data.images[idx].source_id);
        }
        loss_sum += loss;
        correct += static_cast<std::size_t>((p >= tc.threshold) == (y == 1));
        model.backward_logit(ws, static_cast<float>(nn::bce_grad_logit(p, y) * class_weight[y]), grads);
      }
      const float scale = 1.0f / static_cast<float>(end - start);
      for (auto& g : grads) {
        for (float& v : g.data()) v *= scale;
      }
      nn::adam_step(model, grads, adam);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!std::isfinite(rec.train_loss)) fail(ErrorCode::DivergedLoss, "epoch loss is not finite");
    if (!data.valid.empty()) {
      const auto v = evaluate(model, data.images, data.valid, tc.threshold);
      rec.valid_loss = v.loss;
      rec.valid_accuracy = v.accuracy;
      if (!best_valid || v.accuracy > *best_valid) {
        best_valid = v.accuracy;
        result.best_epoch = epoch;
        result.best_checkpoint = nn::to_checkpoint(model);
      }
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  result.final_checkpoint = nn::to_checkpoint(model, &adam);
  if (data.valid.empty() && tc.epochs > 0) {
    result.best_checkpoint = nn::to_checkpoint(model);
    result.best_epoch = tc.epochs;
  }
  return result;
}

}  // namespace pcgnet
