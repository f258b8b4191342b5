// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcgnet/nn/checkpoint.hpp"
#include "pcgnet/nn/config.hpp"
#include "pcgnet/nn/model.hpp"
#include "pcgnet/spectrogram.hpp"

namespace pcgnet {

struct TrainConfig {
  std::size_t epochs = 110;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  double threshold = 0.5;
  std::uint64_t seed = 42;
  // Scales each sample's loss by n / (2 n_class). Off by default.
  bool class_weighting = false;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> valid_loss;
  std::optional<double> valid_accuracy;
};

struct FoldData {
  std::span<const SpectrogramImage> images;
  std::span<const std::size_t> train;
  std::span<const std::size_t> valid;
};

struct TrainResult {
  nn::Checkpoint final_checkpoint;  // includes optimizer state
  nn::Checkpoint best_checkpoint;   // highest validation accuracy (earliest on ties)
  std::size_t best_epoch = 0;       // 0 = initialization
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch Adam on mean BCE, reshuffling the training indices every epoch
// from a stream seeded by `tc.seed`. With `init`, parameters start from that
// checkpoint (ConfigMismatch if it belongs to another model) and the named
// layers are frozen. Throws DivergedLoss on a non-finite loss.
TrainResult train_model(const nn::ModelConfig& config, const TrainConfig& tc, const FoldData& data,
                        const nn::Checkpoint* init = nullptr,
                        std::span<const std::string> frozen_layers = {},
                        const EpochCallback& on_epoch = {});

// Copies an image into a 1 x rows x cols tensor; ShapeMismatch if it does
// not fit `input`.
template <typename T>
nn::BasicTensor<T> image_tensor(const SpectrogramImage& img, const nn::Shape3& input);

// Inference-mode probabilities for images[indices] (all images if empty).
std::vector<double> predict(const nn::Model<float>& model, std::span<const SpectrogramImage> images,
                            std::span<const std::size_t> indices = {});

}  // namespace pcgnet
