// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcgnet/nn/config.hpp"
#include "pcgnet/nn/model.hpp"

namespace pcgnet::nn {

struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> values;
  bool trainable = true;
};

struct AdamSnapshot {
  AdamHyper hyper;
  std::uint64_t step = 0;
  std::vector<std::vector<float>> m, v;  // one per tensor, same order
};

// Serialized model: configuration, float32 parameters, trainable flags and
// optionally the optimizer state.
struct Checkpoint {
  ModelConfig config;
  std::vector<NamedTensor> tensors;
  std::optional<AdamSnapshot> adam;

  bool same_parameters(const Checkpoint& other) const;  // bitwise
};

template <typename T>
Checkpoint to_checkpoint(const Model<T>& model, const AdamState<T>* adam = nullptr);

// Throws ConfigMismatch when the checkpoint was made for another config.
template <typename T>
void load_parameters(Model<T>& model, const Checkpoint& ckpt);

template <typename T>
Model<T> model_from_checkpoint(const Checkpoint& ckpt);

template <typename T>
AdamState<T> adam_from_checkpoint(const Model<T>& model, const Checkpoint& ckpt);

// "PCGM", u32 version, config string, u32 tensor count, per tensor: name,
// u32 rank, u32 dims, float32 values; u8 trainable flags; u8 has_adam [+
// block]; trailing CRC32 of everything before it.
inline constexpr std::uint32_t kCheckpointVersion = 1;
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pcgnet::nn
