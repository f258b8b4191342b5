// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pcgnet::nn {

enum class Activation { Identity, Relu, Sigmoid };

std::string_view to_string(Activation a) noexcept;

// Same zero padding, stride 1. Even kernels pad one extra row/column at the
// bottom/right.
struct Conv2DSpec {
  std::size_t filters = 0;
  std::size_t kh = 3;
  std::size_t kw = 3;
  Activation activation = Activation::Relu;
};

// Non-overlapping: stride equals the pool size; remainders are dropped.
struct MaxPoolSpec {
  std::size_t ph = 2;
  std::size_t pw = 2;
};

struct DropoutSpec {
  double rate = 0.0;
};

struct FlattenSpec {};

struct DenseSpec {
  std::size_t units = 1;
  Activation activation = Activation::Sigmoid;
};

using LayerSpec = std::variant<Conv2DSpec, MaxPoolSpec, DropoutSpec, FlattenSpec, DenseSpec>;

struct Shape3 {
  std::size_t c = 1, h = 1, w = 1;

  std::size_t size() const noexcept { return c * h * w; }
  bool operator==(const Shape3&) const = default;
};

inline constexpr Shape3 kSpectrogramInput{1, 137, 310};

struct ModelConfig {
  std::string name = "custom";
  Shape3 input = kSpectrogramInput;
  std::vector<LayerSpec> layers;

  bool operator==(const ModelConfig& other) const;
};

// Per-layer output shapes. Throws InvalidConfig on a bad spec, a zero
// dimension, or a head that is not Dense(1, Sigmoid).
std::vector<Shape3> propagate_shapes(const ModelConfig& config);

// conv1, pool1, drop1, flatten1, dense1, ... in layer order.
std::vector<std::string> layer_names(const ModelConfig& config);

// Text form, e.g. "name=BEST input=1x137x310 conv(128,3,3,relu) pool(2,2)
// dropout(0.25) flatten dense(1,sigmoid)".
std::string to_string(const ModelConfig& config);
ModelConfig parse_model_config(std::string_view text);

// EXP1..EXP7 follow the seven architecture rows literally, each followed by
// flatten, 50% dropout and the sigmoid unit. BEST is the four-block model
// with pooling and 25% dropout after every convolution.
std::vector<std::string> preset_names();
std::vector<std::string> study1_presets();
ModelConfig preset(std::string_view name, Shape3 input = kSpectrogramInput);

}  // namespace pcgnet::nn
