// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcgnet {

inline constexpr int kCanonicalRate = 2000;

enum class Label : std::uint8_t { Normal = 0, Abnormal = 1 };

inline constexpr int encode(Label l) noexcept { return static_cast<int>(l); }
std::optional<Label> decode_label(int value) noexcept;
std::string_view to_string(Label l) noexcept;

enum class DatasetTag : std::uint8_t { PhysioNet, PascalA, PascalB };

std::string_view to_string(DatasetTag d) noexcept;
std::optional<DatasetTag> parse_dataset_tag(std::string_view s) noexcept;

// Mono recording with samples in [-1, 1]. Label and dataset are unset
// straight out of load_wav and filled in from the manifest.
struct AudioRecording {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;
  std::optional<DatasetTag> dataset;
  std::optional<Label> label;

  double duration_seconds() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

}  // namespace pcgnet
