// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "pcgnet/dsp.hpp"
#include "pcgnet/signal_io.hpp"
#include "pcgnet/spectrogram.hpp"

namespace pcgnet {

// A prepared cache directory holds
//   manifest.csv          the recordings that were scanned
//   segments/<id>.seg     8-second filtered windows
//   spectrograms/<id>.spcg
struct CacheLayout {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.csv"; }
  std::filesystem::path segments() const { return root / "segments"; }
  std::filesystem::path spectrograms() const { return root / "spectrograms"; }
};

struct PrepareSummary {
  std::size_t spectrograms = 0;
  std::size_t normal = 0;
  std::size_t abnormal = 0;
  std::size_t recordings = 0;
  std::size_t recordings_too_short = 0;
  std::vector<PreprocessFailure> failures;
};

std::vector<SpectrogramImage> spectrograms_from_segments(std::span<const Segment> segments,
                                                         unsigned jobs = 1);

// Runs the full preprocessing chain over `manifest` and (re)writes the cache.
// Stale .seg/.spcg files from a previous run are removed first.
PrepareSummary prepare_cache(const DatasetManifest& manifest, const CacheLayout& cache,
                             unsigned jobs = 1);

// All spectrograms of a cache, sorted by id. EmptyInput if there are none.
std::vector<SpectrogramImage> load_spectrograms(const CacheLayout& cache);

// Keeps the first `per_class` images of each label, preserving order.
std::vector<SpectrogramImage> take_per_class(std::span<const SpectrogramImage> images,
                                             std::size_t per_class);

}  // namespace pcgnet
