// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/dataset.hpp"

#include <algorithm>
#include <array>

#include "pcgnet/errors.hpp"
#include "pcgnet/parallel.hpp"

namespace fs = std::filesystem;

namespace pcgnet {

std::vector<SpectrogramImage> spectrograms_from_segments(std::span<const Segment> segments,
                                                         unsigned jobs) {
  const StftAnalyzer analyzer;
  std::vector<SpectrogramImage> out(segments.size());
  parallel_for(segments.size(), jobs,
               [&](std::size_t i) { out[i] = make_spectrogram(segments[i], analyzer); });
  return out;
}

namespace {

void clear_extension(const fs::path& dir, const char* ext) {
  if (!fs::exists(dir)) {
    fs::create_directories(dir);
    return;
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) fs::remove(e.path());
  }
}

}  // namespace

PrepareSummary prepare_cache(const DatasetManifest& manifest, const CacheLayout& cache,
                             unsigned jobs) {
  auto pre = preprocess_dataset(manifest, jobs);
  const auto images = spectrograms_from_segments(pre.segments, jobs);

  fs::create_directories(cache.root);
  clear_extension(cache.segments(), ".seg");
  clear_extension(cache.spectrograms(), ".spcg");
  write_manifest_csv(manifest, cache.manifest());
  parallel_for(images.size(), jobs, [&](std::size_t i) {
    write_segment(cache.segments() / segment_filename(pre.segments[i]), pre.segments[i]);
    write_spectrogram(cache.spectrograms() / (images[i].source_id + ".spcg"), images[i]);
  });

  PrepareSummary s;
  s.spectrograms = images.size();
  for (const auto& img : images) (img.label == Label::Abnormal ? s.abnormal : s.normal) += 1;
  s.recordings = pre.recordings_used;
  s.recordings_too_short = pre.recordings_too_short;
  s.failures = std::move(pre.failures);
  return s;
}

std::vector<SpectrogramImage> load_spectrograms(const CacheLayout& cache) {
  std::vector<fs::path> files;
  if (fs::is_directory(cache.spectrograms())) {
    for (const auto& e : fs::directory_iterator(cache.spectrograms())) {
      if (e.is_regular_file() && e.path().extension() == ".spcg") files.push_back(e.path());
    }
  }
  if (files.empty()) {
    fail(ErrorCode::EmptyInput, "no spectrograms in " + cache.spectrograms().string() +
                                    " (run `prepare` first)");
  }
  std::sort(files.begin(), files.end());
  std::vector<SpectrogramImage> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_spectrogram(f));
  return out;
}

std::vector<SpectrogramImage> take_per_class(std::span<const SpectrogramImage> images,
                                             std::size_t per_class) {
  std::array<std::size_t, 2> taken{};
  std::vector<SpectrogramImage> out;
  for (const auto& img : images) {
    auto& n = taken[encode(img.label)];
    if (n < per_class) {
      out.push_back(img);
      ++n;
    }
  }
  return out;
}

}  // namespace pcgnet
