// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pcgnet/recording.hpp"
#include "pcgnet/signal_io.hpp"

namespace pcgnet {

inline constexpr std::size_t kSegmentLength = 16000;  // 8 s at 2000 Hz

// One biquad, a0 == 1: y = b0 x + b1 x[-1] + b2 x[-2] - a1 y[-1] - a2 y[-2].
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

  std::complex<double> response(double omega) const;
  // Roots of z^2 + a1 z + a2.
  std::array<std::complex<double>, 2> poles() const;
};

struct BandpassDesign {
  int order = 4;  // low-pass prototype order; the band-pass has 2 * order poles
  double low_hz = 20.0;
  double high_hz = 400.0;
  double fs = kCanonicalRate;
};

class BandpassFilter {
 public:
  BandpassFilter(BandpassDesign design, std::vector<Biquad> sections)
      : design_(design), sections_(std::move(sections)) {}

  const BandpassDesign& design() const noexcept { return design_; }
  std::span<const Biquad> sections() const noexcept { return sections_; }

  std::complex<double> response(double hz) const;
  double magnitude(double hz) const { return std::abs(response(hz)); }
  // Largest pole modulus across all sections.
  double max_pole_radius() const;

  // Single causal pass with zero initial state.
  std::vector<double> filter(std::span<const double> x) const;

 private:
  BandpassDesign design_;
  std::vector<Biquad> sections_;
};

// Butterworth band-pass via pre-warped bilinear transform, as cascaded
// second-order sections. Throws InvalidBand unless 0 < low < high < fs/2.
BandpassFilter design_bandpass(BandpassDesign design = {});

AudioRecording apply_filter(const BandpassFilter& f, const AudioRecording& rec);

struct Segment {
  std::vector<double> samples;  // exactly kSegmentLength values
  std::string parent_id;
  std::size_t index = 0;
  Label label = Label::Normal;

  std::string id() const { return parent_id + "_" + std::to_string(index); }
};

// floor(len / 16000) back-to-back windows from sample 0; the tail is dropped.
std::vector<Segment> segment(const AudioRecording& rec);

// load -> resample -> filter -> segment for one decoded recording.
std::vector<Segment> preprocess_recording(const AudioRecording& rec, const BandpassFilter& f);

struct PreprocessFailure {
  std::filesystem::path path;
  std::string message;
};

struct PreprocessResult {
  std::vector<Segment> segments;  // manifest order, then window order
  std::vector<PreprocessFailure> failures;
  std::size_t recordings_used = 0;
  std::size_t recordings_too_short = 0;
};

PreprocessResult preprocess_dataset(const DatasetManifest& manifest, unsigned jobs = 1);

// Segment cache: "PCGS", u32 version, u8 label, 16000 float32 samples.
inline constexpr std::uint32_t kSegmentCacheVersion = 1;
std::string segment_filename(const Segment& s);
void write_segment(const std::filesystem::path& path, const Segment& s);
// parent_id and index are recovered from a `<source_id>_<index>.seg` name.
Segment read_segment(const std::filesystem::path& path);

}  // namespace pcgnet
