// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pcgnet/dsp.hpp"
#include "pcgnet/fft.hpp"
#include "pcgnet/recording.hpp"

namespace pcgnet {

inline constexpr std::size_t kWindowLength = 128;  // 64 ms at 2000 Hz
inline constexpr std::size_t kHop = 64;
inline constexpr std::size_t kImageRows = 137;
inline constexpr std::size_t kImageCols = 310;
inline constexpr double kLogFloor = 1e-10;

struct HammingWindow {
  static constexpr double alpha = 0.54;
  std::vector<double> coefficients;

  std::size_t size() const noexcept { return coefficients.size(); }
};

// h[n] = 0.54 - 0.46 cos(2 pi n / N), N = L - 1.
HammingWindow hamming(std::size_t length = kWindowLength);

// One-sided magnitudes, bins x frames, stored bin-major.
struct RawStft {
  std::size_t bins = 0;
  std::size_t frames = 0;
  double bin_hz = 0.0;
  std::size_t hop = 0;
  std::vector<double> magnitudes;

  double at(std::size_t bin, std::size_t frame) const { return magnitudes[bin * frames + frame]; }
};

class StftAnalyzer {
 public:
  explicit StftAnalyzer(HammingWindow window = hamming(), std::size_t hop = kHop,
                        double sample_rate = kCanonicalRate);

  std::size_t fft_length() const noexcept { return window_.size(); }
  std::size_t hop() const noexcept { return hop_; }
  std::size_t frame_count(std::size_t signal_length) const;
  const HammingWindow& window() const noexcept { return window_; }

  // Complex one-sided spectrum (fft_length/2 + 1 bins) of frame m.
  std::vector<std::complex<double>> frame_spectrum(std::span<const double> x, std::size_t m) const;
  // Throws SegmentTooShort when x is shorter than one window.
  RawStft magnitudes(std::span<const double> x) const;

 private:
  HammingWindow window_;
  std::size_t hop_;
  double sample_rate_;
  Fft fft_;
};

RawStft stft(const Segment& seg, const HammingWindow& window, std::size_t hop = kHop);

struct SpectrogramImage {
  std::size_t rows = kImageRows;
  std::size_t cols = kImageCols;
  std::vector<float> pixels;  // row-major; row = frequency, col = time
  Label label = Label::Normal;
  std::string source_id;      // segment id

  float at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

// 10 log10(mag^2 + 1e-10), bin x frame.
std::vector<double> log_power(const RawStft& s);

// Align-corners bilinear resize of a rows x cols grid.
std::vector<double> bilinear_resize(std::span<const double> src, std::size_t rows, std::size_t cols,
                                    std::size_t out_rows, std::size_t out_cols);

SpectrogramImage to_image(const RawStft& s, std::size_t rows = kImageRows,
                          std::size_t cols = kImageCols);

SpectrogramImage make_spectrogram(const Segment& seg, const StftAnalyzer& analyzer);

// Downscale an image (used for reduced-resolution smoke runs).
SpectrogramImage resize_image(const SpectrogramImage& img, std::size_t rows, std::size_t cols);

// "SPCG", u32 version, u8 label, u32 rows, u32 cols, row-major float32.
inline constexpr std::uint32_t kSpectrogramCacheVersion = 1;
void write_spectrogram(const std::filesystem::path& path, const SpectrogramImage& img);
// source_id is recovered from the file stem.
SpectrogramImage read_spectrogram(const std::filesystem::path& path);
// 8-bit binary PGM, low frequencies at the bottom.
void write_pgm(const std::filesystem::path& path, const SpectrogramImage& img);

}  // namespace pcgnet
