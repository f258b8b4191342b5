// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "pcgnet/detail/binary_io.hpp"
#include "pcgnet/errors.hpp"

namespace pcgnet {

HammingWindow hamming(std::size_t length) {
  if (length < 2) fail(ErrorCode::InvalidConfig, "window length must be >= 2");
  HammingWindow w;
  w.coefficients.resize(length);
  const double n_max = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    w.coefficients[n] =
        HammingWindow::alpha -
        (1.0 - HammingWindow::alpha) * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / n_max);
  }
  // Force exact symmetry; cos rounding differs by an ulp between n and N - n.
  for (std::size_t n = 0; n < length / 2; ++n) {
    w.coefficients[length - 1 - n] = w.coefficients[n];
  }
  return w;
}

StftAnalyzer::StftAnalyzer(HammingWindow window, std::size_t hop, double sample_rate)
    : window_(std::move(window)), hop_(hop), sample_rate_(sample_rate), fft_(window_.size()) {
  if (hop_ == 0) fail(ErrorCode::InvalidConfig, "hop must be positive");
}

std::size_t StftAnalyzer::frame_count(std::size_t signal_length) const {
  if (signal_length < fft_length()) return 0;
  return (signal_length - fft_length()) / hop_ + 1;
}

std::vector<std::complex<double>> StftAnalyzer::frame_spectrum(std::span<const double> x,
                                                               std::size_t m) const {
  const std::size_t len = fft_length();
  if (m * hop_ + len > x.size()) fail(ErrorCode::SegmentTooShort, "frame past end of signal");
  std::vector<std::complex<double>> buf(len);
  for (std::size_t n = 0; n < len; ++n) buf[n] = x[m * hop_ + n] * window_.coefficients[n];
  fft_.forward(buf);
  buf.resize(len / 2 + 1);
  return buf;
}

RawStft StftAnalyzer::magnitudes(std::span<const double> x) const {
  if (x.size() < fft_length()) {
    fail(ErrorCode::SegmentTooShort, "signal shorter than the analysis window");
  }
  RawStft out;
  out.bins = fft_length() / 2 + 1;
  out.frames = frame_count(x.size());
  out.bin_hz = sample_rate_ / static_cast<double>(fft_length());
  out.hop = hop_;
  out.magnitudes.assign(out.bins * out.frames, 0.0);
  for (std::size_t m = 0; m < out.frames; ++m) {
    const auto spec = frame_spectrum(x, m);
    for (std::size_t k = 0; k < out.bins; ++k) out.magnitudes[k * out.frames + m] = std::abs(spec[k]);
  }
  return out;
}

RawStft stft(const Segment& seg, const HammingWindow& window, std::size_t hop) {
  return StftAnalyzer(window, hop).magnitudes(seg.samples);
}

std::vector<double> log_power(const RawStft& s) {
  std::vector<double> out(s.magnitudes.size());
  std::transform(s.magnitudes.begin(), s.magnitudes.end(), out.begin(),
                 [](double m) { return 10.0 * std::log10(m * m + kLogFloor); });
  return out;
}

std::vector<double> bilinear_resize(std::span<const double> src, std::size_t rows, std::size_t cols,
                                    std::size_t out_rows, std::size_t out_cols) {
  if (rows == 0 || cols == 0 || src.size() != rows * cols || out_rows == 0 || out_cols == 0) {
    fail(ErrorCode::ShapeMismatch, "bad resize geometry");
  }
  const auto coord = [](std::size_t i, std::size_t n_in, std::size_t n_out) {
    return n_out == 1 ? 0.0
                      : static_cast<double>(i) * static_cast<double>(n_in - 1) /
                            static_cast<double>(n_out - 1);
  };
  std::vector<double> out(out_rows * out_cols);
  for (std::size_t r = 0; r < out_rows; ++r) {
    const double y = coord(r, rows, out_rows);
    const auto y0 = std::min(static_cast<std::size_t>(y), rows - 1);
    const std::size_t y1 = std::min(y0 + 1, rows - 1);
    const double fy = y - static_cast<double>(y0);
    for (std::size_t c = 0; c < out_cols; ++c) {
      const double x = coord(c, cols, out_cols);
      const auto x0 = std::min(static_cast<std::size_t>(x), cols - 1);
      const std::size_t x1 = std::min(x0 + 1, cols - 1);
      const double fx = x - static_cast<double>(x0);
      // std::lerp keeps flat regions exactly flat.
      const double top = std::lerp(src[y0 * cols + x0], src[y0 * cols + x1], fx);
      const double bottom = std::lerp(src[y1 * cols + x0], src[y1 * cols + x1], fx);
      out[r * out_cols + c] = std::lerp(top, bottom, fy);
    }
  }
  return out;
}

namespace {

std::vector<float> minmax_normalize(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::vector<float> out(v.size(), 0.0f);
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>((v[i] - *lo) / range);
  }
  return out;
}

}  // namespace

SpectrogramImage to_image(const RawStft& s, std::size_t rows, std::size_t cols) {
  const auto resized = bilinear_resize(log_power(s), s.bins, s.frames, rows, cols);
  SpectrogramImage img;
  img.rows = rows;
  img.cols = cols;
  img.pixels = minmax_normalize(resized);
  return img;
}

SpectrogramImage make_spectrogram(const Segment& seg, const StftAnalyzer& analyzer) {
  SpectrogramImage img = to_image(analyzer.magnitudes(seg.samples));
  img.label = seg.label;
  img.source_id = seg.id();
  return img;
}

SpectrogramImage resize_image(const SpectrogramImage& img, std::size_t rows, std::size_t cols) {
  std::vector<double> src(img.pixels.begin(), img.pixels.end());
  const auto resized = bilinear_resize(src, img.rows, img.cols, rows, cols);
  SpectrogramImage out;
  out.rows = rows;
  out.cols = cols;
  out.pixels.assign(resized.begin(), resized.end());
  out.label = img.label;
  out.source_id = img.source_id;
  return out;
}

void write_spectrogram(const std::filesystem::path& path, const SpectrogramImage& img) {
  if (img.pixels.size() != img.rows * img.cols) fail(ErrorCode::ShapeMismatch, "pixel count");
  detail::ByteWriter w;
  w.tag("SPCG");
  w.put<std::uint32_t>(kSpectrogramCacheVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(encode(img.label)));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(img.rows));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(img.cols));
  w.floats(img.pixels);
  detail::write_file(path.string(), w.data());
}

SpectrogramImage read_spectrogram(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path.string());
  detail::ByteReader r(bytes, ErrorCode::CacheCorrupt);
  if (!r.expect_tag("SPCG")) fail(ErrorCode::CacheCorrupt, "bad magic in " + path.string());
  if (r.get<std::uint32_t>() != kSpectrogramCacheVersion) {
    fail(ErrorCode::CacheCorrupt, "unsupported version in " + path.string());
  }
  const auto label = decode_label(r.get<std::uint8_t>());
  if (!label) fail(ErrorCode::CacheCorrupt, "bad label in " + path.string());
  SpectrogramImage img;
  img.label = *label;
  img.rows = r.get<std::uint32_t>();
  img.cols = r.get<std::uint32_t>();
  if (img.rows == 0 || img.cols == 0 || img.rows * img.cols * sizeof(float) != r.remaining()) {
    fail(ErrorCode::CacheCorrupt, "size mismatch in " + path.string());
  }
  img.pixels.resize(img.rows * img.cols);
  r.floats(img.pixels);
  img.source_id = path.stem().string();
  return img;
}

void write_pgm(const std::filesystem::path& path, const SpectrogramImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot create " + path.string());
  out << "P5\n" << img.cols << ' ' << img.rows << "\n255\n";
  for (std::size_t r = img.rows; r-- > 0;) {
    for (std::size_t c = 0; c < img.cols; ++c) {
      const float v = std::clamp(img.at(r, c), 0.0f, 1.0f);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f))));
    }
  }
}

}  // namespace pcgnet
