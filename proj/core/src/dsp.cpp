// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcgnet/detail/binary_io.hpp"
#include "pcgnet/errors.hpp"
#include "pcgnet/parallel.hpp"

namespace pcgnet {

using cplx = std::complex<double>;

cplx Biquad::response(double omega) const {
  const cplx z1 = std::polar(1.0, -omega);
  const cplx z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

std::array<cplx, 2> Biquad::poles() const {
  const cplx disc = std::sqrt(cplx(a1 * a1 - 4.0 * a2, 0.0));
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

cplx BandpassFilter::response(double hz) const {
  const double omega = 2.0 * std::numbers::pi * hz / design_.fs;
  cplx h = 1.0;
  for (const auto& s : sections_) h *= s.response(omega);
  return h;
}

double BandpassFilter::max_pole_radius() const {
  double r = 0.0;
  for (const auto& s : sections_) {
    for (const auto& p : s.poles()) r = std::max(r, std::abs(p));
  }
  return r;
}

std::vector<double> BandpassFilter::filter(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sections_) {
    // Transposed direct form II.
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

BandpassFilter design_bandpass(BandpassDesign d) {
  if (d.order < 1) fail(ErrorCode::InvalidBand, "order must be positive");
  if (!(d.fs > 0.0) || !(d.low_hz > 0.0) || !(d.low_hz < d.high_hz) || !(d.high_hz < d.fs / 2.0)) {
    fail(ErrorCode::InvalidBand, "need 0 < low < high < fs/2");
  }
  const int n = d.order;
  const double fs2 = 2.0 * d.fs;
  const double w1 = fs2 * std::tan(std::numbers::pi * d.low_hz / d.fs);
  const double w2 = fs2 * std::tan(std::numbers::pi * d.high_hz / d.fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;

  // Analog prototype poles on the left half of the unit circle, mapped
  // low-pass -> band-pass (each pole splits into two).
  std::vector<cplx> analog;
  for (int k = 0; k < n; ++k) {
    const cplx p = std::polar(1.0, std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n));
    const cplx half = p * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0sq);
    analog.push_back(half + root);
    analog.push_back(half - root);
  }

  // Bilinear transform. The analog band-pass is bw^n s^n / prod(s - p_i):
  // n zeros at s = 0 map to z = 1, the n zeros at infinity to z = -1.
  cplx gain = std::pow(bw, n) * std::pow(fs2, n);
  std::vector<cplx> digital;
  for (const cplx& p : analog) {
    gain /= (fs2 - p);
    digital.push_back((fs2 + p) / (fs2 - p));
  }

  std::vector<cplx> upper;
  for (const cplx& z : digital) {
    if (z.imag() > 0.0) upper.push_back(z);
  }
  if (upper.size() != static_cast<std::size_t>(n)) {
    fail(ErrorCode::InvalidBand, "band too narrow for conjugate-pair sections");
  }
  // Poles nearest the unit circle go last.
  std::sort(upper.begin(), upper.end(),
            [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });

  const double k = gain.real();
  const double per_section = std::pow(std::abs(k), 1.0 / n);
  std::vector<Biquad> sections;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    const double g = (i == 0 && k < 0.0) ? -per_section : per_section;
    sections.push_back({g, 0.0, -g, -2.0 * upper[i].real(), std::norm(upper[i])});
  }
  BandpassFilter f(d, std::move(sections));
  if (!(f.max_pole_radius() < 1.0)) fail(ErrorCode::InvalidBand, "unstable design");
  return f;
}

AudioRecording apply_filter(const BandpassFilter& f, const AudioRecording& rec) {
  if (static_cast<double>(rec.sample_rate) != f.design().fs) {
    fail(ErrorCode::RateMismatch, "recording at " + std::to_string(rec.sample_rate) +
                                      " Hz, filter designed for " +
                                      std::to_string(f.design().fs) + " Hz");
  }
  AudioRecording out;
  out.samples = f.filter(rec.samples);
  out.sample_rate = rec.sample_rate;
  out.source_id = rec.source_id;
  out.dataset = rec.dataset;
  out.label = rec.label;
  return out;
}

std::vector<Segment> segment(const AudioRecording& rec) {
  if (rec.sample_rate != kCanonicalRate) {
    fail(ErrorCode::RateMismatch, "segmentation expects 2000 Hz input");
  }
  const std::size_t count = rec.samples.size() / kSegmentLength;
  std::vector<Segment> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto first = rec.samples.begin() + static_cast<std::ptrdiff_t>(i * kSegmentLength);
    Segment s;
    s.samples.assign(first, first + static_cast<std::ptrdiff_t>(kSegmentLength));
    s.parent_id = rec.source_id;
    s.index = i;
    s.label = rec.label.value_or(Label::Normal);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Segment> preprocess_recording(const AudioRecording& rec, const BandpassFilter& f) {
  return segment(apply_filter(f, resample(rec, kCanonicalRate)));
}

PreprocessResult preprocess_dataset(const DatasetManifest& manifest, unsigned jobs) {
  const BandpassFilter filter = design_bandpass();
  const auto& entries = manifest.entries();

  struct Slot {
    std::vector<Segment> segments;
    std::string error;
  };
  std::vector<Slot> slots(entries.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const auto& e = entries[i];
    try {
      AudioRecording rec = load_wav(e.path);
      rec.source_id = e.source_id;
      rec.label = e.label;
      rec.dataset = e.dataset;
      slots[i].segments = preprocess_recording(rec, filter);
    } catch (const std::exception& ex) {
      slots[i].error = ex.what();
    }
  });

  PreprocessResult result;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].error.empty()) {
      result.failures.push_back({entries[i].path, slots[i].error});
      continue;
    }
    if (slots[i].segments.empty()) {
      ++result.recordings_too_short;
      continue;
    }
    ++result.recordings_used;
    for (auto& s : slots[i].segments) result.segments.push_back(std::move(s));
  }
  return result;
}

std::string segment_filename(const Segment& s) { return s.id() + ".seg"; }

void write_segment(const std::filesystem::path& path, const Segment& s) {
  if (s.samples.size() != kSegmentLength) {
    fail(ErrorCode::ShapeMismatch, "segment must hold 16000 samples");
  }
  detail::ByteWriter w;
  w.tag("PCGS");
  w.put<std::uint32_t>(kSegmentCacheVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(encode(s.label)));
  std::vector<float> f(s.samples.begin(), s.samples.end());
  w.floats(f);
  detail::write_file(path.string(), w.data());
}

Segment read_segment(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path.string());
  detail::ByteReader r(bytes, ErrorCode::CacheCorrupt);
  if (!r.expect_tag("PCGS")) fail(ErrorCode::CacheCorrupt, "bad magic in " + path.string());
  if (r.get<std::uint32_t>() != kSegmentCacheVersion) {
    fail(ErrorCode::CacheCorrupt, "unsupported segment version in " + path.string());
  }
  const auto label = decode_label(r.get<std::uint8_t>());
  if (!label) fail(ErrorCode::CacheCorrupt, "bad label in " + path.string());
  std::vector<float> f(kSegmentLength);
  r.floats(f);
  if (r.remaining() != 0) fail(ErrorCode::CacheCorrupt, "trailing bytes in " + path.string());

  Segment s;
  s.samples.assign(f.begin(), f.end());
  s.label = *label;
  const std::string stem = path.stem().string();
  const auto us = stem.rfind('_');
  if (us != std::string::npos) {
    s.parent_id = stem.substr(0, us);
    try {
      s.index = std::stoul(stem.substr(us + 1));
    } catch (const std::exception&) {
      s.parent_id = stem;
    }
  } else {
    s.parent_id = stem;
  }
  return s;
}

}  // namespace pcgnet
