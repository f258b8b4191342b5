// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>

#include "pcgnet/errors.hpp"
#include "pcgnet/signal_io.hpp"

namespace pcgnet {
namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

RationalResampler::RationalResampler(int source_rate, int target_rate, ResamplerOptions opts) {
  if (source_rate <= 0 || target_rate <= 0) {
    fail(ErrorCode::InvalidConfig, "sample rates must be positive");
  }
  const int g = std::gcd(source_rate, target_rate);
  up_ = target_rate / g;
  down_ = source_rate / g;
  if (up_ == 1 && down_ == 1) return;

  // Work on the upsampled grid (rate up * source). Zero crossings of the
  // low-pass are max(up, down) samples apart there.
  const double spacing = static_cast<double>(std::max(up_, down_));
  const double reach = opts.zero_crossings * spacing;
  const double gain = static_cast<double>(up_) / spacing;
  const double i0_beta = std::cyl_bessel_i(0.0, opts.kaiser_beta);

  half_ = static_cast<long>(reach) / up_ + 1;
  taps_per_phase_ = static_cast<std::size_t>(2 * half_ + 1);
  table_.assign(static_cast<std::size_t>(up_) * taps_per_phase_, 0.0);

  for (int r = 0; r < up_; ++r) {
    for (std::size_t j = 0; j < taps_per_phase_; ++j) {
      const double offset = r + static_cast<double>(half_ - static_cast<long>(j)) * up_;
      if (std::abs(offset) > reach) continue;
      const double ratio = offset / reach;
      const double window =
          std::cyl_bessel_i(0.0, opts.kaiser_beta * std::sqrt(1.0 - ratio * ratio)) / i0_beta;
      table_[static_cast<std::size_t>(r) * taps_per_phase_ + j] = gain * sinc(offset / spacing) * window;
    }
  }
}

std::size_t RationalResampler::output_length(std::size_t input_length) const noexcept {
  const auto num = static_cast<std::uint64_t>(input_length) * static_cast<std::uint64_t>(up_);
  return static_cast<std::size_t>((2 * num + static_cast<std::uint64_t>(down_)) /
                                  (2 * static_cast<std::uint64_t>(down_)));
}

std::vector<double> RationalResampler::process(std::span<const double> input) const {
  if (up_ == 1 && down_ == 1) return {input.begin(), input.end()};

  const std::size_t n_out = output_length(input.size());
  const long n_in = static_cast<long>(input.size());
  std::vector<double> out(n_out, 0.0);
  for (std::size_t n = 0; n < n_out; ++n) {
    const long t = static_cast<long>(n) * down_;
    const long base = t / up_;
    const auto phase = static_cast<std::size_t>(t % up_);
    const double* taps = table_.data() + phase * taps_per_phase_;
    const long first = base - half_;
    const long j_lo = std::max(0L, -first);
    const long j_hi = std::min(static_cast<long>(taps_per_phase_), n_in - first);
    double acc = 0.0;
    for (long j = j_lo; j < j_hi; ++j) acc += taps[j] * input[static_cast<std::size_t>(first + j)];
    out[n] = acc;
  }
  return out;
}

AudioRecording resample(const AudioRecording& rec, int target_rate) {
  if (rec.sample_rate == target_rate) return rec;
  RationalResampler rs(rec.sample_rate, target_rate);
  AudioRecording out;
  out.samples = rs.process(rec.samples);
  // Ringing near full-scale transients may overshoot; keep the [-1, 1] contract.
  for (double& v : out.samples) v = std::clamp(v, -1.0, 1.0);
  out.sample_rate = target_rate;
  out.source_id = rec.source_id;
  out.dataset = rec.dataset;
  out.label = rec.label;
  return out;
}

}  // namespace pcgnet
