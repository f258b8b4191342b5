// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "pcgnet/errors.hpp"

namespace pcgnet {

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0 || !std::has_single_bit(n)) fail(ErrorCode::InvalidConfig, "FFT size must be a power of two");
  twiddle_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    twiddle_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  }
  const int bits = std::countr_zero(n);
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
}

void Fft::forward(std::span<std::complex<double>> data) const {
  if (data.size() != n_) fail(ErrorCode::ShapeMismatch, "FFT input length mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const auto t = twiddle_[k * stride] * data[start + k + half];
        data[start + k + half] = data[start + k] - t;
        data[start + k] += t;
      }
    }
  }
}

}  // namespace pcgnet
