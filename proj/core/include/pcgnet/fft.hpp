// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pcgnet {

// In-place iterative radix-2 FFT with precomputed twiddles.
// X[k] = sum_n x[n] exp(-j 2 pi n k / N).
class Fft {
 public:
  explicit Fft(std::size_t n);  // n must be a power of two

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_;
  std::vector<std::complex<double>> twiddle_;
  std::vector<std::size_t> bitrev_;
};

}  // namespace pcgnet
