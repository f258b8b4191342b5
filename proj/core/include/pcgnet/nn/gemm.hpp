// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace pcgnet::nn {

// Row-major C = alpha * op(A) * op(B) + beta * C, op(A) is m x k.
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, float alpha,
          const float* a, std::size_t lda, const float* b, std::size_t ldb, float beta, float* c,
          std::size_t ldc);
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, double alpha,
          const double* a, std::size_t lda, const double* b, std::size_t ldb, double beta,
          double* c, std::size_t ldc);

// Pins the BLAS backend to one thread so reductions run in a fixed order.
void configure_blas_threads(int threads = 1);

}  // namespace pcgnet::nn
