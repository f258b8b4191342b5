// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcgnet/errors.hpp"
#include "pcgnet/rng.hpp"

namespace pcgnet {

std::array<std::size_t, 3> class_allocation(std::size_t n, const SplitRatios& r) {
  const std::array<double, 3> ratios = {r.train, r.valid, r.test};
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (!(total > 0.0) || ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0) {
    fail(ErrorCode::InvalidConfig, "split ratios must be non-negative with a positive sum");
  }
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double quota = static_cast<double>(n) * ratios[i] / total;
    // Guard against 0.15 * 120 = 17.999999999999996.
    const double fl = std::floor(quota + 1e-9);
    sizes[i] = static_cast<std::size_t>(fl);
    remainder[i] = quota - fl;
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

SplitPlan make_splits(std::span<const Label> labels, std::size_t folds, std::uint64_t seed,
                      SplitRatios ratios) {
  if (folds == 0) fail(ErrorCode::InvalidConfig, "need at least one fold");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[encode(labels[i])].push_back(i);
  for (const auto& c : by_class) {
    if (c.size() < folds) {
      fail(ErrorCode::TooFewSamples, "each class needs at least " + std::to_string(folds) +
                                         " items, got " + std::to_string(c.size()));
    }
  }

  SplitPlan plan;
  plan.ratios = ratios;
  plan.folds = folds;
  plan.seed = seed;
  for (std::size_t f = 0; f < folds; ++f) {
    Rng rng(derive_seed(seed, f));
    FoldSplit split;
    for (const auto& members : by_class) {
      std::vector<std::size_t> shuffled = members;
      rng.shuffle(std::span<std::size_t>(shuffled));
      const auto [n_train, n_valid, n_test] = class_allocation(shuffled.size(), ratios);
      auto it = shuffled.begin();
      split.train.insert(split.train.end(), it, it + static_cast<std::ptrdiff_t>(n_train));
      it += static_cast<std::ptrdiff_t>(n_train);
      split.valid.insert(split.valid.end(), it, it + static_cast<std::ptrdiff_t>(n_valid));
      it += static_cast<std::ptrdiff_t>(n_valid);
      split.test.insert(split.test.end(), it, it + static_cast<std::ptrdiff_t>(n_test));
    }
    plan.per_fold.push_back(std::move(split));
  }
  return plan;
}

}  // namespace pcgnet
