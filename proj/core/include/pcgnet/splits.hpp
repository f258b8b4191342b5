// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pcgnet/recording.hpp"

namespace pcgnet {

struct SplitRatios {
  double train = 0.75;
  double valid = 0.15;
  double test = 0.10;
};

struct FoldSplit {
  std::vector<std::size_t> train, valid, test;  // indices into the dataset
};

struct SplitPlan {
  SplitRatios ratios;
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  std::vector<FoldSplit> per_fold;
};

// Per-class sizes (train, valid, test) for n items. Largest-remainder
// apportionment of n over the three ratios: every size is within one item
// of its exact share and the three sum to n.
std::array<std::size_t, 3> class_allocation(std::size_t n, const SplitRatios& ratios);

// `folds` independent stratified shuffle splits. Fold f shuffles each class
// with a stream derived from (seed, f). Throws TooFewSamples when a class
// has fewer than `folds` items.
SplitPlan make_splits(std::span<const Label> labels, std::size_t folds = 10, std::uint64_t seed = 42,
                      SplitRatios ratios = {});

}  // namespace pcgnet
