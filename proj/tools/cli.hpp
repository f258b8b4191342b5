// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace pcgnet::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;         // input or configuration error
inline constexpr int kExitDataContract = 3;  // data violated a format or size contract

// Smoke runs: one fold, one epoch, a handful of items per class, and
// spectrograms downscaled so every preset trains in seconds.
inline constexpr int kSmokePerClass = 6;
inline constexpr int kSmokeRows = 35;
inline constexpr int kSmokeCols = 78;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcgnet::cli
