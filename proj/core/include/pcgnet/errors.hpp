// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcgnet {

enum class ErrorCode {
  MalformedContainer,
  UnsupportedFormat,
  MissingLabelFile,
  UnlabeledRecording,
  InvalidBand,
  RateMismatch,
  SegmentTooShort,
  CacheCorrupt,
  ShapeMismatch,
  InvalidConfig,
  DivergedLoss,
  TooFewSamples,
  ConfigMismatch,
  LengthMismatch,
  EmptyInput,
  RecordingTooShort,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace pcgnet
