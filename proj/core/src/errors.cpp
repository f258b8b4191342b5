// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/errors.hpp"

namespace pcgnet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::MissingLabelFile: return "MissingLabelFile";
    case ErrorCode::UnlabeledRecording: return "UnlabeledRecording";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::SegmentTooShort: return "SegmentTooShort";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::RecordingTooShort: return "RecordingTooShort";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace pcgnet
