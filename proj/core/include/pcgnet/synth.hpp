// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "pcgnet/recording.hpp"
#include "pcgnet/rng.hpp"
#include "pcgnet/signal_io.hpp"

namespace pcgnet {

// Synthetic heart-sound generator for tests and demos.
//
// Every recording is a train of S1/S2 tone bursts at a random 60-100 bpm over
// low background noise. Abnormal recordings add band-limited 150-350 Hz noise
// filling the systolic interval between S1 and S2.
struct SynthOptions {
  double duration_seconds = 8.5;
  int sample_rate = 4000;
  double noise_level = 0.01;
  double murmur_level = 0.15;
};

AudioRecording synth_recording(Label label, Rng& rng, const SynthOptions& opts = {});

// `per_class` normal then `per_class` abnormal recordings, ids "synth_<n>".
std::vector<AudioRecording> synth_corpus(std::size_t per_class, std::uint64_t seed,
                                         const SynthOptions& opts = {});

// Writes a corpus as 16-bit WAVs plus a REFERENCE.csv in the PhysioNet layout
// and returns the matching manifest.
DatasetManifest write_synth_corpus(const std::filesystem::path& dir, std::size_t per_class,
                                   std::uint64_t seed, const SynthOptions& opts = {});

}  // namespace pcgnet
