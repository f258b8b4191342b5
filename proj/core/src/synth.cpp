// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "pcgnet/errors.hpp"

namespace pcgnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void add_burst(std::vector<double>& x, int fs, double start, double length, double freq,
               double amp, double phase) {
  const auto n0 = static_cast<std::ptrdiff_t>(start * fs);
  const auto n = static_cast<std::ptrdiff_t>(length * fs);
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = n0 + k;
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(x.size())) continue;
    const double env = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    x[static_cast<std::size_t>(i)] += amp * env * std::sin(kTwoPi * freq * k / fs + phase);
  }
}

// Sum of random-phase sinusoids spread over [lo, hi] Hz, tapered at both ends.
void add_band_noise(std::vector<double>& x, int fs, double start, double length, double lo,
                    double hi, double amp, Rng& rng) {
  constexpr int kComponents = 24;
  const auto n0 = static_cast<std::ptrdiff_t>(start * fs);
  const auto n = static_cast<std::ptrdiff_t>(length * fs);
  std::vector<double> freq(kComponents), phase(kComponents);
  for (int c = 0; c < kComponents; ++c) {
    freq[c] = rng.uniform(lo, hi);
    phase[c] = rng.uniform(0.0, kTwoPi);
  }
  const double norm = amp / std::sqrt(kComponents / 2.0);
  const std::ptrdiff_t ramp = std::max<std::ptrdiff_t>(1, n / 10);
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = n0 + k;
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(x.size())) continue;
    double v = 0.0;
    for (int c = 0; c < kComponents; ++c) v += std::sin(kTwoPi * freq[c] * k / fs + phase[c]);
    const double taper = std::min({1.0, static_cast<double>(k) / ramp,
                                   static_cast<double>(n - 1 - k) / ramp});
    x[static_cast<std::size_t>(i)] += norm * taper * v;
  }
}

}  // namespace

AudioRecording synth_recording(Label label, Rng& rng, const SynthOptions& opts) {
  if (opts.sample_rate <= 0 || opts.duration_seconds <= 0.0) {
    fail(ErrorCode::InvalidConfig, "synthetic recording needs a positive rate and duration");
  }
  const int fs = opts.sample_rate;
  const auto n = static_cast<std::size_t>(opts.duration_seconds * fs);
  std::vector<double> x(n);
  for (auto& v : x) v = opts.noise_level * rng.normal();

  const double bpm = rng.uniform(60.0, 100.0);
  const double period = 60.0 / bpm;
  const double systole = rng.uniform(0.28, 0.34) * period;
  const double s1_freq = rng.uniform(40.0, 70.0);
  const double s2_freq = rng.uniform(60.0, 100.0);
  constexpr double kS1 = 0.10, kS2 = 0.08;  // burst lengths, seconds
  for (double t = rng.uniform(0.0, period); t < opts.duration_seconds; t += period) {
    add_burst(x, fs, t, kS1, s1_freq, rng.uniform(0.4, 0.6), rng.uniform(0.0, kTwoPi));
    add_burst(x, fs, t + systole, kS2, s2_freq, rng.uniform(0.3, 0.5), rng.uniform(0.0, kTwoPi));
    if (label == Label::Abnormal) {
      add_band_noise(x, fs, t + kS1, systole - kS1, 150.0, 350.0, opts.murmur_level, rng);
    }
  }
  // Beats starting before t = 0 are never generated; that is fine for a
  // stationary signal.
  for (auto& v : x) v = std::clamp(v, -1.0, 1.0);

  AudioRecording rec;
  rec.samples = std::move(x);
  rec.sample_rate = fs;
  rec.label = label;
  return rec;
}

std::vector<AudioRecording> synth_corpus(std::size_t per_class, std::uint64_t seed,
                                         const SynthOptions& opts) {
  std::vector<AudioRecording> out;
  out.reserve(2 * per_class);
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    Rng rng(derive_seed(seed, i));
    auto rec = synth_recording(i < per_class ? Label::Normal : Label::Abnormal, rng, opts);
    char id[32];
    std::snprintf(id, sizeof id, "synth_%04zu", i);
    rec.source_id = id;
    out.push_back(std::move(rec));
  }
  return out;
}

DatasetManifest write_synth_corpus(const std::filesystem::path& dir, std::size_t per_class,
                                   std::uint64_t seed, const SynthOptions& opts) {
  std::filesystem::create_directories(dir);
  std::ofstream ref(dir / "REFERENCE.csv");
  if (!ref) fail(ErrorCode::Io, "cannot write " + (dir / "REFERENCE.csv").string());
  for (const auto& rec : synth_corpus(per_class, seed, opts)) {
    write_wav(dir / (rec.source_id + ".wav"), rec.samples, rec.sample_rate);
    ref << rec.source_id << "," << (rec.label == Label::Abnormal ? 1 : -1) << "\n";
  }
  ref.close();
  return build_manifest(dir, DatasetKind::PhysioNet);
}

}  // namespace pcgnet
