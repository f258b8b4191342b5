// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pcgnet/recording.hpp"

namespace pcgnet {

// ---- WAV ------------------------------------------------------------------

// Reads a RIFF/WAVE file holding 16-bit mono PCM. Samples are raw / 32768.
AudioRecording load_wav(const std::filesystem::path& path);
AudioRecording decode_wav(std::span<const std::uint8_t> bytes);

// Writes 16-bit mono PCM; samples are scaled by 32768 and clamped to int16.
void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               int sample_rate);
std::vector<std::uint8_t> encode_wav(std::span<const double> samples, int sample_rate);

// ---- Resampling -------------------------------------------------------------

struct ResamplerOptions {
  double kaiser_beta = 8.6;
  int zero_crossings = 64;
};

// Rational-ratio resampler: conceptually upsample by p, Kaiser-windowed sinc
// low-pass at min(source, target)/2, downsample by q, evaluated polyphase.
class RationalResampler {
 public:
  RationalResampler(int source_rate, int target_rate, ResamplerOptions opts = {});

  int up() const noexcept { return up_; }
  int down() const noexcept { return down_; }
  std::size_t output_length(std::size_t input_length) const noexcept;
  std::vector<double> process(std::span<const double> input) const;

 private:
  int up_ = 1;
  int down_ = 1;
  // Taps of phase r are stored at r * taps_per_phase_; tap j multiplies
  // x[base - half_ + j].
  std::vector<double> table_;
  std::size_t taps_per_phase_ = 0;
  long half_ = 0;
};

AudioRecording resample(const AudioRecording& rec, int target_rate = kCanonicalRate);

// ---- Manifests --------------------------------------------------------------

enum class DatasetKind { PhysioNet, Pascal };

struct ManifestEntry {
  std::filesystem::path path;
  Label label = Label::Normal;
  DatasetTag dataset = DatasetTag::PhysioNet;
  std::string source_id;
};

class DatasetManifest {
 public:
  // Throws InvalidConfig on a duplicate path.
  void add(ManifestEntry entry);

  const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t count(Label l) const noexcept { return l == Label::Normal ? normal_ : abnormal_; }

  void append(const DatasetManifest& other);

 private:
  std::vector<ManifestEntry> entries_;
  std::set<std::filesystem::path> paths_;
  std::size_t normal_ = 0;
  std::size_t abnormal_ = 0;
};

DatasetManifest build_manifest(std::span<const std::filesystem::path> roots, DatasetKind kind);
DatasetManifest build_manifest(const std::filesystem::path& root, DatasetKind kind);

// CSV with header `path,label,dataset,source_id`; label is 0/1.
void write_manifest_csv(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest_csv(const std::filesystem::path& path);

}  // namespace pcgnet
