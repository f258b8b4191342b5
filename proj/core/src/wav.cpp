// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pcgnet/detail/binary_io.hpp"
#include "pcgnet/errors.hpp"
#include "pcgnet/signal_io.hpp"

namespace pcgnet {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
  std::uint16_t sub_format = 0;
};

}  // namespace

AudioRecording decode_wav(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorCode::MalformedContainer);
  if (bytes.size() < 12 || !r.expect_tag("RIFF")) {
    fail(ErrorCode::MalformedContainer, "missing RIFF header");
  }
  r.get<std::uint32_t>();  // riff size, often wrong in the wild
  if (!r.expect_tag("WAVE")) fail(ErrorCode::MalformedContainer, "missing WAVE tag");

  std::optional<FmtChunk> fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  while (r.remaining() >= 8) {
    char id[4];
    for (char& c : id) c = static_cast<char>(r.get<std::uint8_t>());
    const auto size = r.get<std::uint32_t>();
    const std::size_t start = r.position();
    const std::size_t avail = std::min<std::size_t>(size, r.remaining());

    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) fail(ErrorCode::MalformedContainer, "fmt chunk too small");
      FmtChunk f;
      f.format = r.get<std::uint16_t>();
      f.channels = r.get<std::uint16_t>();
      f.sample_rate = r.get<std::uint32_t>();
      r.get<std::uint32_t>();  // byte rate
      f.block_align = r.get<std::uint16_t>();
      f.bits = r.get<std::uint16_t>();
      if (f.format == kFormatExtensible && size >= 40) {
        r.get<std::uint16_t>();  // cbSize
        r.get<std::uint16_t>();  // valid bits
        r.get<std::uint32_t>();  // channel mask
        f.sub_format = r.get<std::uint16_t>();
      }
      fmt = f;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.subspan(start, avail);
      have_data = true;
    }
    const std::size_t skip = avail + (avail % 2);
    const std::size_t consumed = r.position() - start;
    if (skip > consumed) {
      r.skip(std::min(skip - consumed, r.remaining()));
    }
    if (have_data && fmt) break;
  }

  if (!fmt) fail(ErrorCode::MalformedContainer, "no fmt chunk");
  if (!have_data) fail(ErrorCode::MalformedContainer, "no data chunk");

  const bool pcm = fmt->format == kFormatPcm ||
                   (fmt->format == kFormatExtensible && fmt->sub_format == kFormatPcm);
  if (!pcm) fail(ErrorCode::UnsupportedFormat, "not PCM (format " + std::to_string(fmt->format) + ")");
  if (fmt->bits != 16) {
    fail(ErrorCode::UnsupportedFormat, "bit depth " + std::to_string(fmt->bits) + " (need 16)");
  }
  if (fmt->channels != 1) {
    fail(ErrorCode::UnsupportedFormat, std::to_string(fmt->channels) + " channels (need mono)");
  }
  if (fmt->sample_rate == 0) fail(ErrorCode::MalformedContainer, "zero sample rate");

  AudioRecording rec;
  rec.sample_rate = static_cast<int>(fmt->sample_rate);
  const std::size_t frames = data.size() / 2;
  rec.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    std::int16_t v;
    std::memcpy(&v, data.data() + 2 * i, 2);
    rec.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return rec;
}

AudioRecording load_wav(const std::filesystem::path& path) {
  auto rec = decode_wav(detail::read_file(path.string()));
  rec.source_id = path.stem().string();
  return rec;
}

std::vector<std::uint8_t> encode_wav(std::span<const double> samples, int sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  detail::ByteWriter w;
  w.tag("RIFF");
  w.put<std::uint32_t>(36 + data_bytes);
  w.tag("WAVE");
  w.tag("fmt ");
  w.put<std::uint32_t>(16);
  w.put<std::uint16_t>(kFormatPcm);
  w.put<std::uint16_t>(1);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sample_rate));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sample_rate) * 2);
  w.put<std::uint16_t>(2);
  w.put<std::uint16_t>(16);
  w.tag("data");
  w.put<std::uint32_t>(data_bytes);
  for (double s : samples) {
    const double scaled = std::nearbyint(s * 32768.0);
    w.put<std::int16_t>(static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0)));
  }
  return std::move(w.data());
}

void write_wav(const std::filesystem::path& path, std::span<const double> samples,
               int sample_rate) {
  detail::write_file(path.string(), encode_wav(samples, sample_rate));
}

}  // namespace pcgnet
