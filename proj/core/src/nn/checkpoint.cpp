// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/nn/checkpoint.hpp"

#include <zlib.h>

#include <cstring>

#include "pcgnet/detail/binary_io.hpp"

namespace pcgnet::nn {
namespace {

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

template <typename T>
std::vector<float> to_floats(std::span<const T> v) {
  return {v.begin(), v.end()};
}

}  // namespace

bool Checkpoint::same_parameters(const Checkpoint& other) const {
  if (tensors.size() != other.tensors.size()) return false;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& a = tensors[i].values;
    const auto& b = other.tensors[i].values;
    if (tensors[i].shape != other.tensors[i].shape || a.size() != b.size()) return false;
    if (std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) != 0) return false;
  }
  return true;
}

template <typename T>
Checkpoint to_checkpoint(const Model<T>& model, const AdamState<T>* adam) {
  Checkpoint c;
  c.config = model.config();
  for (std::size_t i = 0; i < model.param_count(); ++i) {
    const auto& p = model.param(i);
    c.tensors.push_back({model.param_name(i), p.shape(), to_floats<T>(p.data()), model.trainable(i)});
  }
  if (adam) {
    AdamSnapshot s;
    s.hyper = adam->hyper;
    s.step = adam->step;
    for (std::size_t i = 0; i < adam->m.size(); ++i) {
      s.m.push_back(to_floats<T>(adam->m[i].data()));
      s.v.push_back(to_floats<T>(adam->v[i].data()));
    }
    c.adam = std::move(s);
  }
  return c;
}

template <typename T>
void load_parameters(Model<T>& model, const Checkpoint& ckpt) {
  if (!(ckpt.config == model.config())) {
    fail(ErrorCode::ConfigMismatch, "checkpoint config '" + to_string(ckpt.config) +
                                        "' does not match model '" + to_string(model.config()) + "'");
  }
  if (ckpt.tensors.size() != model.param_count()) {
    fail(ErrorCode::ConfigMismatch, "checkpoint tensor count differs from model");
  }
  for (std::size_t i = 0; i < model.param_count(); ++i) {
    const auto& t = ckpt.tensors[i];
    auto& p = model.param(i);
    if (t.shape != p.shape() || t.name != model.param_name(i)) {
      fail(ErrorCode::ConfigMismatch, "tensor " + t.name + " does not match " + model.param_name(i));
    }
    auto dst = p.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = static_cast<T>(t.values[k]);
    model.set_trainable(i, t.trainable);
  }
}

template <typename T>
Model<T> model_from_checkpoint(const Checkpoint& ckpt) {
  auto model = Model<T>::zeros(ckpt.config);
  load_parameters(model, ckpt);
  return model;
}

template <typename T>
AdamState<T> adam_from_checkpoint(const Model<T>& model, const Checkpoint& ckpt) {
  auto state = make_adam(model);
  if (!ckpt.adam) return state;
  state.hyper = ckpt.adam->hyper;
  state.step = ckpt.adam->step;
  for (std::size_t i = 0; i < state.m.size() && i < ckpt.adam->m.size(); ++i) {
    std::copy(ckpt.adam->m[i].begin(), ckpt.adam->m[i].end(), state.m[i].data().begin());
    std::copy(ckpt.adam->v[i].begin(), ckpt.adam->v[i].end(), state.v[i].data().begin());
  }
  return state;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  detail::ByteWriter w;
  w.tag("PCGM");
  w.put<std::uint32_t>(kCheckpointVersion);
  w.string(to_string(ckpt.config));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    w.string(t.name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
    w.floats(t.values);
  }
  for (const auto& t : ckpt.tensors) w.put<std::uint8_t>(t.trainable ? 1 : 0);
  w.put<std::uint8_t>(ckpt.adam ? 1 : 0);
  if (ckpt.adam) {
    const auto& a = *ckpt.adam;
    w.put<std::uint64_t>(a.step);
    w.put<double>(a.hyper.learning_rate);
    w.put<double>(a.hyper.beta1);
    w.put<double>(a.hyper.beta2);
    w.put<double>(a.hyper.epsilon);
    for (const auto& m : a.m) w.floats(m);
    for (const auto& v : a.v) w.floats(v);
  }
  w.put<std::uint32_t>(crc_of(w.data()));
  return std::move(w.data());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) fail(ErrorCode::CacheCorrupt, "checkpoint truncated");
  const auto body = bytes.first(bytes.size() - 4);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), 4);
  detail::ByteReader r(body, ErrorCode::CacheCorrupt);
  if (!r.expect_tag("PCGM")) fail(ErrorCode::CacheCorrupt, "bad checkpoint magic");
  if (stored != crc_of(body)) fail(ErrorCode::CacheCorrupt, "checkpoint CRC mismatch");
  if (r.get<std::uint32_t>() != kCheckpointVersion) fail(ErrorCode::CacheCorrupt, "unsupported checkpoint version");

  Checkpoint c;
  try {
    c.config = parse_model_config(r.string());
  } catch (const Error& e) {
    fail(ErrorCode::CacheCorrupt, std::string("bad config in checkpoint: ") + e.what());
  }
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    NamedTensor t;
    t.name = r.string();
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) fail(ErrorCode::CacheCorrupt, "implausible tensor rank");
    for (std::uint32_t d = 0; d < rank; ++d) t.shape.push_back(r.get<std::uint32_t>());
    const std::size_t count = BasicTensor<float>::element_count(t.shape);
    if (count * sizeof(float) > r.remaining()) fail(ErrorCode::CacheCorrupt, "tensor overruns file");
    t.values.resize(count);
    r.floats(t.values);
    c.tensors.push_back(std::move(t));
  }
  for (auto& t : c.tensors) t.trainable = r.get<std::uint8_t>() != 0;
  if (r.get<std::uint8_t>() != 0) {
    AdamSnapshot a;
    a.step = r.get<std::uint64_t>();
    a.hyper.learning_rate = r.get<double>();
    a.hyper.beta1 = r.get<double>();
    a.hyper.beta2 = r.get<double>();
    a.hyper.epsilon = r.get<double>();
    for (int pass = 0; pass < 2; ++pass) {
      auto& dst = pass == 0 ? a.m : a.v;
      for (const auto& t : c.tensors) {
        std::vector<float> buf(t.values.size());
        r.floats(buf);
        dst.push_back(std::move(buf));
      }
    }
    c.adam = std::move(a);
  }
  if (r.remaining() != 0) fail(ErrorCode::CacheCorrupt, "trailing bytes in checkpoint");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  detail::write_file(path.string(), encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_file(path.string()));
}

template Checkpoint to_checkpoint(const Model<float>&, const AdamState<float>*);
template Checkpoint to_checkpoint(const Model<double>&, const AdamState<double>*);
template void load_parameters(Model<float>&, const Checkpoint&);
template void load_parameters(Model<double>&, const Checkpoint&);
template Model<float> model_from_checkpoint(const Checkpoint&);
template Model<double> model_from_checkpoint(const Checkpoint&);
template AdamState<float> adam_from_checkpoint(const Model<float>&, const Checkpoint&);
template AdamState<double> adam_from_checkpoint(const Model<double>&, const Checkpoint&);

}  // namespace pcgnet::nn
