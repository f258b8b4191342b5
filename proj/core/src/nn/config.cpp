// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/nn/config.hpp"

#include <charconv>
#include <sstream>

#include "pcgnet/errors.hpp"

namespace pcgnet::nn {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "identity";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Activation parse_activation(std::string_view s) {
  if (s == "relu") return Activation::Relu;
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "identity" || s == "linear") return Activation::Identity;
  fail(ErrorCode::InvalidConfig, "unknown activation '" + std::string(s) + "'");
}

bool spec_equal(const LayerSpec& a, const LayerSpec& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      overloaded{
          [&](const Conv2DSpec& x) {
            const auto& y = std::get<Conv2DSpec>(b);
            return x.filters == y.filters && x.kh == y.kh && x.kw == y.kw &&
                   x.activation == y.activation;
          },
          [&](const MaxPoolSpec& x) {
            const auto& y = std::get<MaxPoolSpec>(b);
            return x.ph == y.ph && x.pw == y.pw;
          },
          [&](const DropoutSpec& x) { return x.rate == std::get<DropoutSpec>(b).rate; },
          [&](const FlattenSpec&) { return true; },
          [&](const DenseSpec& x) {
            const auto& y = std::get<DenseSpec>(b);
            return x.units == y.units && x.activation == y.activation;
          },
      },
      a);
}

std::size_t parse_size(std::string_view s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    fail(ErrorCode::InvalidConfig, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidConfig, "bad number '" + std::string(s) + "'");
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

bool ModelConfig::operator==(const ModelConfig& other) const {
  if (!(input == other.input) || layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!spec_equal(layers[i], other.layers[i])) return false;
  }
  return true;
}

std::vector<Shape3> propagate_shapes(const ModelConfig& config) {
  if (config.input.size() == 0) fail(ErrorCode::InvalidConfig, "empty input shape");
  if (config.layers.empty()) fail(ErrorCode::InvalidConfig, "model has no layers");
  std::vector<Shape3> shapes;
  Shape3 s = config.input;
  bool flat = false;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    const std::string where = "layer " + std::to_string(i + 1) + ": ";
    std::visit(
        overloaded{
            [&](const Conv2DSpec& c) {
              if (flat) fail(ErrorCode::InvalidConfig, where + "conv after flatten");
              if (c.filters == 0 || c.kh == 0 || c.kw == 0) {
                fail(ErrorCode::InvalidConfig, where + "conv filters/kernel must be >= 1");
              }
              s.c = c.filters;
            },
            [&](const MaxPoolSpec& p) {
              if (flat) fail(ErrorCode::InvalidConfig, where + "pool after flatten");
              if (p.ph == 0 || p.pw == 0) fail(ErrorCode::InvalidConfig, where + "pool dims must be >= 1");
              s.h /= p.ph;
              s.w /= p.pw;
            },
            [&](const DropoutSpec& d) {
              if (!(d.rate >= 0.0 && d.rate < 1.0)) {
                fail(ErrorCode::InvalidConfig, where + "dropout rate must be in [0, 1)");
              }
            },
            [&](const FlattenSpec&) {
              s = {1, 1, s.size()};
              flat = true;
            },
            [&](const DenseSpec& d) {
              if (!flat) fail(ErrorCode::InvalidConfig, where + "dense before flatten");
              if (d.units == 0) fail(ErrorCode::InvalidConfig, where + "dense units must be >= 1");
              s = {1, 1, d.units};
            },
        },
        config.layers[i]);
    if (s.size() == 0) fail(ErrorCode::InvalidConfig, where + "a dimension reached zero");
    shapes.push_back(s);
  }
  const auto* head = std::get_if<DenseSpec>(&config.layers.back());
  if (!head || head->units != 1 || head->activation != Activation::Sigmoid) {
    fail(ErrorCode::InvalidConfig, "final layer must be dense(1,sigmoid)");
  }
  return shapes;
}

std::vector<std::string> layer_names(const ModelConfig& config) {
  std::size_t conv = 0, pool = 0, drop = 0, flat = 0, dense = 0;
  std::vector<std::string> out;
  for (const auto& l : config.layers) {
    out.push_back(std::visit(
        overloaded{
            [&](const Conv2DSpec&) { return "conv" + std::to_string(++conv); },
            [&](const MaxPoolSpec&) { return "pool" + std::to_string(++pool); },
            [&](const DropoutSpec&) { return "drop" + std::to_string(++drop); },
            [&](const FlattenSpec&) { return "flatten" + std::to_string(++flat); },
            [&](const DenseSpec&) { return "dense" + std::to_string(++dense); },
        },
        l));
  }
  return out;
}

std::string to_string(const ModelConfig& config) {
  std::ostringstream os;
  os.precision(17);
  os << "name=" << config.name << " input=" << config.input.c << 'x' << config.input.h << 'x'
     << config.input.w;
  for (const auto& l : config.layers) {
    os << ' ';
    std::visit(overloaded{
                   [&](const Conv2DSpec& c) {
                     os << "conv(" << c.filters << ',' << c.kh << ',' << c.kw << ','
                        << to_string(c.activation) << ')';
                   },
                   [&](const MaxPoolSpec& p) { os << "pool(" << p.ph << ',' << p.pw << ')'; },
                   [&](const DropoutSpec& d) { os << "dropout(" << d.rate << ')'; },
                   [&](const FlattenSpec&) { os << "flatten"; },
                   [&](const DenseSpec& d) {
                     os << "dense(" << d.units << ',' << to_string(d.activation) << ')';
                   },
               },
               l);
  }
  return os.str();
}

ModelConfig parse_model_config(std::string_view text) {
  ModelConfig cfg;
  cfg.layers.clear();
  std::istringstream is{std::string(text)};
  std::string tok;
  while (is >> tok) {
    const std::string_view t = tok;
    if (t.rfind("name=", 0) == 0) {
      cfg.name = tok.substr(5);
      continue;
    }
    if (t.rfind("input=", 0) == 0) {
      const auto dims = split(t.substr(6), 'x');
      if (dims.size() != 3) fail(ErrorCode::InvalidConfig, "input must be CxHxW");
      cfg.input = {parse_size(dims[0]), parse_size(dims[1]), parse_size(dims[2])};
      continue;
    }
    if (t == "flatten") {
      cfg.layers.emplace_back(FlattenSpec{});
      continue;
    }
    const auto open = t.find('(');
    if (open == std::string_view::npos || t.back() != ')') {
      fail(ErrorCode::InvalidConfig, "bad layer token '" + tok + "'");
    }
    const auto kind = t.substr(0, open);
    const auto args = split(t.substr(open + 1, t.size() - open - 2), ',');
    if (kind == "conv" && (args.size() == 3 || args.size() == 4)) {
      cfg.layers.emplace_back(Conv2DSpec{parse_size(args[0]), parse_size(args[1]), parse_size(args[2]),
                                         args.size() == 4 ? parse_activation(args[3]) : Activation::Relu});
    } else if (kind == "pool" && args.size() == 2) {
      cfg.layers.emplace_back(MaxPoolSpec{parse_size(args[0]), parse_size(args[1])});
    } else if (kind == "dropout" && args.size() == 1) {
      cfg.layers.emplace_back(DropoutSpec{parse_double(args[0])});
    } else if (kind == "dense" && args.size() == 2) {
      cfg.layers.emplace_back(DenseSpec{parse_size(args[0]), parse_activation(args[1])});
    } else {
      fail(ErrorCode::InvalidConfig, "bad layer token '" + tok + "'");
    }
  }
  propagate_shapes(cfg);
  return cfg;
}

std::vector<std::string> study1_presets() {
  return {"EXP1", "EXP2", "EXP3", "EXP4", "EXP5", "EXP6", "EXP7"};
}

std::vector<std::string> preset_names() {
  auto names = study1_presets();
  names.emplace_back("BEST");
  return names;
}

ModelConfig preset(std::string_view name, Shape3 input) {
  struct Block {
    std::size_t filters, k, pool;  // pool 0 = none
  };
  std::vector<Block> blocks;
  if (name == "EXP1") blocks = {{128, 3, 3}, {256, 3, 3}, {512, 3, 3}};
  else if (name == "EXP2") blocks = {{128, 3, 3}, {512, 3, 3}, {128, 3, 3}};
  else if (name == "EXP3") blocks = {{128, 3, 2}, {256, 3, 2}, {128, 3, 2}};
  else if (name == "EXP4") blocks = {{128, 3, 2}, {256, 3, 2}, {128, 3, 0}, {64, 3, 0}};
  else if (name == "EXP5") blocks = {{96, 11, 3}, {256, 5, 0}, {384, 3, 0}, {384, 3, 0}, {256, 3, 3}};
  else if (name == "EXP6") blocks = {{96, 11, 3}, {256, 5, 3}, {384, 3, 0}, {384, 3, 0}, {256, 3, 3}};
  else if (name == "EXP7") {
    blocks = {{16, 3, 3}, {32, 2, 3}, {64, 2, 0}, {128, 2, 0}, {256, 2, 3}, {256, 2, 0}};
  } else if (name != "BEST") {
    fail(ErrorCode::InvalidConfig, "unknown preset '" + std::string(name) + "'");
  }

  ModelConfig cfg;
  cfg.name = std::string(name);
  cfg.input = input;
  if (name == "BEST") {
    for (std::size_t f : {128, 256, 128, 64}) {
      cfg.layers.emplace_back(Conv2DSpec{f, 3, 3, Activation::Relu});
      cfg.layers.emplace_back(MaxPoolSpec{2, 2});
      cfg.layers.emplace_back(DropoutSpec{0.25});
    }
  } else {
    for (const auto& b : blocks) {
      cfg.layers.emplace_back(Conv2DSpec{b.filters, b.k, b.k, Activation::Relu});
      if (b.pool) cfg.layers.emplace_back(MaxPoolSpec{b.pool, b.pool});
    }
  }
  cfg.layers.emplace_back(FlattenSpec{});
  cfg.layers.emplace_back(DropoutSpec{0.5});
  cfg.layers.emplace_back(DenseSpec{1, Activation::Sigmoid});
  return cfg;
}

}  // namespace pcgnet::nn
