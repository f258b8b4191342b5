// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "pcgnet/dsp.hpp"
#include "pcgnet/nn/model.hpp"
#include "pcgnet/rng.hpp"
#include "pcgnet/signal_io.hpp"
#include "pcgnet/spectrogram.hpp"

namespace {

pcgnet::Segment random_segment() {
  pcgnet::Rng rng(7);
  pcgnet::Segment s;
  s.samples.resize(pcgnet::kSegmentLength);
  for (auto& v : s.samples) v = rng.uniform(-1.0, 1.0);
  return s;
}

void BM_Resample4000To2000(benchmark::State& state) {
  pcgnet::AudioRecording rec;
  rec.sample_rate = 4000;
  rec.samples = random_segment().samples;
  rec.samples.resize(4 * pcgnet::kSegmentLength / 2 * 2);
  for (auto _ : state) benchmark::DoNotOptimize(pcgnet::resample(rec, 2000));
}
BENCHMARK(BM_Resample4000To2000)->Unit(benchmark::kMillisecond);

void BM_BandpassSegment(benchmark::State& state) {
  const auto f = pcgnet::design_bandpass();
  const auto seg = random_segment();
  for (auto _ : state) benchmark::DoNotOptimize(f.filter(seg.samples));
}
BENCHMARK(BM_BandpassSegment)->Unit(benchmark::kMicrosecond);

void BM_Spectrogram(benchmark::State& state) {
  const pcgnet::StftAnalyzer analyzer;
  const auto seg = random_segment();
  for (auto _ : state) benchmark::DoNotOptimize(pcgnet::make_spectrogram(seg, analyzer));
}
BENCHMARK(BM_Spectrogram)->Unit(benchmark::kMillisecond);

void model_step(benchmark::State& state, const pcgnet::nn::ModelConfig& cfg, bool backward) {
  pcgnet::nn::Model<float> model(cfg, 1);
  auto ws = model.make_workspace();
  auto grads = model.make_gradients();
  pcgnet::Rng rng(3);
  pcgnet::nn::Tensor x({cfg.input.c, cfg.input.h, cfg.input.w});
  for (auto& v : x.data()) v = static_cast<float>(rng.uniform());
  for (auto _ : state) {
    const float p = model.forward(x, backward ? pcgnet::nn::Mode::Train : pcgnet::nn::Mode::Infer,
                                  ws, &rng);
    if (backward) model.backward_logit(ws, p - 1.0f, grads);
    benchmark::DoNotOptimize(p);
  }
}

void BM_BestForward(benchmark::State& state) { model_step(state, pcgnet::nn::preset("BEST"), false); }
BENCHMARK(BM_BestForward)->Unit(benchmark::kMillisecond);

void BM_BestTrainStep(benchmark::State& state) { model_step(state, pcgnet::nn::preset("BEST"), true); }
BENCHMARK(BM_BestTrainStep)->Unit(benchmark::kMillisecond);

void BM_Exp5Forward(benchmark::State& state) { model_step(state, pcgnet::nn::preset("EXP5"), false); }
BENCHMARK(BM_Exp5Forward)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
