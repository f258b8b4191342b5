// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcgnet/metrics.hpp"
#include "pcgnet/nn/checkpoint.hpp"
#include "pcgnet/splits.hpp"
#include "pcgnet/trainer.hpp"

namespace pcgnet {

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;
using LogFn = std::function<void(std::string_view)>;

struct StudyOptions {
  std::size_t folds = 10;
  SplitRatios ratios;
  TrainConfig train;
  unsigned jobs = 1;  // folds trained concurrently
  LogFn log;          // may be called from worker threads, serialized internally
};

struct TransferConfig {
  std::vector<std::string> frozen = {"conv1", "conv2", "conv3"};
  double learning_rate = 1e-4;
  std::size_t epochs = 110;
};

struct FoldOutcome {
  std::size_t fold = 0;
  std::size_t n_train = 0, n_valid = 0, n_test = 0;
  // Test-set scores of the best-validation checkpoint (headline) and of the
  // final-epoch checkpoint.
  ConfusionMatrix best_cm, final_cm;
  MetricsReport best_metrics, final_metrics;
  double final_train_accuracy = 0.0;  // training-mode accuracy of the last epoch
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> history;
  nn::Checkpoint best_checkpoint, final_checkpoint;
};

struct VariantResult {
  std::string preset;
  nn::ModelConfig config;
  std::vector<FoldOutcome> folds;
  AggregateReport best;
  AggregateReport final;
  double mean_train_accuracy = 0.0;
  double train_test_gap = 0.0;  // mean train accuracy - mean best test accuracy
  bool overfitting = false;
};

inline constexpr double kOverfitGap = 0.15;

struct StudyResult {
  std::string study;  // "study1", "study2", "study3", ...
  ConfigEcho config;
  std::vector<VariantResult> variants;
};

// Trains `config` on every fold of a stratified split plan and scores each
// fold's test set. With `init`, every fold starts from that checkpoint and
// the `frozen` layers stay fixed.
VariantResult run_kfold(const std::string& preset_name, const nn::ModelConfig& config,
                        std::span<const SpectrogramImage> images, const StudyOptions& opts,
                        const nn::Checkpoint* init = nullptr,
                        std::span<const std::string> frozen = {});

// EXP1..EXP7 on the PhysioNet spectrograms.
StudyResult run_study1(std::span<const SpectrogramImage> images, const StudyOptions& opts,
                       std::span<const std::string> presets = {});

// BEST on the combined PhysioNet + PASCAL spectrograms.
StudyResult run_study2(std::span<const SpectrogramImage> images, const StudyOptions& opts);

// Fine-tunes a BEST checkpoint on PASCAL. `opts.train.learning_rate` and
// `opts.train.epochs` are replaced by the transfer settings.
StudyResult run_study3_transfer(std::span<const SpectrogramImage> images,
                                const nn::Checkpoint& source, const TransferConfig& tcfg,
                                StudyOptions opts);

struct EvaluationResult {
  ConfusionMatrix cm;
  MetricsReport metrics;
  std::vector<double> probabilities;
};

EvaluationResult evaluate_checkpoint(const nn::Checkpoint& ckpt,
                                     std::span<const SpectrogramImage> images,
                                     double threshold = kDefaultThreshold);

// Reference accuracies each study is compared against.
struct ReferenceTarget {
  std::string variant;
  Metric metric;
  double value;
};
std::vector<ReferenceTarget> reference_targets(std::string_view study);

inline constexpr double kReproductionTolerance = 0.03;

ConfigEcho echo_train_config(const TrainConfig& tc);
std::string join(std::span<const std::string> items, std::string_view sep = ",");

void write_study_report(std::ostream& os, const StudyResult& result);
// Per-fold test metrics of one variant: fold,tp,fp,tn,fn,accuracy,...
void write_metrics_csv(std::ostream& os, const VariantResult& variant);
// One row of mean test metrics per variant.
void write_summary_csv(std::ostream& os, const StudyResult& result);
void write_epoch_csv(std::ostream& os, const VariantResult& variant);

// report.txt, summary.csv and, per variant, metrics_<preset>.csv,
// epochs_<preset>.csv and best_<preset>.pcgm (fold 0's best-validation
// checkpoint) under `dir`.
void write_study_outputs(const std::filesystem::path& dir, const StudyResult& result);

}  // namespace pcgnet
