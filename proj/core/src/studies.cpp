// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/studies.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "pcgnet/errors.hpp"
#include "pcgnet/parallel.hpp"
#include "pcgnet/rng.hpp"

namespace pcgnet {

namespace {

std::string fixed(double v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string shape_text(const nn::Shape3& s) {
  return std::to_string(s.c) + "x" + std::to_string(s.h) + "x" + std::to_string(s.w);
}

void check_images(std::span<const SpectrogramImage> images, const nn::Shape3& input) {
  if (images.empty()) fail(ErrorCode::EmptyInput, "no spectrograms");
  for (const auto& img : images) {
    if (input.c != 1 || img.rows != input.h || img.cols != input.w) {
      fail(ErrorCode::ShapeMismatch, "spectrogram " + img.source_id + " is " +
                                         std::to_string(img.rows) + "x" + std::to_string(img.cols) +
                                         ", model expects " + shape_text(input));
    }
  }
}

std::vector<Label> labels_of(std::span<const SpectrogramImage> images) {
  std::vector<Label> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(img.label);
  return out;
}

std::pair<ConfusionMatrix, MetricsReport> score(const nn::Checkpoint& ckpt,
                                                std::span<const SpectrogramImage> images,
                                                std::span<const std::size_t> indices,
                                                double threshold) {
  if (indices.empty()) return {};
  const auto model = nn::model_from_checkpoint<float>(ckpt);
  const auto probs = predict(model, images, indices);
  std::vector<Label> labels;
  for (auto i : indices) labels.push_back(images[i].label);
  const auto cm = confusion(probs, labels, threshold);
  return {cm, compute_metrics(cm)};
}

}  // namespace

std::string join(std::span<const std::string> items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

ConfigEcho echo_train_config(const TrainConfig& tc) {
  std::ostringstream lr;
  lr << tc.learning_rate;
  return {{"epochs", std::to_string(tc.epochs)},
          {"learning_rate", lr.str()},
          {"batch_size", std::to_string(tc.batch_size)},
          {"loss", "binary_cross_entropy"},
          {"optimizer", "adam"},
          {"threshold", fixed(tc.threshold, 2)},
          {"class_weighting", tc.class_weighting ? "on" : "off"},
          {"seed", std::to_string(tc.seed)}};
}

VariantResult run_kfold(const std::string& preset_name, const nn::ModelConfig& config,
                        std::span<const SpectrogramImage> images, const StudyOptions& opts,
                        const nn::Checkpoint* init, std::span<const std::string> frozen) {
  nn::propagate_shapes(config);
  check_images(images, config.input);
  const auto labels = labels_of(images);
  const auto plan = make_splits(labels, opts.folds, opts.train.seed, opts.ratios);

  VariantResult result;
  result.preset = preset_name;
  result.config = config;
  result.folds.resize(plan.per_fold.size());

  std::mutex log_mu;
  auto log = [&](const std::string& msg) {
    if (!opts.log) return;
    std::lock_guard lock(log_mu);
    opts.log(msg);
  };

  parallel_for(plan.per_fold.size(), opts.jobs, [&](std::size_t f) {
    const auto& split = plan.per_fold[f];
    TrainConfig tc = opts.train;
    tc.seed = derive_seed(opts.train.seed, 1000 + f);
    const FoldData data{images, split.train, split.valid};
    auto trained = train_model(config, tc, data, init, frozen, [&](const EpochRecord& r) {
      std::ostringstream os;
      os << preset_name << " fold " << f << " epoch " << r.epoch << "/" << tc.epochs
         << " loss " << fixed(r.train_loss, 4) << " acc " << fixed(r.train_accuracy, 4);
      if (r.valid_accuracy) {
        os << " val_loss " << fixed(*r.valid_loss, 4) << " val_acc " << fixed(*r.valid_accuracy, 4);
      }
      log(os.str());
    });

    FoldOutcome& out = result.folds[f];
    out.fold = f;
    out.n_train = split.train.size();
    out.n_valid = split.valid.size();
    out.n_test = split.test.size();
    std::tie(out.best_cm, out.best_metrics) =
        score(trained.best_checkpoint, images, split.test, opts.train.threshold);
    std::tie(out.final_cm, out.final_metrics) =
        score(trained.final_checkpoint, images, split.test, opts.train.threshold);
    out.final_train_accuracy =
        trained.history.empty() ? 0.0 : trained.history.back().train_accuracy;
    out.best_epoch = trained.best_epoch;
    out.history = std::move(trained.history);
    out.best_checkpoint = std::move(trained.best_checkpoint);
    out.final_checkpoint = std::move(trained.final_checkpoint);
  });

  std::vector<MetricsReport> best, final;
  double train_acc = 0.0;
  for (const auto& f : result.folds) {
    best.push_back(f.best_metrics);
    final.push_back(f.final_metrics);
    train_acc += f.final_train_accuracy;
  }
  result.best = aggregate_folds(best);
  result.final = aggregate_folds(final);
  result.mean_train_accuracy = train_acc / static_cast<double>(result.folds.size());
  const auto test_acc = result.best[Metric::Accuracy].mean;
  result.train_test_gap = result.mean_train_accuracy - test_acc.value_or(0.0);
  result.overfitting = result.train_test_gap > kOverfitGap;
  return result;
}

namespace {

ConfigEcho study_echo(const std::string& study, std::span<const SpectrogramImage> images,
                      const StudyOptions& opts) {
  std::size_t abnormal = 0;
  for (const auto& img : images) abnormal += img.label == Label::Abnormal ? 1 : 0;
  ConfigEcho echo = {{"study", study},
                     {"items", std::to_string(images.size())},
                     {"normal", std::to_string(images.size() - abnormal)},
                     {"abnormal", std::to_string(abnormal)},
                     {"folds", std::to_string(opts.folds)},
                     {"split", fixed(opts.ratios.train, 2) + "/" + fixed(opts.ratios.valid, 2) + "/" +
                                   fixed(opts.ratios.test, 2)},
                     {"model_selection", "best_validation_accuracy"}};
  for (auto& kv : echo_train_config(opts.train)) echo.push_back(std::move(kv));
  return echo;
}

}  // namespace

StudyResult run_study1(std::span<const SpectrogramImage> images, const StudyOptions& opts,
                       std::span<const std::string> presets) {
  const auto defaults = nn::study1_presets();
  if (presets.empty()) presets = defaults;
  const nn::Shape3 input{1, images.empty() ? 0 : images.front().rows,
                         images.empty() ? 0 : images.front().cols};
  StudyResult result{"study1", study_echo("study1", images, opts), {}};
  result.config.emplace_back("presets", join(presets));
  for (const auto& name : presets) {
    result.variants.push_back(run_kfold(name, nn::preset(name, input), images, opts));
  }
  return result;
}

StudyResult run_study2(std::span<const SpectrogramImage> images, const StudyOptions& opts) {
  const nn::Shape3 input{1, images.empty() ? 0 : images.front().rows,
                         images.empty() ? 0 : images.front().cols};
  StudyResult result{"study2", study_echo("study2", images, opts), {}};
  result.config.emplace_back("presets", "BEST");
  result.variants.push_back(run_kfold("BEST", nn::preset("BEST", input), images, opts));
  return result;
}

StudyResult run_study3_transfer(std::span<const SpectrogramImage> images,
                                const nn::Checkpoint& source, const TransferConfig& tcfg,
                                StudyOptions opts) {
  const auto expected = nn::preset("BEST", source.config.input);
  if (!(source.config == expected)) {
    fail(ErrorCode::ConfigMismatch,
         "transfer source is not a BEST model: " + nn::to_string(source.config));
  }
  if (tcfg.epochs > 110) fail(ErrorCode::InvalidConfig, "transfer epochs must not exceed 110");
  opts.train.learning_rate = tcfg.learning_rate;
  opts.train.epochs = tcfg.epochs;
  StudyResult result{"study3", study_echo("study3", images, opts), {}};
  result.config.emplace_back("presets", "BEST");
  result.config.emplace_back("transfer_source", nn::to_string(source.config));
  result.config.emplace_back("frozen_layers", tcfg.frozen.empty() ? "none" : join(tcfg.frozen));
  result.config.emplace_back("head_reinitialized", "no");
  result.variants.push_back(
      run_kfold("BEST", source.config, images, opts, &source, tcfg.frozen));
  return result;
}

EvaluationResult evaluate_checkpoint(const nn::Checkpoint& ckpt,
                                     std::span<const SpectrogramImage> images, double threshold) {
  check_images(images, ckpt.config.input);
  const auto model = nn::model_from_checkpoint<float>(ckpt);
  EvaluationResult r;
  r.probabilities = predict(model, images);
  r.cm = confusion(r.probabilities, labels_of(images), threshold);
  r.metrics = compute_metrics(r.cm);
  return r;
}

std::vector<ReferenceTarget> reference_targets(std::string_view study) {
  if (study == "study1") {
    return {{"BEST", Metric::Accuracy, 0.953},
            {"EXP4", Metric::Accuracy, 0.953},
            {"EXP5", Metric::Accuracy, 0.9245},
            {"EXP1", Metric::Accuracy, 0.607}};
  }
  if (study == "study2") {
    return {{"BEST", Metric::Accuracy, 0.942},
            {"BEST", Metric::Sensitivity, 0.955},
            {"BEST", Metric::Specificity, 0.903},
            {"BEST", Metric::Precision, 0.968},
            {"BEST", Metric::F1, 0.961}};
  }
  if (study == "study3") {
    return {{"BEST", Metric::Accuracy, 0.968},
            {"BEST", Metric::Sensitivity, 0.958},
            {"BEST", Metric::Specificity, 0.98},
            {"BEST", Metric::Precision, 0.9829},
            {"BEST", Metric::F1, 0.9705}};
  }
  return {};
}

void write_study_report(std::ostream& os, const StudyResult& result) {
  os << "study: " << result.study << "\n\n[config]\n";
  for (const auto& [k, v] : result.config) os << k << " = " << v << "\n";

  for (const auto& v : result.variants) {
    os << "\n[variant " << v.preset << "]\n";
    os << "model = " << nn::to_string(v.config) << "\n";
    for (const auto& f : v.folds) {
      os << "fold " << f.fold << ": train " << f.n_train << " valid " << f.n_valid << " test "
         << f.n_test << ", best epoch " << f.best_epoch << "\n";
      for (const auto* tag : {"best", "final"}) {
        const bool best = std::string_view(tag) == "best";
        const auto& cm = best ? f.best_cm : f.final_cm;
        const auto& m = best ? f.best_metrics : f.final_metrics;
        os << "  " << tag << ": tp=" << cm.tp << " fp=" << cm.fp << " tn=" << cm.tn
           << " fn=" << cm.fn;
        for (auto metric : kAllMetrics) os << " " << to_string(metric) << "=" << format_metric(m.get(metric));
        os << "\n";
      }
    }
    for (const auto* tag : {"best", "final"}) {
      const auto& agg = std::string_view(tag) == "best" ? v.best : v.final;
      os << "aggregate (" << tag << " checkpoint, " << agg.folds << " folds):\n";
      for (auto metric : kAllMetrics) {
        const auto& s = agg[metric];
        os << "  " << std::left << std::setw(12) << to_string(metric) << std::right << " "
           << format_metric(s.mean) << " +/- " << format_metric(s.stddev)
           << "  max " << format_metric(s.max);
        if (s.excluded) os << "  (" << s.excluded << " undefined)";
        os << "\n";
      }
    }
    os << "mean train accuracy = " << fixed(v.mean_train_accuracy, 4)
       << ", train-test gap = " << fixed(v.train_test_gap, 4)
       << (v.overfitting ? "  -> overfitting" : "") << "\n";
  }

  const auto targets = reference_targets(result.study);
  if (!targets.empty()) {
    os << "\n[reference comparison, tolerance +/- " << fixed(kReproductionTolerance * 100, 1)
       << " pp]\n";
    for (const auto& t : targets) {
      const VariantResult* match = nullptr;
      for (const auto& v : result.variants) {
        if (v.preset == t.variant) match = &v;
      }
      os << t.variant << " " << to_string(t.metric) << ": reference " << fixed(t.value * 100, 2)
         << "%";
      if (!match) {
        os << ", not run\n";
        continue;
      }
      const auto got = match->best[t.metric].mean;
      if (!got) {
        os << ", measured undefined -> not reproduced\n";
        continue;
      }
      const double gap = *got - t.value;
      os << ", measured " << fixed(*got * 100, 2) << "% (" << (gap >= 0 ? "+" : "")
         << fixed(gap * 100, 2) << " pp) -> "
         << (std::abs(gap) <= kReproductionTolerance + 1e-12 ? "reproduced" : "not reproduced")
         << "\n";
    }
  }
}

void write_metrics_csv(std::ostream& os, const VariantResult& variant) {
  write_metrics_csv_header(os);
  for (const auto& f : variant.folds) {
    write_metrics_csv_row(os, std::to_string(f.fold), f.best_cm, f.best_metrics);
  }
}

void write_summary_csv(std::ostream& os, const StudyResult& result) {
  os << "variant,folds";
  for (auto m : kAllMetrics) os << ',' << to_string(m);
  os << ",mean_train_accuracy,overfitting\n";
  for (const auto& v : result.variants) {
    os << v.preset << ',' << v.best.folds;
    for (auto m : kAllMetrics) os << ',' << format_metric(v.best[m].mean, 6);
    os << ',' << fixed(v.mean_train_accuracy) << ',' << (v.overfitting ? "yes" : "no") << '\n';
  }
}

void write_epoch_csv(std::ostream& os, const VariantResult& variant) {
  os << "fold,epoch,train_loss,train_acc,valid_loss,valid_acc\n";
  for (const auto& f : variant.folds) {
    for (const auto& r : f.history) {
      os << f.fold << "," << r.epoch << "," << fixed(r.train_loss) << "," << fixed(r.train_accuracy)
         << "," << (r.valid_loss ? fixed(*r.valid_loss) : "") << ","
         << (r.valid_accuracy ? fixed(*r.valid_accuracy) : "") << "\n";
    }
  }
}

void write_study_outputs(const std::filesystem::path& dir, const StudyResult& result) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name);
    if (!f) fail(ErrorCode::Io, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("report.txt");
    write_study_report(f, result);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, result);
  }
  for (const auto& v : result.variants) {
    auto m = open("metrics_" + v.preset + ".csv");
    write_metrics_csv(m, v);
    auto f = open("epochs_" + v.preset + ".csv");
    write_epoch_csv(f, v);
    if (!v.folds.empty()) {
      nn::save_checkpoint(dir / ("best_" + v.preset + ".pcgm"), v.folds.front().best_checkpoint);
    }
  }
}

}  // namespace pcgnet
