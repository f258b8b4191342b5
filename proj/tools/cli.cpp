// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "pcgnet/dataset.hpp"
#include "pcgnet/dsp.hpp"
#include "pcgnet/errors.hpp"
#include "pcgnet/metrics.hpp"
#include "pcgnet/nn/checkpoint.hpp"
#include "pcgnet/signal_io.hpp"
#include "pcgnet/spectrogram.hpp"
#include "pcgnet/studies.hpp"
#include "pcgnet/trainer.hpp"

namespace fs = std::filesystem;

namespace pcgnet::cli {

namespace {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidBand:
    case ErrorCode::EmptyInput:
    case ErrorCode::ConfigMismatch:
    case ErrorCode::Io:
      return kExitUsage;
    case ErrorCode::DivergedLoss:
      return kExitInternal;
    case ErrorCode::MalformedContainer:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::MissingLabelFile:
    case ErrorCode::UnlabeledRecording:
    case ErrorCode::RateMismatch:
    case ErrorCode::SegmentTooShort:
    case ErrorCode::CacheCorrupt:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::TooFewSamples:
    case ErrorCode::LengthMismatch:
    case ErrorCode::RecordingTooShort:
      return kExitDataContract;
  }
  return kExitInternal;
}

// Everything any subcommand can be told, with defaults.
struct Settings {
  // shared
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  bool smoke = false;
  std::string config_file;
  // paths
  std::vector<std::string> data;
  std::vector<std::string> cache;
  std::string out;
  std::string checkpoint;
  std::string source;
  std::string wav;
  std::string run_dir;
  // selectors
  std::string dataset = "physionet";
  std::string study = "1";
  std::vector<std::string> presets;
  // overrides
  std::size_t epochs = 110;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double transfer_learning_rate = 1e-4;
  double threshold = 0.5;
  std::size_t folds = 10;
  bool class_weighting = false;
  std::vector<std::string> freeze = {"conv1", "conv2", "conv3"};
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Flat key=value file. Values fill options not already given on the command
// line (or through the environment). Keys may use '_' or '-'.
void apply_config_file(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::InvalidConfig, path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (!opt) {
      fail(ErrorCode::InvalidConfig, path + ":" + std::to_string(lineno) + ": unknown key '" +
                                         key + "' for '" + sub.get_name() + "'");
    }
    if (opt->count() > 0) continue;
    if (opt->get_type_size_max() > 1 || opt->get_expected_max() > 1) {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) opt->add_result(trim(item));
    } else {
      opt->add_result(value);
    }
    opt->run_callback();
  }
}

using Echo = std::vector<std::pair<std::string, std::string>>;

std::string join_list(const std::vector<std::string>& v) {
  return v.empty() ? "none" : join(v);
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void print_echo(std::ostream& os, const std::string& command, const Echo& echo) {
  os << "[" << command << " configuration]\n";
  for (const auto& [k, v] : echo) os << "  " << k << " = " << v << "\n";
}

void write_echo(const fs::path& path, const std::string& command, const Echo& echo) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write " + path.string());
  f << "# pcgnet " << command << "\n";
  for (const auto& [k, v] : echo) f << k << " = " << v << "\n";
}

Echo common_echo(const Settings& s) {
  return {{"seed", std::to_string(s.seed)},
          {"jobs", std::to_string(s.jobs)},
          {"smoke", s.smoke ? "yes" : "no"},
          {"config", s.config_file.empty() ? "none" : s.config_file}};
}

std::vector<SpectrogramImage> load_caches(const Settings& s) {
  if (s.cache.empty()) fail(ErrorCode::InvalidConfig, "--cache is required");
  std::vector<SpectrogramImage> all;
  for (const auto& dir : s.cache) {
    auto part = load_spectrograms(CacheLayout{dir});
    for (auto& img : part) all.push_back(std::move(img));
  }
  return all;
}

// Smoke runs keep a few items per class and shrink them.
std::vector<SpectrogramImage> smoke_cut(std::vector<SpectrogramImage> images) {
  images = take_per_class(images, kSmokePerClass);
  for (auto& img : images) img = resize_image(img, kSmokeRows, kSmokeCols);
  return images;
}

std::vector<SpectrogramImage> fit_to(std::vector<SpectrogramImage> images, const nn::Shape3& input) {
  for (auto& img : images) {
    if (img.rows != input.h || img.cols != input.w) img = resize_image(img, input.h, input.w);
  }
  return images;
}

std::string counts(std::span<const SpectrogramImage> images) {
  std::size_t abnormal = 0;
  for (const auto& img : images) abnormal += img.label == Label::Abnormal;
  return std::to_string(images.size()) + " (" + std::to_string(images.size() - abnormal) +
         " normal / " + std::to_string(abnormal) + " abnormal)";
}

void print_aggregate(std::ostream& os, const VariantResult& v) {
  os << v.preset << " over " << v.best.folds << " fold(s), best-validation checkpoint:\n";
  for (auto m : kAllMetrics) {
    const auto& s = v.best[m];
    os << "  " << std::left << std::setw(12) << to_string(m) << std::right << " "
       << format_metric(s.mean) << " +/- " << format_metric(s.stddev) << "  (max "
       << format_metric(s.max) << ")\n";
  }
  if (v.overfitting) os << "  overfitting: train-test accuracy gap " << format_metric(v.train_test_gap) << "\n";
}

StudyOptions study_options(const Settings& s, std::ostream& err) {
  StudyOptions o;
  o.folds = s.smoke ? 1 : s.folds;
  o.jobs = s.jobs;
  o.train.epochs = s.smoke ? 1 : s.epochs;
  o.train.batch_size = s.batch_size;
  o.train.learning_rate = s.learning_rate;
  o.train.threshold = s.threshold;
  o.train.seed = s.seed;
  o.train.class_weighting = s.class_weighting;
  o.log = [&err](std::string_view line) { err << line << "\n"; };
  return o;
}

// ---- subcommands ------------------------------------------------------------

int cmd_prepare(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.data.empty()) fail(ErrorCode::InvalidConfig, "--data is required");
  if (s.cache.size() != 1) fail(ErrorCode::InvalidConfig, "prepare takes exactly one --cache");
  DatasetKind kind;
  if (s.dataset == "physionet") {
    kind = DatasetKind::PhysioNet;
  } else if (s.dataset == "pascal") {
    kind = DatasetKind::Pascal;
  } else {
    fail(ErrorCode::InvalidConfig, "--dataset must be physionet or pascal");
  }
  Echo echo = {{"command", "prepare"},
               {"data", join(s.data)},
               {"dataset", s.dataset},
               {"cache", s.cache.front()},
               {"resample_hz", std::to_string(kCanonicalRate)},
               {"bandpass", "butterworth prototype order 4, 20-400 Hz, single causal pass"},
               {"segment_samples", std::to_string(kSegmentLength)},
               {"stft", "hamming 128, fft 128, hop 64"},
               {"image", std::to_string(kImageRows) + "x" + std::to_string(kImageCols) +
                             ", log power, min-max"}};
  for (auto& kv : common_echo(s)) echo.push_back(kv);
  print_echo(out, "prepare", echo);

  std::vector<fs::path> roots(s.data.begin(), s.data.end());
  for (const auto& r : roots) {
    if (!fs::is_directory(r)) fail(ErrorCode::InvalidConfig, "data root is not a directory: " + r.string());
  }
  auto manifest = build_manifest(roots, kind);
  if (manifest.empty()) {
    err << "error: no recordings found under " << join(s.data) << "\n";
    return kExitUsage;
  }
  if (s.smoke) {
    DatasetManifest cut;
    std::size_t taken[2] = {0, 0};
    for (const auto& e : manifest.entries()) {
      if (taken[encode(e.label)]++ < static_cast<std::size_t>(kSmokePerClass)) cut.add(e);
    }
    manifest = std::move(cut);
  }
  const CacheLayout cache{s.cache.front()};
  const auto summary = prepare_cache(manifest, cache, s.jobs);
  write_echo(cache.root / "prepare_config.txt", "prepare", echo);

  for (const auto& f : summary.failures) err << "warning: skipped " << f.path.string() << ": " << f.message << "\n";
  out << summary.recordings << " recordings used, " << summary.recordings_too_short
      << " shorter than 8 s discarded, " << summary.failures.size() << " failed\n";
  out << summary.spectrograms << " spectrograms (" << summary.normal << " normal / "
      << summary.abnormal << " abnormal)\n";
  if (summary.spectrograms == 0 && !summary.failures.empty()) {
    err << "error: every readable recording failed preprocessing\n";
    return kExitDataContract;
  }
  return kExitOk;
}

int cmd_train(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.study != "1" && s.study != "2") fail(ErrorCode::InvalidConfig, "--study must be 1 or 2 (use `transfer` for study 3)");
  auto images = load_caches(s);
  if (s.smoke) images = smoke_cut(std::move(images));
  const auto opts = study_options(s, err);
  const fs::path out_dir = s.out.empty() ? fs::path("runs") / ("study" + s.study) : fs::path(s.out);

  StudyResult result = s.study == "1" ? run_study1(images, opts, s.presets) : run_study2(images, opts);
  Echo echo = {{"command", "train"}, {"cache", join(s.cache)}, {"out", out_dir.string()}};
  for (auto& kv : common_echo(s)) echo.push_back(kv);
  for (const auto& kv : result.config) echo.push_back(kv);
  if (s.smoke) {
    echo.emplace_back("smoke_items_per_class", std::to_string(kSmokePerClass));
    echo.emplace_back("smoke_image", std::to_string(kSmokeRows) + "x" + std::to_string(kSmokeCols));
  }
  result.config = echo;
  print_echo(out, "train", echo);
  write_study_outputs(out_dir, result);
  write_echo(out_dir / "config.txt", "train", echo);

  out << "items: " << counts(images) << "\n";
  for (const auto& v : result.variants) print_aggregate(out, v);
  out << "outputs written to " << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const Settings& s, std::ostream& out, std::ostream&) {
  if (s.checkpoint.empty()) fail(ErrorCode::InvalidConfig, "--checkpoint is required");
  const auto ckpt = nn::load_checkpoint(s.checkpoint);
  auto images = load_caches(s);
  if (s.smoke) images = take_per_class(images, kSmokePerClass);
  if (s.smoke) images = fit_to(std::move(images), ckpt.config.input);
  Echo echo = {{"command", "evaluate"},
               {"checkpoint", s.checkpoint},
               {"model", nn::to_string(ckpt.config)},
               {"dataset", s.dataset},
               {"cache", join(s.cache)},
               {"threshold", num(s.threshold)}};
  for (auto& kv : common_echo(s)) echo.push_back(kv);
  print_echo(out, "evaluate", echo);

  const auto r = evaluate_checkpoint(ckpt, images, s.threshold);
  std::ostringstream block;
  block << "items: " << counts(images) << "\n";
  block << "confusion: tp=" << r.cm.tp << " fp=" << r.cm.fp << " tn=" << r.cm.tn << " fn=" << r.cm.fn << "\n";
  for (auto m : kAllMetrics) {
    block << "  " << std::left << std::setw(12) << to_string(m) << std::right << " "
          << format_metric(r.metrics.get(m)) << "\n";
  }
  out << block.str();
  if (!s.out.empty()) {
    fs::create_directories(s.out);
    write_echo(fs::path(s.out) / "config.txt", "evaluate", echo);
    std::ofstream csv(fs::path(s.out) / "metrics.csv");
    write_metrics_csv_header(csv);
    write_metrics_csv_row(csv, "all", r.cm, r.metrics);
    std::ofstream(fs::path(s.out) / "report.txt") << block.str();
  }
  return kExitOk;
}

int cmd_transfer(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.source.empty()) fail(ErrorCode::InvalidConfig, "--source is required");
  auto source = nn::load_checkpoint(s.source);
  auto images = load_caches(s);
  if (s.smoke) images = take_per_class(images, kSmokePerClass);
  images = s.smoke ? fit_to(std::move(images), source.config.input) : std::move(images);
  auto opts = study_options(s, err);
  TransferConfig tcfg;
  tcfg.frozen = s.freeze;
  tcfg.learning_rate = s.transfer_learning_rate;
  tcfg.epochs = s.smoke ? 1 : s.epochs;
  const fs::path out_dir = s.out.empty() ? fs::path("runs") / "study3" : fs::path(s.out);

  auto result = run_study3_transfer(images, source, tcfg, opts);
  Echo echo = {{"command", "transfer"},
               {"source", s.source},
               {"cache", join(s.cache)},
               {"out", out_dir.string()},
               {"freeze", join_list(s.freeze)}};
  for (auto& kv : common_echo(s)) echo.push_back(kv);
  for (const auto& kv : result.config) echo.push_back(kv);
  result.config = echo;
  print_echo(out, "transfer", echo);
  write_study_outputs(out_dir, result);
  write_echo(out_dir / "config.txt", "transfer", echo);

  out << "items: " << counts(images) << "\n";
  for (const auto& v : result.variants) print_aggregate(out, v);
  out << "outputs written to " << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_predict(const Settings& s, std::ostream& out, std::ostream&) {
  if (s.checkpoint.empty()) fail(ErrorCode::InvalidConfig, "--checkpoint is required");
  if (s.wav.empty()) fail(ErrorCode::InvalidConfig, "--wav is required");
  const auto ckpt = nn::load_checkpoint(s.checkpoint);
  const auto model = nn::model_from_checkpoint<float>(ckpt);
  Echo echo = {{"command", "predict"},
               {"checkpoint", s.checkpoint},
               {"model", nn::to_string(ckpt.config)},
               {"wav", s.wav},
               {"threshold", num(s.threshold)},
               {"verdict_rule", "majority vote, ties abnormal"}};
  for (auto& kv : common_echo(s)) echo.push_back(kv);
  print_echo(out, "predict", echo);

  AudioRecording rec = load_wav(s.wav);
  const auto segments = preprocess_recording(rec, design_bandpass());
  if (segments.empty()) {
    const double seconds = static_cast<double>(resample(rec).samples.size()) / kCanonicalRate;
    std::ostringstream msg;
    msg << std::fixed << std::setprecision(2) << s.wav << " lasts " << seconds
        << " s after resampling; at least 8 s are needed";
    fail(ErrorCode::RecordingTooShort, msg.str());
  }
  const StftAnalyzer analyzer;
  std::vector<SpectrogramImage> images;
  for (const auto& seg : segments) images.push_back(make_spectrogram(seg, analyzer));
  images = fit_to(std::move(images), ckpt.config.input);
  const auto probs = predict(model, images);

  std::size_t abnormal = 0;
  out << std::fixed << std::setprecision(4);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pos = probs[i] >= s.threshold;
    abnormal += pos;
    out << "segment " << i << ": p(abnormal) = " << probs[i] << " -> " << (pos ? "abnormal" : "normal") << "\n";
  }
  const bool verdict = 2 * abnormal >= probs.size();
  out << "verdict: " << (verdict ? "abnormal" : "normal") << " (" << abnormal << " of "
      << probs.size() << " segments abnormal)\n";
  out.unsetf(std::ios::floatfield);
  return kExitOk;
}

// Rebuilds the aggregate block of a finished run from its per-fold CSVs.
int cmd_report(const Settings& s, std::ostream& out, std::ostream&) {
  if (s.run_dir.empty()) fail(ErrorCode::InvalidConfig, "--run is required");
  const fs::path dir = s.run_dir;
  if (!fs::is_directory(dir)) fail(ErrorCode::InvalidConfig, "not a directory: " + dir.string());

  std::string study = s.study;
  if (std::ifstream rep{dir / "report.txt"}) {
    std::string first;
    std::getline(rep, first);
    if (first.starts_with("study: ")) study = first.substr(7);
  } else if (study == "1" || study == "2" || study == "3") {
    study = "study" + study;
  }

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.starts_with("metrics_") && name.ends_with(".csv")) files.push_back(e.path());
  }
  if (files.empty()) fail(ErrorCode::EmptyInput, "no metrics_<preset>.csv files in " + dir.string());
  std::sort(files.begin(), files.end());

  Echo echo = {{"command", "report"}, {"run", dir.string()}, {"study", study}};
  print_echo(out, "report", echo);

  StudyResult result;
  result.study = study;
  result.config = echo;
  for (const auto& f : files) {
    VariantResult v;
    v.preset = f.stem().string().substr(8);
    std::ifstream in(f);
    std::string line;
    std::getline(in, line);
    if (!line.starts_with("fold,tp,fp,tn,fn")) fail(ErrorCode::CacheCorrupt, f.string() + ": unexpected header");
    std::vector<MetricsReport> reports;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() < 5) fail(ErrorCode::CacheCorrupt, f.string() + ": short row");
      FoldOutcome fold;
      fold.fold = v.folds.size();
      try {
        fold.best_cm = {std::stoull(cells[1]), std::stoull(cells[2]), std::stoull(cells[3]),
                        std::stoull(cells[4])};
      } catch (const std::logic_error&) {
        fail(ErrorCode::CacheCorrupt, f.string() + ": bad count in row '" + line + "'");
      }
      fold.best_metrics = compute_metrics(fold.best_cm);
      fold.n_test = fold.best_cm.total();
      reports.push_back(fold.best_metrics);
      v.folds.push_back(std::move(fold));
    }
    v.best = aggregate_folds(reports);
    v.final = v.best;
    out << "\n";
    print_aggregate(out, v);
    result.variants.push_back(std::move(v));
  }

  const auto targets = reference_targets(study);
  if (!targets.empty()) {
    std::ostringstream full;
    write_study_report(full, result);
    const auto text = full.str();
    const auto pos = text.find("[reference comparison");
    if (pos != std::string::npos) out << "\n" << text.substr(pos);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"pcgnet: heart-sound (PCG) screening with STFT spectrograms and a CNN", "pcgnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("pcgnet 0.1.0"));

  auto shared = [&](CLI::App* sub) {
    sub->add_option("--seed", s.seed, "Master seed")->capture_default_str();
    sub->add_option("--jobs,-j", s.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--smoke", s.smoke, "Tiny run: 1 fold, 1 epoch, truncated data");
    sub->add_option("--config", s.config_file, "Flat key=value file with option defaults");
  };
  auto cache_opt = [&](CLI::App* sub, const char* help) {
    sub->add_option("--cache", s.cache, help)->envname("PCGNET_CACHE_DIR")->delimiter(',');
  };
  auto train_opts = [&](CLI::App* sub) {
    sub->add_option("--epochs", s.epochs)->capture_default_str();
    sub->add_option("--batch-size,--batch_size", s.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--threshold", s.threshold)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--folds", s.folds)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--class-weight,--class_weight", s.class_weighting, "Weight the loss by inverse class frequency");
    sub->add_option("--out", s.out, "Output directory");
  };

  auto* prepare = app.add_subcommand("prepare", "Build the segment and spectrogram cache for a dataset");
  prepare->add_option("--data", s.data, "Dataset root directory")->delimiter(',');
  prepare->add_option("--dataset", s.dataset, "physionet or pascal")->capture_default_str();
  cache_opt(prepare, "Cache directory to write");
  shared(prepare);

  auto* train = app.add_subcommand("train", "Run study 1 (seven variants) or study 2 (BEST, combined data)");
  train->add_option("--study", s.study, "1 or 2")->capture_default_str();
  train->add_option("--preset", s.presets, "Study 1 variants to run (default EXP1..EXP7)")->delimiter(',');
  train->add_option("--lr,--learning-rate,--learning_rate", s.learning_rate)->capture_default_str();
  cache_opt(train, "Prepared cache(s); several are concatenated");
  train_opts(train);
  shared(train);

  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a prepared cache");
  evaluate->add_option("--checkpoint", s.checkpoint, "Model checkpoint (.pcgm)");
  evaluate->add_option("--dataset", s.dataset, "Label for the report")->capture_default_str();
  evaluate->add_option("--threshold", s.threshold)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--out", s.out, "Optional output directory");
  cache_opt(evaluate, "Prepared cache(s)");
  shared(evaluate);

  auto* transfer = app.add_subcommand("transfer", "Fine-tune a BEST checkpoint (study 3)");
  transfer->add_option("--source", s.source, "BEST checkpoint to start from");
  transfer->add_option("--freeze", s.freeze, "Layers to keep fixed")->delimiter(',')->capture_default_str();
  transfer->add_option("--lr,--learning-rate,--learning_rate", s.transfer_learning_rate)->capture_default_str();
  cache_opt(transfer, "Prepared PASCAL cache");
  train_opts(transfer);
  shared(transfer);

  auto* predict_cmd = app.add_subcommand("predict", "Classify one WAV recording");
  predict_cmd->add_option("--checkpoint", s.checkpoint, "Model checkpoint (.pcgm)");
  predict_cmd->add_option("--wav", s.wav, "16-bit mono PCM WAV file");
  predict_cmd->add_option("--threshold", s.threshold)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  shared(predict_cmd);

  auto* report = app.add_subcommand("report", "Re-aggregate the per-fold metrics of a finished run");
  report->add_option("--run", s.run_dir, "Output directory of train/transfer");
  report->add_option("--study", s.study, "Study id when the run has no report.txt");
  shared(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!s.config_file.empty()) apply_config_file(*active, s.config_file);
    if (s.epochs == 0) fail(ErrorCode::InvalidConfig, "--epochs must be positive");
    const auto name = active->get_name();
    if (name == "prepare") return cmd_prepare(s, out, err);
    if (name == "train") return cmd_train(s, out, err);
    if (name == "evaluate") return cmd_evaluate(s, out, err);
    if (name == "transfer") return cmd_transfer(s, out, err);
    if (name == "predict") return cmd_predict(s, out, err);
    if (name == "report") return cmd_report(s, out, err);
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace pcgnet::cli
