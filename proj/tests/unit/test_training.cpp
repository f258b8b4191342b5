#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pcgnet/errors.hpp"
#include "pcgnet/rng.hpp"
#include "pcgnet/splits.hpp"
#include "pcgnet/studies.hpp"
#include "pcgnet/trainer.hpp"
#include "test_support.hpp"

using namespace pcgnet;
using pcgnet::testing::TempDir;

namespace {

std::vector<Label> make_labels(std::size_t normal, std::size_t abnormal) {
  std::vector<Label> y(normal, Label::Normal);
  y.insert(y.end(), abnormal, Label::Abnormal);
  return y;
}

std::array<std::size_t, 3> class_counts(const FoldSplit& f, std::span<const Label> y, Label c) {
  std::array<std::size_t, 3> n{};
  for (auto i : f.train) n[0] += y[i] == c;
  for (auto i : f.valid) n[1] += y[i] == c;
  for (auto i : f.test) n[2] += y[i] == c;
  return n;
}

// Abnormal images carry a bright band in the upper half; trivially separable.
std::vector<SpectrogramImage> separable_images(std::size_t per_class, std::size_t rows,
                                               std::size_t cols, std::uint64_t seed,
                                               double noise = 0.3) {
  Rng rng(seed);
  std::vector<SpectrogramImage> out;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    SpectrogramImage img;
    img.rows = rows;
    img.cols = cols;
    img.label = i % 2 ? Label::Abnormal : Label::Normal;
    img.source_id = "img" + std::to_string(i);
    img.pixels.resize(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        double v = noise * rng.uniform();
        if (img.label == Label::Abnormal && r < rows / 2) v += 0.6;
        img.pixels[r * cols + c] = static_cast<float>(v);
      }
    }
    out.push_back(std::move(img));
  }
  return out;
}

nn::ModelConfig tiny_config(std::size_t rows, std::size_t cols) {
  using namespace nn;
  ModelConfig cfg;
  cfg.name = "tiny";
  cfg.input = {1, rows, cols};
  cfg.layers = {Conv2DSpec{4, 3, 3, Activation::Relu}, MaxPoolSpec{2, 2}, DropoutSpec{0.25},
                Conv2DSpec{4, 3, 3, Activation::Relu}, MaxPoolSpec{2, 2}, DropoutSpec{0.25},
                Conv2DSpec{4, 3, 3, Activation::Relu}, FlattenSpec{}, DropoutSpec{0.5},
                DenseSpec{1, Activation::Sigmoid}};
  return cfg;
}

std::vector<std::size_t> iota_n(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("class allocation matches the reference per-fold counts") {
  using A = std::array<std::size_t, 3>;
  CHECK(class_allocation(1720, {}) == A{1290, 258, 172});
  CHECK(class_allocation(5614, {}) == A{4211, 842, 561});
  CHECK(class_allocation(1827, {}) == A{1370, 274, 183});
  // The reference 5501 row (4125/826/550) is one item off the largest-remainder
  // rule in train/valid; still within the +-1 stratification contract.
  const auto n = class_allocation(5501, {});
  CHECK(n[0] + n[1] + n[2] == 5501);
  CHECK(std::abs(static_cast<long>(n[0]) - 4125) <= 1);
  CHECK(std::abs(static_cast<long>(n[1]) - 826) <= 1);
  CHECK(n[2] == 550);
}

TEST_CASE("make_splits on the PhysioNet class sizes") {
  const auto y = make_labels(5501, 1720);
  const auto plan = make_splits(y, 10, 42);
  CHECK(plan.folds == 10);
  CHECK(plan.per_fold.size() == 10);
  for (const auto& f : plan.per_fold) {
    CHECK(class_counts(f, y, Label::Abnormal) == std::array<std::size_t, 3>{1290, 258, 172});
    const auto nn = class_counts(f, y, Label::Normal);
    CHECK(nn[0] + nn[1] + nn[2] == 5501);
    CHECK(nn[2] == 550);
  }
  CHECK(plan.per_fold[0].test != plan.per_fold[1].test);
}

TEST_CASE("make_splits on a PASCAL-sized set gives 165/33/22") {
  const auto y = make_labels(160, 60);
  for (const auto& f : make_splits(y).per_fold) {
    CHECK(f.train.size() == 165);
    CHECK(f.valid.size() == 33);
    CHECK(f.test.size() == 22);
  }
}

TEST_CASE("split hygiene over random datasets") {
  Rng rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t normal = 10 + rng.below(400);
    const std::size_t abnormal = 10 + rng.below(200);
    auto y = make_labels(normal, abnormal);
    rng.shuffle(std::span<Label>(y));
    const std::uint64_t seed = rng.next_u64();
    const auto plan = make_splits(y, 10, seed);
    for (const auto& f : plan.per_fold) {
      std::set<std::size_t> tr(f.train.begin(), f.train.end()), va(f.valid.begin(), f.valid.end()),
          te(f.test.begin(), f.test.end());
      CHECK(tr.size() == f.train.size());
      std::set<std::size_t> all = tr;
      all.insert(va.begin(), va.end());
      all.insert(te.begin(), te.end());
      CHECK(all.size() == y.size());  // pairwise disjoint and exhaustive
      for (Label c : {Label::Normal, Label::Abnormal}) {
        const auto n = class_counts(f, y, c);
        const double total = static_cast<double>(n[0] + n[1] + n[2]);
        CHECK(std::abs(static_cast<double>(n[0]) - 0.75 * total) <= 1.0);
        CHECK(std::abs(static_cast<double>(n[1]) - 0.15 * total) <= 1.0);
        CHECK(std::abs(static_cast<double>(n[2]) - 0.10 * total) <= 1.0);
      }
    }
    const auto again = make_splits(y, 10, seed);
    for (std::size_t k = 0; k < 10; ++k) {
      CHECK(again.per_fold[k].train == plan.per_fold[k].train);
      CHECK(again.per_fold[k].valid == plan.per_fold[k].valid);
      CHECK(again.per_fold[k].test == plan.per_fold[k].test);
    }
  }
}

TEST_CASE("make_splits needs ten items per class") {
  const auto y = make_labels(50, 9);
  CHECK(code_of([&] { make_splits(y); }) == ErrorCode::TooFewSamples);
}

TEST_CASE("train_model: zero epochs returns the initialisation") {
  const auto images = separable_images(6, 12, 16, 1);
  const auto idx = iota_n(images.size());
  TrainConfig tc;
  tc.epochs = 0;
  tc.seed = 5;
  const auto r = train_model(tiny_config(12, 16), tc, {images, idx, {}});
  CHECK(r.history.empty());
  CHECK(r.best_epoch == 0);
  const auto init = nn::to_checkpoint(nn::Model<float>(tiny_config(12, 16), derive_seed(5, 0)));
  CHECK(r.final_checkpoint.same_parameters(init));
  CHECK(r.best_checkpoint.same_parameters(init));
}

TEST_CASE("train_model: equal seeds give bitwise-identical checkpoints") {
  const auto images = separable_images(10, 12, 16, 2);
  const auto idx = iota_n(images.size());
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 4;
  tc.seed = 11;
  const auto a = train_model(tiny_config(12, 16), tc, {images, idx, idx});
  const auto b = train_model(tiny_config(12, 16), tc, {images, idx, idx});
  CHECK(nn::encode_checkpoint(a.final_checkpoint) == nn::encode_checkpoint(b.final_checkpoint));
  CHECK(nn::encode_checkpoint(a.best_checkpoint) == nn::encode_checkpoint(b.best_checkpoint));
  REQUIRE(a.history.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(a.history[e].epoch == e + 1);
    CHECK(a.history[e].train_loss == b.history[e].train_loss);
    CHECK(a.history[e].train_loss >= 0.0);
    CHECK(a.history[e].train_accuracy >= 0.0);
    CHECK(a.history[e].train_accuracy <= 1.0);
    CHECK(*a.history[e].valid_accuracy <= 1.0);
  }
  tc.seed = 12;
  const auto c = train_model(tiny_config(12, 16), tc, {images, idx, idx});
  CHECK_FALSE(c.final_checkpoint.same_parameters(a.final_checkpoint));
}

TEST_CASE("train_model: validation accuracy does not fall on a separable task") {
  const auto images = separable_images(20, 12, 16, 3);
  std::vector<std::size_t> train, valid;
  for (std::size_t i = 0; i < images.size(); ++i) (i % 5 == 0 ? valid : train).push_back(i);
  TrainConfig tc;
  tc.epochs = 110;
  tc.batch_size = 8;
  const auto r = train_model(tiny_config(12, 16), tc, {images, train, valid});
  REQUIRE(r.history.size() == 110);
  CHECK(*r.history.back().valid_accuracy >= *r.history.front().valid_accuracy);
  CHECK(*r.history.back().valid_accuracy == 1.0);
}

TEST_CASE("train_model: freezing keeps frozen tensors bitwise fixed") {
  const auto images = separable_images(8, 12, 16, 4);
  const auto idx = iota_n(images.size());
  const auto cfg = tiny_config(12, 16);
  const auto source = nn::to_checkpoint(nn::Model<float>(cfg, 99));
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 4;
  const std::vector<std::string> frozen = {"conv1", "conv2"};
  const auto r = train_model(cfg, tc, {images, idx, {}}, &source, frozen);
  for (std::size_t i = 0; i < source.tensors.size(); ++i) {
    const auto& before = source.tensors[i];
    const auto& after = r.final_checkpoint.tensors[i];
    INFO(before.name);
    const bool is_frozen = before.name.starts_with("conv1.") || before.name.starts_with("conv2.");
    const bool same = std::memcmp(before.values.data(), after.values.data(),
                                  before.values.size() * sizeof(float)) == 0;
    CHECK(same == is_frozen);
    CHECK(after.trainable == !is_frozen);
  }

  const std::vector<std::string> all = {"conv1", "conv2", "conv3", "dense1"};
  const auto none = train_model(cfg, tc, {images, idx, {}}, &source, all);
  CHECK(none.final_checkpoint.same_parameters(source));

  const std::vector<std::string> bogus = {"conv9"};
  CHECK(code_of([&] { train_model(cfg, tc, {images, idx, {}}, &source, bogus); }) ==
        ErrorCode::InvalidConfig);
  const auto other = nn::to_checkpoint(nn::Model<float>(tiny_config(16, 16), 1));
  CHECK(code_of([&] { train_model(cfg, tc, {images, idx, {}}, &other); }) == ErrorCode::ConfigMismatch);
}

TEST_CASE("train_model: divergence and bad inputs are reported") {
  const auto images = separable_images(4, 12, 16, 5, 50.0);
  const auto idx = iota_n(images.size());
  TrainConfig tc;
  tc.epochs = 20;
  tc.batch_size = 2;
  tc.learning_rate = 1e30;
  CHECK(code_of([&] { train_model(tiny_config(12, 16), tc, {images, idx, {}}); }) == ErrorCode::DivergedLoss);

  tc.learning_rate = 1e-3;
  tc.threshold = 1.0;
  CHECK(code_of([&] { train_model(tiny_config(12, 16), tc, {images, idx, {}}); }) == ErrorCode::InvalidConfig);
  tc.threshold = 0.5;
  CHECK(code_of([&] { train_model(tiny_config(12, 16), tc, {images, {}, {}}); }) == ErrorCode::EmptyInput);
  CHECK(code_of([&] { train_model(tiny_config(10, 16), tc, {images, idx, {}}); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("study runners in smoke configuration") {
  const auto images = separable_images(6, 35, 78, 6);
  StudyOptions opts;
  opts.folds = 1;
  opts.train.epochs = 1;
  opts.train.batch_size = 4;

  const auto s1 = run_study1(images, opts);
  CHECK(s1.variants.size() == 7);
  std::ostringstream summary;
  write_summary_csv(summary, s1);
  std::size_t lines = 0;
  std::string line;
  std::istringstream in(summary.str());
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 7);
  for (const auto& v : s1.variants) {
    REQUIRE(v.folds.size() == 1);
    CHECK(v.folds[0].n_train == 8);
    CHECK(v.folds[0].n_valid == 2);
    CHECK(v.folds[0].n_test == 2);
    CHECK(v.folds[0].history.size() == 1);
  }

  const auto s2 = run_study2(images, opts);
  REQUIRE(s2.variants.size() == 1);
  std::ostringstream m;
  write_metrics_csv(m, s2.variants[0]);
  CHECK(m.str().starts_with("fold,tp,fp,tn,fn,accuracy,sensitivity,specificity,precision,f1\n0,"));

  TempDir dir("study");
  write_study_outputs(dir.path(), s2);
  for (const char* f : {"report.txt", "summary.csv", "metrics_BEST.csv", "epochs_BEST.csv", "best_BEST.pcgm"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream epochs(dir / "epochs_BEST.csv");
  std::getline(epochs, line);
  CHECK(line == "fold,epoch,train_loss,train_acc,valid_loss,valid_acc");
}

TEST_CASE("transfer study: source must be a BEST model; frozen set is echoed") {
  const auto images = separable_images(6, 35, 78, 7);
  StudyOptions opts;
  opts.folds = 1;
  opts.train.batch_size = 4;
  TransferConfig tcfg;
  tcfg.epochs = 1;

  const auto wrong = nn::to_checkpoint(nn::Model<float>(nn::preset("EXP1", {1, 35, 78}), 1));
  CHECK(code_of([&] { run_study3_transfer(images, wrong, tcfg, opts); }) == ErrorCode::ConfigMismatch);

  const auto source = nn::to_checkpoint(nn::Model<float>(nn::preset("BEST", {1, 35, 78}), 1));
  const auto r = run_study3_transfer(images, source, tcfg, opts);
  std::ostringstream report;
  write_study_report(report, r);
  CHECK(report.str().find("frozen_layers = conv1,conv2,conv3") != std::string::npos);
  CHECK(report.str().find("learning_rate = 0.0001") != std::string::npos);
  const auto& trained = r.variants[0].folds[0].final_checkpoint;
  for (std::size_t i = 0; i < source.tensors.size(); ++i) {
    const auto& name = source.tensors[i].name;
    const bool frozen = name.starts_with("conv1.") || name.starts_with("conv2.") || name.starts_with("conv3.");
    if (frozen) CHECK(trained.tensors[i].values == source.tensors[i].values);
  }

  tcfg.epochs = 111;
  CHECK(code_of([&] { run_study3_transfer(images, source, tcfg, opts); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("report compares against reference targets") {
  StudyResult r;
  r.study = "study3";
  VariantResult v;
  v.preset = "BEST";
  MetricsReport m;
  m.accuracy = 0.95;
  m.precision = 0.90;
  const std::vector<MetricsReport> folds = {m};
  v.best = aggregate_folds(folds);
  v.final = v.best;
  r.variants.push_back(v);
  std::ostringstream os;
  write_study_report(os, r);
  const auto text = os.str();
  CHECK(text.find("BEST accuracy: reference 96.80%, measured 95.00% (-1.80 pp) -> reproduced") != std::string::npos);
  CHECK(text.find("BEST precision: reference 98.29%, measured 90.00% (-8.29 pp) -> not reproduced") != std::string::npos);
  CHECK(text.find("BEST f1: reference 97.05%, measured undefined -> not reproduced") != std::string::npos);
}
