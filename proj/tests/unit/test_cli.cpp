#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "cli.hpp"
#include "pcgnet/nn/checkpoint.hpp"
#include "pcgnet/synth.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace pcgnet;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome pcgnet_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pcgnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

void write_synth_wav(const fs::path& path, double seconds, Label label, std::uint64_t seed) {
  SynthOptions o;
  o.duration_seconds = seconds;
  Rng rng(seed);
  const auto rec = synth_recording(label, rng, o);
  write_wav(path, rec.samples, rec.sample_rate);
}

// One prepared cache shared by the slower cases.
struct Prepared {
  testing::TempDir dir{"cli"};
  fs::path data = dir.path() / "data";
  fs::path cache = dir.path() / "cache";
  Outcome prepare;
  Prepared() {
    write_synth_corpus(data, 8, 7);
    prepare = pcgnet_cli({"prepare", "--data", data.string(), "--cache", cache.string()});
  }
};

Prepared& prepared() {
  static Prepared p;
  return p;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(pcgnet_cli({}).code == cli::kExitUsage);
  CHECK(pcgnet_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(pcgnet_cli({"train", "--epochs", "many"}).code == cli::kExitUsage);
  CHECK(pcgnet_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("prepare on an empty root reports no recordings") {
  testing::TempDir dir{"cli"};
  fs::create_directories(dir.path() / "empty");
  const auto r = pcgnet_cli({"prepare", "--data", (dir.path() / "empty").string(), "--cache",
                             (dir.path() / "cache").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("no recordings found") != std::string::npos);
}

TEST_CASE("prepare counts spectrograms per class and echoes its configuration") {
  auto& p = prepared();
  REQUIRE(p.prepare.code == cli::kExitOk);
  // 8.5 s recordings give one segment each.
  CHECK(p.prepare.out.find("16 spectrograms (8 normal / 8 abnormal)") != std::string::npos);
  CHECK(p.prepare.out.find("[prepare configuration]") != std::string::npos);
  CHECK(p.prepare.out.find("seed = 42") != std::string::npos);
  CHECK(fs::exists(p.cache / "manifest.csv"));
  CHECK(fs::exists(p.cache / "prepare_config.txt"));
}

TEST_CASE("prepare with a broken file keeps going and names it") {
  testing::TempDir dir{"cli"};
  write_synth_corpus(dir.path() / "data", 2, 3);
  std::ofstream(dir.path() / "data" / "synth_0000.wav", std::ios::binary) << "not a wav";
  const auto r = pcgnet_cli({"prepare", "--data", (dir.path() / "data").string(), "--cache",
                             (dir.path() / "cache").string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.err.find("synth_0000.wav") != std::string::npos);
  CHECK(r.out.find("3 spectrograms") != std::string::npos);
}

TEST_CASE("train study 1 smoke writes a seven-row summary") {
  auto& p = prepared();
  REQUIRE(p.prepare.code == cli::kExitOk);
  const fs::path out = p.dir.path() / "study1";
  const auto r = pcgnet_cli({"train", "--study", "1", "--smoke", "--cache", p.cache.string(),
                             "--out", out.string()});
  REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
  CHECK(count_lines(out / "summary.csv") == 1 + 7);
  CHECK(fs::exists(out / "config.txt"));
  CHECK(fs::exists(out / "report.txt"));
  for (int i = 1; i <= 7; ++i) CHECK(fs::exists(out / ("metrics_EXP" + std::to_string(i) + ".csv")));
  CHECK(r.out.find("epochs = 1") != std::string::npos);

  SUBCASE("report re-aggregates the run") {
    const auto rep = pcgnet_cli({"report", "--run", out.string()});
    CHECK(rep.code == cli::kExitOk);
    CHECK(rep.out.find("EXP5 over 1 fold(s)") != std::string::npos);
    CHECK(rep.out.find("reference") != std::string::npos);
  }
}

TEST_CASE("train, evaluate, transfer and predict chain through a BEST checkpoint") {
  auto& p = prepared();
  REQUIRE(p.prepare.code == cli::kExitOk);
  const fs::path out = p.dir.path() / "study2";
  const auto tr = pcgnet_cli({"train", "--study", "2", "--smoke", "--cache", p.cache.string(),
                              "--out", out.string()});
  REQUIRE_MESSAGE(tr.code == cli::kExitOk, tr.err);
  const fs::path best = out / "best_BEST.pcgm";
  REQUIRE(fs::exists(best));

  SUBCASE("evaluate prints one aggregate block") {
    const auto ev = pcgnet_cli({"evaluate", "--smoke", "--checkpoint", best.string(), "--cache",
                                p.cache.string()});
    REQUIRE_MESSAGE(ev.code == cli::kExitOk, ev.err);
    CHECK(ev.out.find("confusion: tp=") != std::string::npos);
    CHECK(ev.out.find("items: 12 (6 normal / 6 abnormal)") != std::string::npos);
    std::size_t blocks = 0;
    for (auto pos = ev.out.find("accuracy"); pos != std::string::npos; pos = ev.out.find("accuracy", pos + 1)) ++blocks;
    CHECK(blocks == 1);
  }

  SUBCASE("transfer echoes the frozen set verbatim") {
    const auto t = pcgnet_cli({"transfer", "--smoke", "--source", best.string(), "--cache",
                               p.cache.string(), "--freeze", "conv1,conv2,conv3", "--out",
                               (p.dir.path() / "study3").string()});
    REQUIRE_MESSAGE(t.code == cli::kExitOk, t.err);
    CHECK(t.out.find("freeze = conv1,conv2,conv3") != std::string::npos);
    CHECK(t.out.find("learning_rate = 0.0001") != std::string::npos);
  }

  SUBCASE("transfer rejects an unknown layer") {
    const auto t = pcgnet_cli({"transfer", "--smoke", "--source", best.string(), "--cache",
                               p.cache.string(), "--freeze", "conv9", "--out",
                               (p.dir.path() / "bad").string()});
    CHECK(t.code == cli::kExitUsage);
  }

  SUBCASE("predict on a 7 s recording is a data-contract error") {
    write_synth_wav(p.dir.path() / "short.wav", 7.0, Label::Normal, 1);
    const auto pr = pcgnet_cli({"predict", "--checkpoint", best.string(), "--wav",
                                (p.dir.path() / "short.wav").string()});
    CHECK(pr.code == cli::kExitDataContract);
    CHECK(pr.err.find("8 s") != std::string::npos);
  }

  SUBCASE("predict on a 16.5 s recording scores two segments") {
    write_synth_wav(p.dir.path() / "long.wav", 16.5, Label::Abnormal, 2);
    const auto pr = pcgnet_cli({"predict", "--checkpoint", best.string(), "--wav",
                                (p.dir.path() / "long.wav").string()});
    REQUIRE_MESSAGE(pr.code == cli::kExitOk, pr.err);
    CHECK(pr.out.find("segment 0:") != std::string::npos);
    CHECK(pr.out.find("segment 1:") != std::string::npos);
    CHECK(pr.out.find("segment 2:") == std::string::npos);
    CHECK(pr.out.find("verdict: ") != std::string::npos);
  }

  SUBCASE("an all-zero model predicts 0.5 everywhere and ties go abnormal") {
    auto ckpt = nn::load_checkpoint(best);
    for (auto& t : ckpt.tensors) std::fill(t.values.begin(), t.values.end(), 0.0f);
    const fs::path zero = p.dir.path() / "zero.pcgm";
    nn::save_checkpoint(zero, ckpt);
    write_synth_wav(p.dir.path() / "long.wav", 16.5, Label::Abnormal, 2);
    const auto pr = pcgnet_cli({"predict", "--checkpoint", zero.string(), "--wav",
                                (p.dir.path() / "long.wav").string()});
    REQUIRE_MESSAGE(pr.code == cli::kExitOk, pr.err);
    CHECK(pr.out.find("segment 0: p(abnormal) = 0.5000") != std::string::npos);
    CHECK(pr.out.find("segment 1: p(abnormal) = 0.5000") != std::string::npos);
    CHECK(pr.out.find("verdict: abnormal") != std::string::npos);
  }
}

TEST_CASE("missing checkpoint or cache is a usage error") {
  testing::TempDir dir{"cli"};
  CHECK(pcgnet_cli({"evaluate", "--checkpoint", (dir.path() / "nope.pcgm").string(), "--cache",
                    dir.path().string()})
            .code == cli::kExitUsage);
  CHECK(pcgnet_cli({"train", "--cache", (dir.path() / "nothing").string()}).code == cli::kExitUsage);
}

TEST_CASE("configuration precedence: command line > environment > file > default") {
  auto& p = prepared();
  REQUIRE(p.prepare.code == cli::kExitOk);
  testing::TempDir dir{"cli"};
  const fs::path cfg = dir.path() / "run.cfg";
  std::ofstream(cfg) << "# smoke settings\nbatch_size = 4\nthreshold=0.7\ncache = /does/not/exist\n";

  ::setenv("PCGNET_CACHE_DIR", p.cache.string().c_str(), 1);
  const auto a = pcgnet_cli({"train", "--smoke", "--preset", "EXP1", "--config", cfg.string(),
                             "--threshold", "0.6", "--out", (dir.path() / "a").string()});
  ::unsetenv("PCGNET_CACHE_DIR");
  REQUIRE_MESSAGE(a.code == cli::kExitOk, a.err);
  CHECK(a.out.find("batch_size = 4") != std::string::npos);  // file beats default
  CHECK(a.out.find("threshold = 0.6") != std::string::npos);  // command line beats file
  CHECK(a.out.find("cache = " + p.cache.string()) != std::string::npos);  // environment beats file

  std::ofstream(cfg, std::ios::app) << "no_such_key = 1\n";
  CHECK(pcgnet_cli({"train", "--smoke", "--config", cfg.string()}).code == cli::kExitUsage);
}
