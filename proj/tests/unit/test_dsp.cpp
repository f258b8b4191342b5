#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "pcgnet/dsp.hpp"
#include "pcgnet/errors.hpp"
#include "pcgnet/rng.hpp"
#include "pcgnet/synth.hpp"
#include "test_support.hpp"

using namespace pcgnet;
using pcgnet::testing::TempDir;

namespace {

double db(double mag) { return 20.0 * std::log10(mag); }

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

AudioRecording at_2000(std::vector<double> x, Label label = Label::Normal) {
  AudioRecording r;
  r.sample_rate = 2000;
  r.samples = std::move(x);
  r.label = label;
  r.source_id = "rec";
  return r;
}

}  // namespace

TEST_CASE("band-pass design: structure and cutoffs") {
  const auto f = design_bandpass();
  CHECK(f.design().order == 4);
  CHECK(f.design().low_hz == 20.0);
  CHECK(f.design().high_hz == 400.0);
  CHECK(f.design().fs == 2000.0);
  CHECK(f.sections().size() == 4);

  CHECK(std::abs(db(f.magnitude(20.0)) + 3.0103) < 0.1);
  CHECK(std::abs(db(f.magnitude(400.0)) + 3.0103) < 0.1);
  CHECK(f.magnitude(20.0) == doctest::Approx(0.7071).epsilon(0.01));
  CHECK(f.magnitude(0.0) < 1e-12);
  CHECK(f.magnitude(1000.0) < 1e-12);
  CHECK(f.max_pole_radius() < 1.0);
  for (const auto& s : f.sections()) {
    for (auto p : s.poles()) CHECK(std::abs(p) < 1.0);
  }
}

TEST_CASE("band-pass design matches an independent reference design") {
  // Magnitudes and pole radii of the same prototype-order-4 Butterworth
  // band-pass computed with an external filter-design package.
  struct Point {
    double hz, mag;
  };
  const Point ref[] = {{5, 0.0033045104730730123},  {10, 0.05455916218223298},
                       {20, 0.7071067811865626},    {50, 0.9999633950952614},
                       {100, 0.999999999999983},    {200, 0.9998378440906577},
                       {300, 0.9806254668786094},   {400, 0.7071067811865477},
                       {600, 0.06812840172407622},  {900, 0.0001472567233947772}};
  const auto f = design_bandpass();
  for (const auto& p : ref) {
    INFO("hz = " << p.hz);
    CHECK(f.magnitude(p.hz) == doctest::Approx(p.mag).epsilon(1e-9));
  }
  std::vector<double> radii;
  for (const auto& s : f.sections()) {
    for (auto p : s.poles()) radii.push_back(std::abs(p));
  }
  std::sort(radii.begin(), radii.end());
  const double ref_radii[] = {0.2929413920904587, 0.2929413920904587, 0.7049906658079932,
                              0.7049906658079932, 0.9401273621363041, 0.9401273621363041,
                              0.977741789735235,  0.977741789735235};
  for (std::size_t i = 0; i < 8; ++i) CHECK(radii[i] == doctest::Approx(ref_radii[i]).epsilon(1e-9));
}

TEST_CASE("band-pass peak lies near the geometric centre") {
  const auto f = design_bandpass();
  double best_hz = 0, best = 0;
  for (int hz = 0; hz <= 1000; ++hz) {
    const double m = f.magnitude(hz);
    if (m > best) {
      best = m;
      best_hz = hz;
    }
  }
  CHECK(best_hz >= 80);
  CHECK(best_hz <= 100);
  CHECK(best >= 0.999);
}

TEST_CASE("band-pass magnitude is monotone in both stopbands") {
  const auto f = design_bandpass();
  for (double hz = 0.5; hz <= 20.0; hz += 0.5) CHECK(f.magnitude(hz) >= f.magnitude(hz - 0.5));
  for (double hz = 400.5; hz <= 1000.0; hz += 0.5) CHECK(f.magnitude(hz) <= f.magnitude(hz - 0.5));
}

TEST_CASE("design_bandpass rejects invalid bands") {
  for (auto d : {BandpassDesign{4, 0, 400, 2000}, BandpassDesign{4, 400, 20, 2000},
                 BandpassDesign{4, 20, 1000, 2000}, BandpassDesign{4, 20, 20, 2000},
                 BandpassDesign{4, -5, 400, 2000}}) {
    CHECK_THROWS_AS(design_bandpass(d), Error);
  }
  try {
    design_bandpass({4, 20, 1200, 2000});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidBand);
  }
}

TEST_CASE("apply_filter: zeros, rate check, length") {
  const auto f = design_bandpass();
  const auto z = apply_filter(f, at_2000(std::vector<double>(5000, 0.0)));
  CHECK(z.samples.size() == 5000);
  CHECK(std::all_of(z.samples.begin(), z.samples.end(), [](double v) { return v == 0.0; }));

  AudioRecording wrong = at_2000({1, 2, 3});
  wrong.sample_rate = 4000;
  try {
    apply_filter(f, wrong);
    FAIL("expected RateMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RateMismatch);
  }
}

TEST_CASE("apply_filter: 200 Hz steady-state gain equals |H(200)|") {
  const auto f = design_bandpass();
  const auto y = f.filter(pcgnet::testing::sine(200.0, 2000.0, 16000));
  double peak = 0.0;
  for (std::size_t i = 1000; i < y.size(); ++i) peak = std::max(peak, std::abs(y[i]));
  CHECK(peak == doctest::Approx(f.magnitude(200.0)).epsilon(0.01));
}

TEST_CASE("apply_filter: impulse response decays and matches the reference") {
  const auto f = design_bandpass();
  std::vector<double> x(16000, 0.0);
  x[0] = 1.0;
  const auto y = f.filter(x);
  const double ref_head[] = {0.03960266, 0.18686792, 0.33975697, 0.25400127, -0.04618039,
                             -0.25284885};
  for (std::size_t i = 0; i < 6; ++i) CHECK(y[i] == doctest::Approx(ref_head[i]).epsilon(1e-6));
  CHECK(std::abs(y[15999]) < 1e-6);
  const double energy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
  CHECK(energy == doctest::Approx(0.3826152373409452).epsilon(1e-9));
}

TEST_CASE("apply_filter is linear and time invariant") {
  const auto f = design_bandpass();
  const auto x = random_signal(6000, 1);
  const auto u = random_signal(6000, 2);
  const double a = 0.7, b = -0.3;
  std::vector<double> mix(6000);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + b * u[i];
  const auto fx = f.filter(x), fu = f.filter(u), fm = f.filter(mix);
  double worst = 0;
  for (std::size_t i = 0; i < mix.size(); ++i) worst = std::max(worst, std::abs(fm[i] - (a * fx[i] + b * fu[i])));
  CHECK(worst < 1e-6);

  // Delay by 100 samples: outputs agree sample for sample after the shift
  // since the filter starts from rest.
  const std::size_t d = 100;
  std::vector<double> shifted(6000 + d, 0.0);
  std::copy(x.begin(), x.end(), shifted.begin() + d);
  const auto fs = f.filter(shifted);
  worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(fs[i + d] - fx[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("segment: count law and boundaries") {
  CHECK(segment(at_2000(std::vector<double>(16000, 0.1))).size() == 1);
  CHECK(segment(at_2000(std::vector<double>(15999, 0.1))).empty());
  std::vector<double> x(40000);
  std::iota(x.begin(), x.end(), 0.0);
  const auto segs = segment(at_2000(x, Label::Abnormal));
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].samples.front() == 0.0);
  CHECK(segs[0].samples.back() == 15999.0);
  CHECK(segs[1].samples.front() == 16000.0);
  CHECK(segs[1].samples.back() == 31999.0);
  CHECK(segs[1].index == 1);
  CHECK(segs[1].label == Label::Abnormal);
  CHECK(segs[1].id() == "rec_1");

  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng.below(100000);
    const auto s = segment(at_2000(std::vector<double>(n)));
    CHECK(s.size() == n / kSegmentLength);
    for (const auto& seg : s) CHECK(seg.samples.size() == kSegmentLength);
  }

  AudioRecording wrong = at_2000(std::vector<double>(20000));
  wrong.sample_rate = 4000;
  CHECK_THROWS_AS(segment(wrong), Error);
}

TEST_CASE("segment cache round trip") {
  TempDir dir("seg");
  Segment s;
  s.samples = random_signal(kSegmentLength, 4);
  for (auto& v : s.samples) v = static_cast<float>(v);  // stored as float32
  s.parent_id = "a0001";
  s.index = 3;
  s.label = Label::Abnormal;
  CHECK(segment_filename(s) == "a0001_3.seg");
  write_segment(dir / segment_filename(s), s);
  const auto back = read_segment(dir / segment_filename(s));
  CHECK(back.samples == s.samples);
  CHECK(back.parent_id == "a0001");
  CHECK(back.index == 3);
  CHECK(back.label == Label::Abnormal);
}

TEST_CASE("preprocess_dataset: labels propagate, short and broken files are skipped") {
  TempDir dir("pre");
  auto manifest = write_synth_corpus(dir.path(), 2, 17, {.duration_seconds = 17.0});
  // A 7-second recording is discarded; an unreadable one is reported.
  write_wav(dir / "short.wav", std::vector<double>(7 * 4000, 0.1), 4000);
  std::ofstream(dir / "broken.wav") << "not a wav";
  manifest.add({dir / "short.wav", Label::Normal, DatasetTag::PhysioNet, "short"});
  manifest.add({dir / "broken.wav", Label::Abnormal, DatasetTag::PhysioNet, "broken"});

  const auto r = preprocess_dataset(manifest, 2);
  CHECK(r.segments.size() == 8);  // 4 recordings x floor(17 / 8)
  CHECK(r.recordings_used == 4);
  CHECK(r.recordings_too_short == 1);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].path.filename() == "broken.wav");
  std::size_t abnormal = 0;
  for (const auto& s : r.segments) abnormal += s.label == Label::Abnormal;
  CHECK(abnormal == 4);  // class ratio of surviving recordings is preserved

  CHECK(preprocess_dataset(DatasetManifest{}).segments.empty());
}
