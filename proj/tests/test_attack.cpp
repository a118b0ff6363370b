// Copyright 2025 The ssdrt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ssdrt/attack.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "ssdrt/corpus.hpp"
#include "ssdrt/detector.hpp"
#include "ssdrt/error.hpp"
#include "ssdrt/rng.hpp"

using namespace ssdrt;

namespace {

// Analytically tractable detector: mean-pool the waveform, then logits
// (a*m, b*m). With a > 0 > b, pushing the mean up pushes p_real up.
DetectorModel make_mean_model(double a, double b, int input_length) {
  DetectorModel m;
  m.arch_id = ArchId::ConvS;
  m.sample_rate = kSampleRate;
  m.input_length = input_length;
  m.trunk = {AvgPoolGlobalSpec{}};
  m.head = {DenseSpec{1, 2}, SoftmaxCESpec{}};
  m.trunk_params.resize(1);
  m.head_params.resize(2);
  m.head_params[0].weight = Tensor::zeros({2, 1});
  m.head_params[0].weight.data = {a, b};
  m.head_params[0].bias = Tensor::zeros({2});
  return m;
}

Waveform flat_wave(int n, double value) {
  Waveform w;
  w.sample_rate = kSampleRate;
  w.samples.assign(size_t(n), value);
  return w;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double p_real_of_mean(double a, double b, double m) {
  return 1.0 / (1.0 + std::exp((b - a) * m));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Thresholded monotone black-box scorer over x[0].
ScoreFn threshold_scorer(double tau, double slope) {
  return [tau, slope](const std::vector<double>& x) {
    Score s;
    s.p_real = 1.0 / (1.0 + std::exp(-slope * (x[0] - tau)));
    s.p_fake = 1.0 - s.p_real;
    s.label = s.p_real > s.p_fake ? Label::Real : Label::Fake;
    return s;
  };
}

ScoreFn counted(const ScoreFn& inner, int* counter) {
  return [inner, counter](const std::vector<double>& x) {
    ++*counter;
    return inner(x);
  };
}

}  // namespace

TEST_SUITE_BEGIN("attack");

TEST_CASE("white-box configs are validated") {
  DetectorModel m = make_mean_model(4.0, -4.0, 8);
  Waveform w = flat_wave(8, -0.1);
  WhiteBoxConfig cfg;
  cfg.alpha = -1.0;
  CHECK_THROWS_AS(pgd_attack(m, w, cfg), Error);
  cfg = WhiteBoxConfig{};
  cfg.epsilon = -0.1;
  CHECK_THROWS_AS(pgd_attack(m, w, cfg), Error);
  cfg = WhiteBoxConfig{};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(pgd_attack(m, w, cfg), Error);
  cfg = WhiteBoxConfig{};
  cfg.method = WhiteBoxConfig::Method::IFGSM;
  CHECK_THROWS_AS(pgd_attack(m, w, cfg), Error);
  cfg.method = WhiteBoxConfig::Method::PGD;
  CHECK_THROWS_AS(ifgsm_attack(m, w, cfg), Error);
  Waveform bad = flat_wave(7, 0.0);
  CHECK_THROWS_AS(pgd_attack(m, bad, WhiteBoxConfig{}), Error);
}

TEST_CASE("pgd single step matches the closed form") {
  const double a = 4.0, b = -4.0;
  const int n = 8;
  DetectorModel m = make_mean_model(a, b, n);
  Waveform w = flat_wave(n, -0.1);
  WhiteBoxConfig cfg;
  cfg.alpha = 1e-3;
  cfg.epsilon = 0.004;
  cfg.max_iters = 1;

  // Gradient of -log p_real w.r.t. each sample is -(p_fake)*(a-b)/n.
  double p0 = p_real_of_mean(a, b, mean_of(w.samples));
  double expected = cfg.alpha * (1.0 - p0) * (a - b) / n;
  REQUIRE(expected < cfg.epsilon);

  AttackResult res = pgd_attack(m, w, cfg);
  REQUIRE(int(res.delta.size()) == n);
  CHECK(res.steps_used == 1);
  for (double d : res.delta)
    CHECK(d == doctest::Approx(expected).epsilon(1e-9));

  // The same step must agree with central finite differences on the loss.
  const double h = 1e-6;
  auto loss_at = [&](double mean_val) {
    return -std::log(p_real_of_mean(a, b, mean_val));
  };
  double fd = (loss_at(mean_of(w.samples) + h / n) -
               loss_at(mean_of(w.samples) - h / n)) /
              (2.0 * h);
  CHECK(res.delta[0] == doctest::Approx(-cfg.alpha * fd).epsilon(1e-6));
}

TEST_CASE("ifgsm steps are exactly plus or minus alpha") {
  DetectorModel m = make_mean_model(4.0, -4.0, 8);
  Waveform w = flat_wave(8, -0.3);
  WhiteBoxConfig cfg;
  cfg.method = WhiteBoxConfig::Method::IFGSM;
  cfg.alpha = 1e-3;
  cfg.epsilon = 0.004;
  cfg.max_iters = 1;
  AttackResult res = ifgsm_attack(m, w, cfg);
  for (double d : res.delta) CHECK(d == cfg.alpha);

  // Step size at or above the budget pins every coordinate to the ball.
  cfg.alpha = 0.01;
  AttackResult clipped = ifgsm_attack(m, w, cfg);
  for (double d : clipped.delta) CHECK(d == cfg.epsilon);
}

TEST_CASE("a zero epsilon ball forces delta to zero") {
  DetectorModel m = make_mean_model(4.0, -4.0, 8);
  WhiteBoxConfig cfg;
  cfg.epsilon = 0.0;
  cfg.max_iters = 3;

  Waveform fake_side = flat_wave(8, -0.2);
  AttackResult res = pgd_attack(m, fake_side, cfg);
  for (double d : res.delta) CHECK(d == 0.0);
  CHECK(!res.success);
  CHECK(res.steps_used == 3);

  Waveform real_side = flat_wave(8, 0.2);
  AttackResult res2 = pgd_attack(m, real_side, cfg);
  for (double d : res2.delta) CHECK(d == 0.0);
  CHECK(res2.success);
  CHECK(res2.steps_used == 1);
}

TEST_CASE("zero alpha leaves the signal untouched") {
  DetectorModel m = make_mean_model(4.0, -4.0, 8);
  WhiteBoxConfig cfg;
  cfg.alpha = 0.0;
  cfg.max_iters = 4;
  AttackResult res = pgd_attack(m, flat_wave(8, -0.2), cfg);
  for (double d : res.delta) CHECK(d == 0.0);
  CHECK(!res.success);
  CHECK(res.steps_used == 4);
}

TEST_CASE("success is only declared after an update") {
  // Already-Real input: the loop still runs one update before the success
  // check fires.
  DetectorModel m = make_mean_model(4.0, -4.0, 8);
  WhiteBoxConfig cfg;
  cfg.max_iters = 50;
  AttackResult res = pgd_attack(m, flat_wave(8, 0.5), cfg);
  CHECK(res.success);
  CHECK(res.steps_used == 1);
  CHECK(res.final_score.label == Label::Real);
}

TEST_CASE("pgd converges on the mean model and verifies post hoc") {
  DetectorModel m = make_mean_model(4.0, -4.0, 8);
  Waveform w = flat_wave(8, -0.005);
  WhiteBoxConfig cfg;
  cfg.alpha = 0.01;
  cfg.epsilon = 0.01;
  cfg.max_iters = 50;
  AttackResult res = pgd_attack(m, w, cfg);
  CHECK(res.success);
  CHECK(res.steps_used >= 1);
  CHECK(max_abs(res.delta) <= cfg.epsilon);
  std::vector<double> x = w.samples;
  for (size_t i = 0; i < x.size(); ++i) x[i] += res.delta[i];
  CHECK(score_raw(m, x).label == Label::Real);
  CHECK(res.final_score.p_real > 0.5);
}

TEST_CASE("valid-range clamping keeps the iterate inside [-1, 1]") {
  DetectorModel m = make_mean_model(4.0, -4.0, 8);
  Waveform w = flat_wave(8, 0.9995);  // Real side; gradient still pushes up
  WhiteBoxConfig cfg;
  cfg.method = WhiteBoxConfig::Method::IFGSM;
  cfg.alpha = 0.01;
  cfg.epsilon = 0.02;
  cfg.max_iters = 1;
  AttackResult res = ifgsm_attack(m, w, cfg);
  double headroom = 1.0 - w.samples[0];
  for (double d : res.delta) CHECK(d == headroom);

  cfg.clamp_valid_range = false;
  AttackResult loose = ifgsm_attack(m, w, cfg);
  for (double d : loose.delta) CHECK(d == cfg.alpha);
}

TEST_CASE("white-box attacks on a real detector stay in budget") {
  DetectorModel m = make_model(ArchId::ConvS, 31);
  ClipSpec spec;
  spec.label = Label::Fake;
  spec.seed = 404;
  spec.f0 = 150.0;
  spec.artifact_profile = ArtifactProfile::SpectralNotch;
  Waveform w = synth_clip(spec, kSampleRate);
  WhiteBoxConfig cfg;
  cfg.max_iters = 10;
  AttackResult r1 = pgd_attack(m, w, cfg);
  AttackResult r2 = pgd_attack(m, w, cfg);
  CHECK(r1.delta == r2.delta);
  CHECK(r1.success == r2.success);
  CHECK(r1.steps_used == r2.steps_used);
  CHECK(max_abs(r1.delta) <= cfg.epsilon);
  CHECK(r1.steps_used <= cfg.max_iters);
}

TEST_CASE("simba configs are validated") {
  SimbaConfig cfg;
  std::vector<double> s(16, 0.0);
  auto sc = threshold_scorer(0.0, 1.0);
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(simba_attack_with(sc, 16, s, cfg), Error);
  cfg = SimbaConfig{};
  cfg.q = 0;
  CHECK_THROWS_AS(simba_attack_with(sc, 16, s, cfg), Error);
  cfg = SimbaConfig{};
  cfg.q = 17;
  CHECK_THROWS_AS(simba_attack_with(sc, 16, s, cfg), Error);
  cfg = SimbaConfig{};
  cfg.max_queries = 0;
  CHECK_THROWS_AS(simba_attack_with(sc, 16, s, cfg), Error);
  cfg = SimbaConfig{};
  cfg.epsilon = -1.0;
  CHECK_THROWS_AS(simba_attack_with(sc, 16, s, cfg), Error);
  cfg = SimbaConfig{};
  CHECK_THROWS_AS(simba_attack_with(sc, 8, s, cfg), Error);
}

TEST_CASE("simba against a flat scorer burns the whole budget") {
  ScoreFn sc = [](const std::vector<double>&) {
    Score s;
    s.p_real = 0.4;
    s.p_fake = 0.6;
    s.label = Label::Fake;
    return s;
  };
  std::vector<double> s(32, 0.0);
  SimbaConfig cfg;
  cfg.q = 4;
  cfg.alpha = 0.01;
  cfg.epsilon = 0.05;
  for (int budget : {2, 7, 10, 11}) {
    int evals = 0;
    cfg.max_queries = budget;
    AttackResult res = simba_attack_with(counted(sc, &evals), 32, s, cfg);
    CHECK(!res.success);
    CHECK(res.steps_used == budget);
    CHECK(evals == budget);
    REQUIRE(res.accepted_p_trace.size() == 1);
    CHECK(res.accepted_p_trace[0] == 0.4);
    for (double d : res.delta) CHECK(d == 0.0);
  }
}

TEST_CASE("a budget of one only buys the initial score") {
  int evals = 0;
  SimbaConfig cfg;
  cfg.q = 1;
  cfg.max_queries = 1;
  std::vector<double> s(4, 0.0);
  AttackResult res =
      simba_attack_with(counted(threshold_scorer(1.0, 4.0), &evals), 4, s, cfg);
  CHECK(evals == 1);
  CHECK(res.steps_used == 1);
  CHECK(!res.success);
  CHECK(res.accepted_p_trace.size() == 1);
}

TEST_CASE("an already-Real input succeeds on the cached score alone") {
  int evals = 0;
  SimbaConfig cfg;
  cfg.q = 1;
  cfg.max_queries = 100;
  std::vector<double> s(4, 0.5);
  AttackResult res = simba_attack_with(
      counted(threshold_scorer(0.0, 10.0), &evals), 4, s, cfg);
  CHECK(res.success);
  CHECK(evals == 1);
  CHECK(res.steps_used == 1);
  for (double d : res.delta) CHECK(d == 0.0);
}

TEST_CASE("simba climbs a monotone single-coordinate scorer") {
  // p_real depends only on x[0], so every trial improves in one of the two
  // directions; crossing tau needs three accepted +alpha steps.
  int evals = 0;
  SimbaConfig cfg;
  cfg.q = 1;
  cfg.alpha = 0.01;
  cfg.epsilon = 0.05;
  cfg.max_queries = 50;
  std::vector<double> s(1, 0.0);
  AttackResult res = simba_attack_with(
      counted(threshold_scorer(0.025, 200.0), &evals), 1, s, cfg);
  CHECK(res.success);
  CHECK(res.delta[0] == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(res.steps_used == evals);
  CHECK(res.steps_used >= 4);   // initial + one eval per acceptance
  CHECK(res.steps_used <= 7);   // initial + two evals per acceptance
  REQUIRE(res.accepted_p_trace.size() == 4);
  for (size_t i = 1; i < res.accepted_p_trace.size(); ++i)
    CHECK(res.accepted_p_trace[i] > res.accepted_p_trace[i - 1]);
  CHECK(res.final_score.label == Label::Real);
}

TEST_CASE("acceptance clipping recomputes and can roll back") {
  // alpha overshoots the ball: the clipped delta must be re-verified with a
  // counted query before it can be accepted.
  int evals = 0;
  SimbaConfig cfg;
  cfg.q = 1;
  cfg.alpha = 0.01;
  cfg.epsilon = 0.003;
  cfg.max_queries = 50;
  std::vector<double> s(1, 0.0);
  AttackResult res = simba_attack_with(
      counted(threshold_scorer(0.001, 500.0), &evals), 1, s, cfg);
  CHECK(res.success);
  CHECK(res.delta[0] == cfg.epsilon);
  CHECK(res.steps_used == evals);
  CHECK(res.steps_used <= 4);  // initial, proposal (maybe both signs), recompute
  REQUIRE(res.accepted_p_trace.size() == 2);
  CHECK(res.accepted_p_trace[1] > res.accepted_p_trace[0]);

  // Exhausting the budget mid-recompute rolls the acceptance back.
  evals = 0;
  cfg.max_queries = 2;
  AttackResult tight = simba_attack_with(
      counted(threshold_scorer(0.001, 500.0), &evals), 1, s, cfg);
  CHECK(evals == tight.steps_used);
  CHECK(tight.steps_used == 2);
  CHECK(tight.accepted_p_trace.size() == 1);
  CHECK(tight.delta[0] == 0.0);
  CHECK(!tight.success);
}

TEST_CASE("simba accounting is exact on a noisy landscape") {
  // Deterministic pseudo-random scorer: improvements, rejections, clipping
  // and rollbacks all occur; the counted evals must equal steps_used.
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    ScoreFn sc = [](const std::vector<double>& x) {
      double acc = 0.0;
      for (size_t i = 0; i < x.size(); ++i)
        acc += std::sin(37.0 * x[i] + double(i));
      Score s;
      s.p_real = 1.0 / (1.0 + std::exp(-0.3 * acc));
      s.p_fake = 1.0 - s.p_real;
      s.label = s.p_real > s.p_fake ? Label::Real : Label::Fake;
      return s;
    };
    int evals = 0;
    SimbaConfig cfg;
    cfg.q = 5;
    cfg.alpha = 0.02;
    cfg.epsilon = 0.04;
    cfg.max_queries = 300;
    cfg.seed = seed;
    std::vector<double> s(24, -0.1);
    AttackResult res = simba_attack_with(counted(sc, &evals), 24, s, cfg);
    CHECK(evals == res.steps_used);
    CHECK(res.steps_used <= cfg.max_queries);
    CHECK(max_abs(res.delta) <= cfg.epsilon);
    REQUIRE(!res.accepted_p_trace.empty());
    for (size_t i = 1; i < res.accepted_p_trace.size(); ++i)
      CHECK(res.accepted_p_trace[i] > res.accepted_p_trace[i - 1]);
    if (res.success) {
      CHECK(res.final_score.label == Label::Real);
      CHECK(res.final_score.p_real ==
            res.accepted_p_trace[res.accepted_p_trace.size() - 1]);
    }
  }
}

TEST_CASE("simba is deterministic in its seed") {
  SimbaConfig cfg;
  cfg.q = 8;
  cfg.alpha = 0.005;
  cfg.epsilon = 0.02;
  cfg.max_queries = 120;
  std::vector<double> s(64, -0.05);
  ScoreFn sc = threshold_scorer(0.2, 30.0);
  AttackResult a = simba_attack_with(sc, 64, s, cfg);
  AttackResult b = simba_attack_with(sc, 64, s, cfg);
  CHECK(a.delta == b.delta);
  CHECK(a.accepted_p_trace == b.accepted_p_trace);
  CHECK(a.steps_used == b.steps_used);
  cfg.seed = 99;
  AttackResult c = simba_attack_with(sc, 64, s, cfg);
  CHECK(a.delta != c.delta);
}

TEST_CASE("the model-backed simba wrapper validates length") {
  DetectorModel m = make_mean_model(4.0, -4.0, 16);
  Waveform w = flat_wave(8, 0.0);
  CHECK_THROWS_AS(simba_attack(m, w, SimbaConfig{}), Error);
  Waveform ok = flat_wave(16, -0.01);
  SimbaConfig cfg;
  cfg.q = 4;
  cfg.alpha = 0.02;
  cfg.epsilon = 0.05;
  cfg.max_queries = 200;
  AttackResult res = simba_attack(m, ok, cfg);
  CHECK(res.success);  // mean model is trivially climbable
  CHECK(max_abs(res.delta) <= cfg.epsilon);
}

TEST_SUITE_END();
