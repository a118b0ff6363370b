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

#include "ssdrt/harness.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "ssdrt/error.hpp"
#include "ssdrt/wav.hpp"
#include "ssdrt/quality.hpp"

using namespace ssdrt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / "ssdrt_harness_tests";
  fs::create_directories(d);
  return d;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(bool(f));
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

// Mean-threshold detector sized for real clips: Real iff sign * mean > 0.
DetectorModel mean_model(double sign) {
  DetectorModel m;
  m.arch_id = ArchId::ConvS;
  m.sample_rate = kSampleRate;
  m.input_length = kClipLength;
  m.trunk = {AvgPoolGlobalSpec{}};
  m.head = {DenseSpec{1, 2}, SoftmaxCESpec{}};
  m.trunk_params.resize(1);
  m.head_params.resize(2);
  m.head_params[0].weight = Tensor::zeros({2, 1});
  m.head_params[0].weight.data = {4.0 * sign, -4.0 * sign};
  m.head_params[0].bias = Tensor::zeros({2});
  return m;
}

bool outcome_equal(const ClipOutcome& a, const ClipOutcome& b) {
  return a.axis_value == b.axis_value && a.model == b.model &&
         a.repeat == b.repeat && a.clip_seed == b.clip_seed &&
         a.success == b.success && a.steps_used == b.steps_used &&
         a.linf == b.linf && a.vqs == b.vqs && a.snr_db == b.snr_db &&
         a.delta_linf == b.delta_linf;
}

bool result_equal(const SweepResult& a, const SweepResult& b) {
  if (a.records.size() != b.records.size() || a.clips.size() != b.clips.size())
    return false;
  for (size_t i = 0; i < a.records.size(); ++i) {
    const SweepRecord &x = a.records[i], &y = b.records[i];
    if (x.axis_value != y.axis_value || x.model != y.model ||
        x.asr_avg != y.asr_avg || x.asr_std != y.asr_std ||
        x.vqs_avg != y.vqs_avg || x.vqs_std != y.vqs_std ||
        x.snr_avg != y.snr_avg)
      return false;
  }
  for (size_t i = 0; i < a.clips.size(); ++i)
    if (!outcome_equal(a.clips[i], b.clips[i])) return false;
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("attack and axis names round trip") {
  for (AttackKind k : {AttackKind::PGD, AttackKind::IFGSM, AttackKind::SimBA})
    CHECK(attack_kind_from_string(to_string(k)) == k);
  for (SweepAxis a :
       {SweepAxis::step_size, SweepAxis::epsilon, SweepAxis::iterations,
        SweepAxis::batch_size, SweepAxis::queries})
    CHECK(sweep_axis_from_string(to_string(a)) == a);
  CHECK_THROWS_AS(attack_kind_from_string("fgsm"), Error);
  CHECK_THROWS_AS(sweep_axis_from_string("stepsize"), Error);
}

TEST_CASE("axis columns use the figure axis abbreviations") {
  CHECK(std::string(axis_column(SweepAxis::step_size)) == "lr");
  CHECK(std::string(axis_column(SweepAxis::epsilon)) == "eps");
  CHECK(std::string(axis_column(SweepAxis::iterations)) == "iter");
  CHECK(std::string(axis_column(SweepAxis::batch_size)) == "bs");
  CHECK(std::string(axis_column(SweepAxis::queries)) == "query");
}

TEST_CASE("default grids match the figure ticks") {
  CHECK(default_axis_values(AttackKind::PGD, SweepAxis::step_size) ==
        std::vector<double>{1e-5, 1e-4, 1e-3, 1e-2});
  CHECK(default_axis_values(AttackKind::IFGSM, SweepAxis::step_size) ==
        std::vector<double>{1e-5, 1e-4, 1e-3, 1e-2});
  CHECK(default_axis_values(AttackKind::SimBA, SweepAxis::step_size) ==
        std::vector<double>{0.001, 0.003, 0.005, 0.007});
  CHECK(default_axis_values(AttackKind::PGD, SweepAxis::epsilon) ==
        std::vector<double>{0.001, 0.002, 0.003, 0.004});
  CHECK(default_axis_values(AttackKind::PGD, SweepAxis::iterations) ==
        std::vector<double>{50, 100, 150, 200});
  CHECK(default_axis_values(AttackKind::SimBA, SweepAxis::batch_size) ==
        std::vector<double>{500, 1000, 2000, 4000});
  CHECK(default_axis_values(AttackKind::SimBA, SweepAxis::queries) ==
        std::vector<double>{1000, 2500, 5000, 7500});
}

TEST_CASE("attack_success_rate counts plainly") {
  std::vector<AttackResult> rs(5);
  rs[1].success = true;
  rs[4].success = true;
  CHECK(attack_success_rate(rs) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS_AS(attack_success_rate({}), Error);
}

TEST_CASE("parallel_for covers every index once regardless of jobs") {
  for (int jobs : {1, 4}) {
    std::vector<int> hits(97, 0);
    parallel_for(97, jobs, [&](int i) { hits[size_t(i)] += i + 1; });
    for (int i = 0; i < 97; ++i) CHECK(hits[size_t(i)] == i + 1);
  }
  parallel_for(0, 4, [&](int) { CHECK(false); });
}

TEST_CASE("parallel_for rethrows the first worker exception") {
  CHECK_THROWS_AS(
      parallel_for(50, 4,
                   [](int i) {
                     if (i == 17) throw Error("harness", "probe", "boom");
                   }),
      Error);
  CHECK_THROWS_AS(parallel_for(3, 1,
                               [](int i) {
                                 if (i == 2) throw std::runtime_error("x");
                               }),
                  std::runtime_error);
}

TEST_CASE("run_sweep validates its inputs") {
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  SweepSpec spec;
  spec.models = {ArchId::ConvS};
  spec.manifest = build_manifest(Split::Redteam, 0, 2, 10);
  spec.axis_values = {1e-3};

  SweepSpec bad = spec;
  bad.axis_values.clear();
  CHECK_THROWS_AS(run_sweep(bad, models, 1), Error);

  bad = spec;
  bad.models.clear();
  CHECK_THROWS_AS(run_sweep(bad, models, 1), Error);

  bad = spec;
  bad.repeats = 0;
  CHECK_THROWS_AS(run_sweep(bad, models, 1), Error);

  bad = spec;
  bad.manifest.clips.clear();
  CHECK_THROWS_AS(run_sweep(bad, models, 1), Error);

  bad = spec;
  bad.manifest.clips[0].label = Label::Real;
  bad.manifest.clips[0].artifact_profile = ArtifactProfile::None;
  CHECK_THROWS_AS(run_sweep(bad, models, 1), Error);

  bad = spec;
  bad.models = {ArchId::ConvL};
  CHECK_THROWS_AS(run_sweep(bad, models, 1), Error);
}

TEST_CASE("axis and attack pairings are enforced") {
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  SweepSpec spec;
  spec.models = {ArchId::ConvS};
  spec.manifest = build_manifest(Split::Redteam, 0, 1, 11);

  spec.attack = AttackKind::SimBA;
  spec.axis = SweepAxis::iterations;
  spec.axis_values = {10};
  CHECK_THROWS_AS(run_sweep(spec, models, 1), Error);

  spec.attack = AttackKind::PGD;
  spec.axis = SweepAxis::queries;
  CHECK_THROWS_AS(run_sweep(spec, models, 1), Error);

  spec.attack = AttackKind::IFGSM;
  spec.axis = SweepAxis::batch_size;
  CHECK_THROWS_AS(run_sweep(spec, models, 1), Error);
}

TEST_CASE("a zero step size sweep cell reproduces the original bit-exactly") {
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  SweepSpec spec;
  spec.attack = AttackKind::PGD;
  spec.axis = SweepAxis::step_size;
  spec.axis_values = {0.0, 1e-3};
  spec.models = {ArchId::ConvS};
  spec.manifest = build_manifest(Split::Redteam, 0, 3, 77);
  spec.repeats = 2;
  spec.fixed.wb.max_iters = 3;

  SweepResult res = run_sweep(spec, models, 1);
  REQUIRE(res.records.size() == 2);
  REQUIRE(res.clips.size() == 2 * 1 * 2 * 3);
  CHECK(res.records[0].axis_value == 0.0);
  CHECK(res.records[1].axis_value == 1e-3);

  const DetectorModel& m = models.at(ArchId::ConvS);
  for (const ClipOutcome& c : res.clips) {
    if (c.axis_value != 0.0) continue;
    CHECK(c.linf == 0.0);
    CHECK(c.vqs == 5.0);
    CHECK(c.snr_db == kSnrCapDb);
    CHECK(c.delta_linf == 0.0);
    // Success with a frozen delta is just the detector's verdict on the
    // exported original.
    ClipSpec spec_ci;
    for (const auto& cs : spec.manifest.clips)
      if (cs.seed == c.clip_seed) spec_ci = cs;
    Waveform original =
        quantize_to_grid(synth_clip(spec_ci, spec.manifest.sample_rate));
    CHECK(c.success == (score(m, original).label == Label::Real));
    CHECK((c.steps_used == 3 || c.steps_used == 1));
  }
}

TEST_CASE("sweep outcomes are indexed clip-fastest and repeat stable") {
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  SweepSpec spec;
  spec.attack = AttackKind::IFGSM;
  spec.axis = SweepAxis::iterations;
  spec.axis_values = {1, 3};
  spec.models = {ArchId::ConvS};
  spec.manifest = build_manifest(Split::Redteam, 0, 3, 5150);
  spec.repeats = 2;
  spec.fixed.wb.alpha = 1e-4;

  SweepResult res = run_sweep(spec, models, 1);
  int na = 2, nm = 1, nr = 2, nc = 3;
  REQUIRE(int(res.clips.size()) == na * nm * nr * nc);
  for (int ai = 0; ai < na; ++ai)
    for (int mi = 0; mi < nm; ++mi)
      for (int rep = 0; rep < nr; ++rep)
        for (int ci = 0; ci < nc; ++ci) {
          size_t idx = size_t(((ai * nm + mi) * nr + rep) * nc + ci);
          const ClipOutcome& c = res.clips[idx];
          CHECK(c.axis_value == spec.axis_values[size_t(ai)]);
          CHECK(c.model == ArchId::ConvS);
          CHECK(c.repeat == rep);
          CHECK(c.clip_seed == spec.manifest.clips[size_t(ci)].seed);
          // White-box cells ignore the repeat index entirely.
          if (rep == 1) {
            size_t first = size_t(((ai * nm + mi) * nr + 0) * nc + ci);
            ClipOutcome rep0 = res.clips[first];
            ClipOutcome rep1 = c;
            rep0.repeat = rep1.repeat = 0;
            CHECK(outcome_equal(rep0, rep1));
          }
          // The iterations axis caps steps_used per cell.
          CHECK(c.steps_used <= int(spec.axis_values[size_t(ai)]));
        }
}

TEST_CASE("run_sweep is independent of the job count and rerunnable") {
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  models.emplace(ArchId::ConvM, mean_model(-1.0));
  SweepSpec spec;
  spec.attack = AttackKind::PGD;
  spec.axis = SweepAxis::step_size;
  spec.axis_values = {1e-4, 1e-2};
  spec.models = {ArchId::ConvS, ArchId::ConvM};
  spec.manifest = build_manifest(Split::Redteam, 0, 2, 31);
  spec.repeats = 1;
  spec.fixed.wb.max_iters = 2;

  SweepResult serial = run_sweep(spec, models, 1);
  SweepResult threaded = run_sweep(spec, models, 4);
  SweepResult again = run_sweep(spec, models, 4);
  CHECK(result_equal(serial, threaded));
  CHECK(result_equal(serial, again));
}

TEST_CASE("simba sweeps stop exactly at the queries axis budget") {
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  SweepSpec spec;
  spec.attack = AttackKind::SimBA;
  spec.axis = SweepAxis::queries;
  spec.axis_values = {5, 9};
  spec.models = {ArchId::ConvS};
  spec.manifest = build_manifest(Split::Redteam, 0, 2, 99);
  spec.repeats = 1;
  spec.fixed.sb.q = 2;
  spec.fixed.sb.alpha = 0.001;

  SweepResult res = run_sweep(spec, models, 1);
  for (const ClipOutcome& c : res.clips) {
    int budget = int(c.axis_value);
    if (c.success) {
      CHECK(c.steps_used <= budget);
    } else {
      CHECK(c.steps_used == budget);
    }
    CHECK(c.delta_linf <= spec.fixed.sb.epsilon);
  }
}

TEST_CASE("transfer matrix separates aligned and opposed detectors") {
  // Two mean detectors with opposite signs: an attack crafted on one is a
  // guaranteed miss on the other, so the matrix is the identity.
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  models.emplace(ArchId::ConvM, mean_model(-1.0));
  std::vector<ArchId> ids = {ArchId::ConvS, ArchId::ConvM};
  Manifest manifest = build_manifest(Split::Redteam, 0, 3, 404);

  AttackSettings cfg;
  cfg.kind = AttackKind::IFGSM;
  cfg.wb.alpha = 0.002;
  cfg.wb.epsilon = 0.006;
  cfg.wb.max_iters = 10;

  TransferMatrix m =
      run_transfer(cfg, ids, models, manifest, "redteam", 1, 1);
  CHECK(m.attack == AttackKind::IFGSM);
  CHECK(m.dataset_tag == "redteam");
  REQUIRE(m.models == ids);
  REQUIRE(m.cells.size() == 4);
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.at(1, 1) == 1.0);
  CHECK(m.at(0, 1) == 0.0);
  CHECK(m.at(1, 0) == 0.0);

  fs::path dir = scratch_dir();
  fs::path csv1 = dir / "transfer1.csv";
  fs::path csv2 = dir / "transfer2.csv";
  fs::path js1 = dir / "transfer1.json";
  fs::path js2 = dir / "transfer2.json";
  emit_transfer_csv(m, csv1.string());
  emit_transfer_json(m, 1, js1.string());
  TransferMatrix rerun =
      run_transfer(cfg, ids, models, manifest, "redteam", 1, 3);
  emit_transfer_csv(rerun, csv2.string());
  emit_transfer_json(rerun, 1, js2.string());
  CHECK(read_file(csv1) == read_file(csv2));
  CHECK(read_file(js1) == read_file(js2));

  CHECK(read_file(csv1) ==
        "source,ConvS,ConvM\n"
        "ConvS,1,0\n"
        "ConvM,0,1\n");

  auto j = nlohmann::json::parse(read_file(js1));
  CHECK(j["attack"] == "ifgsm");
  CHECK(j["dataset"] == "redteam");
  CHECK(j["models"] == nlohmann::json({"ConvS", "ConvM"}));
  CHECK(j["matrix"][0][0] == 1.0);
  CHECK(j["matrix"][0][1] == 0.0);
}

TEST_CASE("transfer validates inputs like the sweep") {
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  Manifest manifest = build_manifest(Split::Redteam, 0, 1, 7);
  AttackSettings cfg;
  CHECK_THROWS_AS(run_transfer(cfg, {}, models, manifest, "t", 1, 1), Error);
  CHECK_THROWS_AS(
      run_transfer(cfg, {ArchId::ConvL}, models, manifest, "t", 1, 1), Error);
  Manifest empty;
  CHECK_THROWS_AS(
      run_transfer(cfg, {ArchId::ConvS}, models, empty, "t", 1, 1), Error);
  Manifest real_mix = manifest;
  real_mix.clips[0].label = Label::Real;
  real_mix.clips[0].artifact_profile = ArtifactProfile::None;
  CHECK_THROWS_AS(
      run_transfer(cfg, {ArchId::ConvS}, models, real_mix, "t", 1, 1), Error);
}

TEST_CASE("sweep csv is emitted in exactly the documented shape") {
  std::vector<SweepRecord> records(2);
  records[0].axis_value = 0.0001;
  records[0].model = ArchId::ConvS;
  records[0].asr_avg = 0.5;
  records[0].asr_std = 0.25;
  records[0].vqs_avg = 4.25;
  records[0].vqs_std = 0.1;
  records[0].snr_avg = 38.75;
  records[1].axis_value = 0.001;
  records[1].model = ArchId::ConvGate;
  records[1].asr_avg = 1.0;
  records[1].asr_std = 0.0;
  records[1].vqs_avg = 4.123456789;
  records[1].vqs_std = 0.015625;
  records[1].snr_avg = 40.0;

  fs::path p = scratch_dir() / "golden.csv";
  emit_csv(records, SweepAxis::step_size, p.string());
  CHECK(read_file(p) ==
        "lr,asr-avg,asr-std,visqol-avg,visqol-std,snr-avg,model\n"
        "0.0001,0.5,0.25,4.25,0.1,38.75,ConvS\n"
        "0.001,1,0,4.12346,0.015625,40,ConvGate\n");

  fs::path q = scratch_dir() / "golden_query.csv";
  emit_csv({}, SweepAxis::queries, q.string());
  CHECK(read_file(q) ==
        "query,asr-avg,asr-std,visqol-avg,visqol-std,snr-avg,model\n");
}

TEST_CASE("sweep json round-trips the run configuration") {
  ModelSet models;
  models.emplace(ArchId::ConvS, mean_model(1.0));
  SweepSpec spec;
  spec.attack = AttackKind::SimBA;
  spec.axis = SweepAxis::queries;
  spec.axis_values = {4, 6};
  spec.models = {ArchId::ConvS};
  spec.manifest = build_manifest(Split::Redteam, 0, 2, 1234);
  spec.repeats = 1;
  spec.master_seed = 9;
  spec.fixed.sb.q = 2;
  SweepResult res = run_sweep(spec, models, 1);

  fs::path dir = scratch_dir();
  fs::path p1 = dir / "sweep1.json";
  fs::path p2 = dir / "sweep2.json";
  emit_json(spec, res, p1.string());
  emit_json(spec, res, p2.string());
  CHECK(read_file(p1) == read_file(p2));

  auto j = nlohmann::json::parse(read_file(p1));
  CHECK(j["config"]["attack"] == "simba");
  CHECK(j["config"]["swept_axis"] == "queries");
  CHECK(j["config"]["axis_values"] == nlohmann::json({4.0, 6.0}));
  CHECK(j["config"]["fixed"]["q"] == 2);
  CHECK(j["config"]["repeats"] == 1);
  CHECK(j["config"]["master_seed"] == 9);
  CHECK(j["config"]["models"] == nlohmann::json({"ConvS"}));
  CHECK(j["config"]["manifest"]["split"] == "Redteam");
  CHECK(j["config"]["manifest"]["n_clips"] == 2);
  REQUIRE(j["records"].size() == 2);
  CHECK(j["records"][0]["axis_value"] == 4.0);
  CHECK(j["records"][0]["model"] == "ConvS");
  REQUIRE(j["clips"].size() == 4);
  CHECK(j["clips"][0]["clip_seed"] == spec.manifest.clips[0].seed);
  for (const auto& c : j["clips"]) {
    CHECK(c.contains("success"));
    CHECK(c.contains("steps_used"));
    CHECK(c.contains("visqol"));
    CHECK(c.contains("delta_linf"));
  }
}

TEST_SUITE_END();
