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

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "ssdrt/error.hpp"
#include "ssdrt/quality.hpp"
#include "ssdrt/rng.hpp"
#include "ssdrt/version.hpp"

namespace ssdrt {

namespace {

using json = nlohmann::ordered_json;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// Sample standard deviation; 0 when fewer than two observations.
double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

bool is_white_box(AttackKind k) { return k != AttackKind::SimBA; }

AttackSettings with_axis_value(const AttackSettings& base, AttackKind kind,
                               SweepAxis axis, double value) {
  AttackSettings s = base;
  s.kind = kind;
  bool wb = is_white_box(kind);
  switch (axis) {
    case SweepAxis::step_size:
      if (wb) s.wb.alpha = value;
      else s.sb.alpha = value;
      break;
    case SweepAxis::epsilon:
      if (wb) s.wb.epsilon = value;
      else s.sb.epsilon = value;
      break;
    case SweepAxis::iterations:
      if (!wb)
        throw Error("harness", "swept_axis",
                    "iterations applies to white-box attacks only");
      s.wb.max_iters = int(std::lround(value));
      break;
    case SweepAxis::batch_size:
      if (wb)
        throw Error("harness", "swept_axis",
                    "batch_size applies to SimBA only");
      s.sb.q = int(std::lround(value));
      break;
    case SweepAxis::queries:
      if (wb)
        throw Error("harness", "swept_axis",
                    "queries applies to SimBA only");
      s.sb.max_queries = int(std::lround(value));
      break;
  }
  return s;
}

AttackResult run_attack(const DetectorModel& model, const Waveform& clip,
                        const AttackSettings& cfg) {
  WhiteBoxConfig wb = cfg.wb;
  switch (cfg.kind) {
    case AttackKind::PGD:
      wb.method = WhiteBoxConfig::Method::PGD;
      return pgd_attack(model, clip, wb);
    case AttackKind::IFGSM:
      wb.method = WhiteBoxConfig::Method::IFGSM;
      return ifgsm_attack(model, clip, wb);
    case AttackKind::SimBA:
      return simba_attack(model, clip, cfg.sb);
  }
  throw Error("harness", "attack", "unknown attack kind");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("harness", "out", "cannot open " + path);
  return out;
}

json settings_json(const AttackSettings& cfg) {
  json j;
  if (is_white_box(cfg.kind)) {
    j["alpha"] = cfg.wb.alpha;
    j["epsilon"] = cfg.wb.epsilon;
    j["max_iters"] = cfg.wb.max_iters;
    j["clamp_valid_range"] = cfg.wb.clamp_valid_range;
  } else {
    j["alpha"] = cfg.sb.alpha;
    j["q"] = cfg.sb.q;
    j["max_queries"] = cfg.sb.max_queries;
    j["epsilon"] = cfg.sb.epsilon;
  }
  return j;
}

}  // namespace

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::PGD: return "pgd";
    case AttackKind::IFGSM: return "ifgsm";
    case AttackKind::SimBA: return "simba";
  }
  return "?";
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::step_size: return "step_size";
    case SweepAxis::epsilon: return "epsilon";
    case SweepAxis::iterations: return "iterations";
    case SweepAxis::batch_size: return "batch_size";
    case SweepAxis::queries: return "queries";
  }
  return "?";
}

AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "pgd") return AttackKind::PGD;
  if (s == "ifgsm") return AttackKind::IFGSM;
  if (s == "simba") return AttackKind::SimBA;
  throw Error("harness", "attack", "unknown attack: " + s);
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "step_size") return SweepAxis::step_size;
  if (s == "epsilon") return SweepAxis::epsilon;
  if (s == "iterations") return SweepAxis::iterations;
  if (s == "batch_size") return SweepAxis::batch_size;
  if (s == "queries") return SweepAxis::queries;
  throw Error("harness", "swept_axis", "unknown axis: " + s);
}

const char* axis_column(SweepAxis a) {
  switch (a) {
    case SweepAxis::step_size: return "lr";
    case SweepAxis::epsilon: return "eps";
    case SweepAxis::iterations: return "iter";
    case SweepAxis::batch_size: return "bs";
    case SweepAxis::queries: return "query";
  }
  return "?";
}

std::vector<double> default_axis_values(AttackKind kind, SweepAxis axis) {
  bool wb = is_white_box(kind);
  switch (axis) {
    case SweepAxis::step_size:
      return wb ? std::vector<double>{1e-5, 1e-4, 1e-3, 1e-2}
                : std::vector<double>{0.001, 0.003, 0.005, 0.007};
    case SweepAxis::epsilon:
      return {0.001, 0.002, 0.003, 0.004};
    case SweepAxis::iterations:
      return {50, 100, 150, 200};
    case SweepAxis::batch_size:
      return {500, 1000, 2000, 4000};
    case SweepAxis::queries:
      return {1000, 2500, 5000, 7500};
  }
  return {};
}

double attack_success_rate(const std::vector<AttackResult>& results) {
  if (results.empty())
    throw Error("harness", "results", "no attack results to aggregate");
  int hits = 0;
  for (const auto& r : results)
    if (r.success) ++hits;
  return double(hits) / double(results.size());
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (jobs <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::mutex err_mu;
  int workers = std::min(jobs, n);
  std::vector<std::thread> pool;
  pool.reserve(size_t(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

SweepResult run_sweep(const SweepSpec& spec, const ModelSet& models,
                      int jobs) {
  if (spec.axis_values.empty())
    throw Error("harness", "axis_values", "empty sweep grid");
  if (spec.models.empty())
    throw Error("harness", "models", "no models to sweep");
  if (spec.repeats < 1)
    throw Error("harness", "repeats", "repeats must be >= 1");
  if (spec.manifest.clips.empty())
    throw Error("harness", "manifest", "no clips to attack");
  for (const auto& c : spec.manifest.clips)
    if (c.label != Label::Fake)
      throw Error("harness", "manifest", "sweep attacks fake clips only");
  for (ArchId id : spec.models)
    if (!models.count(id))
      throw Error("harness", "models",
                  std::string("missing model: ") + to_string(id));
  // Validate the axis/attack pairing before any work.
  (void)with_axis_value(spec.fixed, spec.attack, spec.axis,
                        spec.axis_values.front());

  int na = int(spec.axis_values.size());
  int nm = int(spec.models.size());
  int nr = spec.repeats;
  int nc = int(spec.manifest.clips.size());

  std::vector<Waveform> clips(static_cast<size_t>(nc));
  std::vector<Waveform> refs(static_cast<size_t>(nc));
  parallel_for(nc, jobs, [&](int ci) {
    clips[size_t(ci)] =
        synth_clip(spec.manifest.clips[size_t(ci)], spec.manifest.sample_rate);
    // Quality baseline is the original as distributed: 16-bit audio. A
    // zero-delta attack then scores linf 0 and vqs 5 exactly.
    refs[size_t(ci)] = quantize_to_grid(clips[size_t(ci)]);
  });

  SweepResult result;
  result.clips.resize(size_t(na) * nm * nr * nc);

  parallel_for(na * nm * nr * nc, jobs, [&](int idx) {
    int ci = idx % nc;
    int rest = idx / nc;
    int rep = rest % nr;
    rest /= nr;
    int mi = rest % nm;
    int ai = rest / nm;

    ArchId arch = spec.models[size_t(mi)];
    uint64_t clip_seed = spec.manifest.clips[size_t(ci)].seed;
    try {
      AttackSettings cfg = with_axis_value(spec.fixed, spec.attack, spec.axis,
                                           spec.axis_values[size_t(ai)]);
      cfg.sb.seed = derive_seed(spec.master_seed,
                                {uint64_t(ai), uint64_t(mi), uint64_t(rep),
                                 uint64_t(ci)});
      const DetectorModel& model = models.at(arch);
      const Waveform& clip = clips[size_t(ci)];
      if (clip.length() != model.input_length)
        throw Error("harness", "clip",
                    "clip length does not match model input_length");

      AttackResult res = run_attack(model, clip, cfg);

      // Export path: additive perturbation, clamped and put on the 16-bit
      // grid. Success and quality are measured on what a listener gets.
      Waveform attacked = clip;
      for (int i = 0; i < clip.length(); ++i)
        attacked.samples[size_t(i)] += res.delta[size_t(i)];
      attacked = quantize_to_grid(attacked);

      ClipOutcome& out = result.clips[size_t(idx)];
      out.axis_value = spec.axis_values[size_t(ai)];
      out.model = arch;
      out.repeat = rep;
      out.clip_seed = clip_seed;
      out.success = score(model, attacked).label == Label::Real;
      out.steps_used = res.steps_used;
      QualityReport q = vqs_score(refs[size_t(ci)], attacked);
      out.linf = q.linf;
      out.vqs = q.vqs;
      out.snr_db = q.snr_db;
      double dmax = 0.0;
      for (double d : res.delta) dmax = std::max(dmax, std::abs(d));
      out.delta_linf = dmax;
    } catch (const Error& e) {
      throw Error("harness", "cell",
                  std::string(e.what()) + " (axis value " +
                      fmt6(spec.axis_values[size_t(ai)]) + ", model " +
                      to_string(arch) + ", clip seed " +
                      std::to_string(clip_seed) + ")");
    }
  });

  for (int ai = 0; ai < na; ++ai) {
    for (int mi = 0; mi < nm; ++mi) {
      std::vector<double> asr_r, asr_std_r, vqs_r, vqs_std_r, snr_r;
      for (int rep = 0; rep < nr; ++rep) {
        std::vector<double> succ, vqs, snr;
        for (int ci = 0; ci < nc; ++ci) {
          size_t idx = ((size_t(ai) * nm + mi) * nr + rep) * nc + ci;
          const ClipOutcome& o = result.clips[idx];
          succ.push_back(o.success ? 1.0 : 0.0);
          vqs.push_back(o.vqs);
          snr.push_back(o.snr_db);
        }
        asr_r.push_back(mean_of(succ));
        asr_std_r.push_back(sample_std(succ));
        vqs_r.push_back(mean_of(vqs));
        vqs_std_r.push_back(sample_std(vqs));
        snr_r.push_back(mean_of(snr));
      }
      SweepRecord rec;
      rec.axis_value = spec.axis_values[size_t(ai)];
      rec.model = spec.models[size_t(mi)];
      rec.asr_avg = mean_of(asr_r);
      rec.asr_std = mean_of(asr_std_r);
      rec.vqs_avg = mean_of(vqs_r);
      rec.vqs_std = mean_of(vqs_std_r);
      rec.snr_avg = mean_of(snr_r);
      result.records.push_back(rec);
    }
  }
  return result;
}

TransferMatrix run_transfer(const AttackSettings& cfg,
                            const std::vector<ArchId>& model_ids,
                            const ModelSet& models, const Manifest& manifest,
                            const std::string& dataset_tag,
                            uint64_t master_seed, int jobs) {
  if (model_ids.empty())
    throw Error("harness", "models", "no models for transfer");
  if (manifest.clips.empty())
    throw Error("harness", "manifest", "no clips to attack");
  for (const auto& c : manifest.clips)
    if (c.label != Label::Fake)
      throw Error("harness", "manifest", "transfer attacks fake clips only");
  for (ArchId id : model_ids)
    if (!models.count(id))
      throw Error("harness", "models",
                  std::string("missing model: ") + to_string(id));

  int nm = int(model_ids.size());
  int nc = int(manifest.clips.size());

  std::vector<Waveform> clips(static_cast<size_t>(nc));
  parallel_for(nc, jobs, [&](int ci) {
    clips[size_t(ci)] = synth_clip(manifest.clips[size_t(ci)],
                                   manifest.sample_rate);
  });

  // attacked[src][ci] is the exported audio of the attack crafted on src.
  std::vector<std::vector<Waveform>> attacked(
      static_cast<size_t>(nm),
      std::vector<Waveform>(static_cast<size_t>(nc)));
  parallel_for(nm * nc, jobs, [&](int idx) {
    int ci = idx % nc;
    int src = idx / nc;
    AttackSettings c = cfg;
    c.sb.seed = derive_seed(master_seed, {uint64_t(src), uint64_t(ci)});
    const DetectorModel& model = models.at(model_ids[size_t(src)]);
    if (clips[size_t(ci)].length() != model.input_length)
      throw Error("harness", "clip",
                  "clip length does not match model input_length");
    AttackResult res = run_attack(model, clips[size_t(ci)], c);
    Waveform w = clips[size_t(ci)];
    for (int i = 0; i < w.length(); ++i)
      w.samples[size_t(i)] += res.delta[size_t(i)];
    attacked[size_t(src)][size_t(ci)] = quantize_to_grid(w);
  });

  TransferMatrix m;
  m.attack = cfg.kind;
  m.dataset_tag = dataset_tag;
  m.models = model_ids;
  m.cells.assign(size_t(nm) * nm, 0.0);
  parallel_for(nm * nm, jobs, [&](int idx) {
    int tgt = idx % nm;
    int src = idx / nm;
    const DetectorModel& target = models.at(model_ids[size_t(tgt)]);
    int hits = 0;
    for (int ci = 0; ci < nc; ++ci)
      if (score(target, attacked[size_t(src)][size_t(ci)]).label ==
          Label::Real)
        ++hits;
    m.cells[size_t(idx)] = double(hits) / double(nc);
  });
  return m;
}

void emit_csv(const std::vector<SweepRecord>& records, SweepAxis axis,
              const std::string& path) {
  std::ofstream out = open_out(path);
  out << axis_column(axis)
      << ",asr-avg,asr-std,visqol-avg,visqol-std,snr-avg,model\n";
  for (const auto& r : records) {
    out << fmt6(r.axis_value) << ',' << fmt6(r.asr_avg) << ','
        << fmt6(r.asr_std) << ',' << fmt6(r.vqs_avg) << ','
        << fmt6(r.vqs_std) << ',' << fmt6(r.snr_avg) << ','
        << to_string(r.model) << '\n';
  }
}

void emit_json(const SweepSpec& spec, const SweepResult& result,
               const std::string& path) {
  json j;
  j["version"] = kVersion;
  json cfg;
  cfg["attack"] = to_string(spec.attack);
  cfg["swept_axis"] = to_string(spec.axis);
  cfg["axis_values"] = spec.axis_values;
  AttackSettings fixed = spec.fixed;
  fixed.kind = spec.attack;
  cfg["fixed"] = settings_json(fixed);
  json names = json::array();
  for (ArchId id : spec.models) names.push_back(to_string(id));
  cfg["models"] = names;
  cfg["repeats"] = spec.repeats;
  cfg["master_seed"] = spec.master_seed;
  json man;
  man["split"] = to_string(spec.manifest.split);
  man["sample_rate"] = spec.manifest.sample_rate;
  man["n_clips"] = spec.manifest.clips.size();
  cfg["manifest"] = man;
  j["config"] = cfg;

  json recs = json::array();
  for (const auto& r : result.records) {
    json e;
    e["axis_value"] = r.axis_value;
    e["model"] = to_string(r.model);
    e["asr_avg"] = r.asr_avg;
    e["asr_std"] = r.asr_std;
    e["visqol_avg"] = r.vqs_avg;
    e["visqol_std"] = r.vqs_std;
    e["snr_avg"] = r.snr_avg;
    recs.push_back(e);
  }
  j["records"] = recs;

  json clips = json::array();
  for (const auto& c : result.clips) {
    json e;
    e["axis_value"] = c.axis_value;
    e["model"] = to_string(c.model);
    e["repeat"] = c.repeat;
    e["clip_seed"] = c.clip_seed;
    e["success"] = c.success;
    e["steps_used"] = c.steps_used;
    e["linf"] = c.linf;
    e["visqol"] = c.vqs;
    e["snr_db"] = c.snr_db;
    e["delta_linf"] = c.delta_linf;
    clips.push_back(e);
  }
  j["clips"] = clips;

  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

void emit_transfer_csv(const TransferMatrix& m, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "source";
  for (ArchId id : m.models) out << ',' << to_string(id);
  out << '\n';
  int nm = int(m.models.size());
  for (int src = 0; src < nm; ++src) {
    out << to_string(m.models[size_t(src)]);
    for (int tgt = 0; tgt < nm; ++tgt) out << ',' << fmt6(m.at(src, tgt));
    out << '\n';
  }
}

void emit_transfer_json(const TransferMatrix& m, uint64_t master_seed,
                        const std::string& path) {
  json j;
  j["version"] = kVersion;
  j["attack"] = to_string(m.attack);
  j["dataset"] = m.dataset_tag;
  j["master_seed"] = master_seed;
  json names = json::array();
  for (ArchId id : m.models) names.push_back(to_string(id));
  j["models"] = names;
  json rows = json::array();
  int nm = int(m.models.size());
  for (int src = 0; src < nm; ++src) {
    json row = json::array();
    for (int tgt = 0; tgt < nm; ++tgt) row.push_back(m.at(src, tgt));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace ssdrt
