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

// ssdrt: generate the corpus, train detectors, measure EER, run white-box
// and black-box attacks, sweep hyper-parameters, and compute transfer
// matrices, all from one binary. Every subcommand accepts --seed, --config,
// --out and --jobs; writes never leave --out.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ssdrt/attack.hpp"
#include "ssdrt/config.hpp"
#include "ssdrt/corpus.hpp"
#include "ssdrt/detector.hpp"
#include "ssdrt/error.hpp"
#include "ssdrt/harness.hpp"
#include "ssdrt/quality.hpp"
#include "ssdrt/rng.hpp"
#include "ssdrt/version.hpp"
#include "ssdrt/wav.hpp"

namespace fs = std::filesystem;

namespace {

using ssdrt::AttackKind;
using ssdrt::AttackSettings;
using ssdrt::ArchId;
using ssdrt::ArtifactProfile;
using ssdrt::Config;
using ssdrt::DetectorModel;
using ssdrt::Manifest;
using ssdrt::ModelSet;
using ssdrt::Split;
using ssdrt::SweepAxis;
using ssdrt::SweepSpec;

int default_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : int(n);
}

// Flags shared by every subcommand.
struct Common {
  uint64_t seed = 1;
  std::string config_path;
  std::string out;
  int jobs = default_jobs();
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
  cmd->add_option("--seed", c.seed, "Master seed (dimensionless integer)");
  cmd->add_option("--config", c.config_path,
                  "Config file (INI: [section] key = value)")
      ->check(CLI::ExistingFile);
  auto* out = cmd->add_option(
      "--out", c.out, "Output directory; all files are written inside it");
  if (out_required) out->required();
  cmd->add_option("--jobs", c.jobs,
                  "Worker threads (count; default: available cores)");
}

Config load_config(const Common& c) {
  if (c.config_path.empty()) return Config();
  return Config::parse_file(c.config_path);
}

fs::path ensure_out(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

std::vector<ArchId> parse_archs(const std::string& s) {
  if (s == "all") return ssdrt::all_archs();
  std::vector<ArchId> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(ssdrt::arch_from_string(item));
  }
  if (out.empty()) throw ssdrt::Error("cli", "arch", "empty arch list");
  return out;
}

std::vector<ArtifactProfile> parse_profiles(const std::string& s) {
  std::vector<ArtifactProfile> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(ssdrt::profile_from_string(item));
  }
  return out;
}

std::string ckpt_path(const fs::path& dir, ArchId id) {
  return (dir / (std::string(ssdrt::to_string(id)) + ".ckpt")).string();
}

ModelSet load_models(const std::string& dir, const std::vector<ArchId>& ids) {
  ModelSet models;
  for (ArchId id : ids)
    models.emplace(id, ssdrt::load_checkpoint(ckpt_path(dir, id), id));
  return models;
}

// Flags override config override defaults; count() distinguishes "given"
// from "left at default".
double pick(const CLI::Option* opt, double flag_val, const Config& cfg,
            const std::string& key, double fallback) {
  if (opt->count()) return flag_val;
  return cfg.get_double_or(key, fallback);
}

int pick(const CLI::Option* opt, int flag_val, const Config& cfg,
         const std::string& key, int fallback) {
  if (opt->count()) return flag_val;
  return cfg.get_int_or(key, fallback);
}

std::string pick(const CLI::Option* opt, const std::string& flag_val,
                 const Config& cfg, const std::string& key,
                 const std::string& fallback) {
  if (opt->count()) return flag_val;
  return cfg.get_string_or(key, fallback);
}

// Attack hyper-parameter flags; names mirror the config struct fields.
struct AttackFlags {
  std::string method = "pgd";
  double alpha = 0.0;
  double epsilon = 0.0;
  int max_iters = 0;
  bool clamp_valid_range = true;
  int q = 0;
  int max_queries = 0;
  CLI::Option* method_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* max_iters_opt = nullptr;
  CLI::Option* clamp_opt = nullptr;
  CLI::Option* q_opt = nullptr;
  CLI::Option* max_queries_opt = nullptr;
};

void add_attack_flags(CLI::App* cmd, AttackFlags& f) {
  f.method_opt =
      cmd->add_option("--method", f.method, "Attack method: pgd, ifgsm, simba")
          ->check(CLI::IsMember({"pgd", "ifgsm", "simba"}));
  f.alpha_opt = cmd->add_option(
      "--alpha", f.alpha,
      "Step size (amplitude units, full scale 1.0; default pgd/ifgsm 1e-3, "
      "simba 0.005)");
  f.epsilon_opt = cmd->add_option(
      "--epsilon", f.epsilon,
      "L-infinity budget (amplitude units; default pgd/ifgsm 0.004, simba "
      "0.05)");
  f.max_iters_opt = cmd->add_option(
      "--max_iters", f.max_iters,
      "White-box iteration cap (iterations; default 200)");
  f.clamp_opt = cmd->add_flag(
      "--clamp_valid_range,!--no-clamp_valid_range", f.clamp_valid_range,
      "Keep s+delta inside [-1, 1] (white-box; default on)");
  f.q_opt = cmd->add_option(
      "--q", f.q, "SimBA timesteps perturbed per proposal (count; default "
      "2000)");
  f.max_queries_opt = cmd->add_option(
      "--max_queries", f.max_queries,
      "SimBA query budget (model evaluations; default 7500)");
}

AttackSettings resolve_attack(const AttackFlags& f, const Config& cfg) {
  AttackSettings s;
  std::string method =
      pick(f.method_opt, f.method, cfg, "attack.method", "pgd");
  s.kind = ssdrt::attack_kind_from_string(method);
  bool wb = s.kind != AttackKind::SimBA;
  if (wb) {
    s.wb.alpha = pick(f.alpha_opt, f.alpha, cfg, "attack.alpha", 1e-3);
    s.wb.epsilon =
        pick(f.epsilon_opt, f.epsilon, cfg, "attack.epsilon", 0.004);
    s.wb.max_iters =
        pick(f.max_iters_opt, f.max_iters, cfg, "attack.max_iters", 200);
    s.wb.clamp_valid_range =
        f.clamp_opt->count() ? f.clamp_valid_range
                             : cfg.get_bool_or("attack.clamp_valid_range",
                                               true);
  } else {
    s.sb.alpha = pick(f.alpha_opt, f.alpha, cfg, "attack.alpha", 0.005);
    s.sb.epsilon =
        pick(f.epsilon_opt, f.epsilon, cfg, "attack.epsilon", 0.05);
    s.sb.q = pick(f.q_opt, f.q, cfg, "attack.q", 2000);
    s.sb.max_queries =
        pick(f.max_queries_opt, f.max_queries, cfg, "attack.max_queries",
             7500);
  }
  return s;
}

// Default clip counts per split; config [corpus] keys override, flags win.
struct SplitPlan {
  const char* file;
  Split split;
  int n_real;
  int n_fake;
  bool ood;
};

int run_gen_corpus(const Common& c, const std::string& split_arg,
                   const CLI::Option* nr_opt, int nr,
                   const CLI::Option* nf_opt, int nf,
                   const CLI::Option* prof_opt, const std::string& prof_arg,
                   bool render) {
  Config cfg = load_config(c);
  fs::path out = ensure_out(c);

  auto pool = parse_profiles(
      pick(prof_opt, prof_arg, cfg, "corpus.profiles", "SpectralNotch"));
  auto ood_pool = parse_profiles(cfg.get_string_or(
      "corpus.ood_profiles", "PhaseJitter,Quantize"));

  std::vector<SplitPlan> plans;
  auto plan = [&](const char* file, Split split, const char* rk, int rd,
                  const char* fk, int fd, bool ood) {
    SplitPlan p{file, split, cfg.get_int_or(std::string("corpus.") + rk, rd),
                cfg.get_int_or(std::string("corpus.") + fk, fd), ood};
    plans.push_back(p);
  };
  if (split_arg == "all" || split_arg == "train")
    plan("train.json", Split::Train, "train_real", 120, "train_fake", 120,
         false);
  if (split_arg == "all" || split_arg == "eval")
    plan("eval.json", Split::Eval, "eval_real", 60, "eval_fake", 60, false);
  if (split_arg == "all" || split_arg == "redteam")
    plan("redteam.json", Split::Redteam, "redteam_real", 0, "redteam_fake",
         100, false);
  if (split_arg == "all" || split_arg == "redteam-ood")
    plan("redteam_ood.json", Split::Redteam, "redteam_real", 0,
         "redteam_fake", 100, true);
  if (plans.empty())
    throw CLI::ValidationError(
        "--split", "expected train, eval, redteam, redteam-ood or all");
  if ((nr_opt->count() || nf_opt->count()) && plans.size() != 1)
    throw CLI::ValidationError(
        "--n_real/--n_fake", "need --split naming a single split");

  for (auto& p : plans) {
    if (nr_opt->count()) p.n_real = nr;
    if (nf_opt->count()) p.n_fake = nf;
    Manifest m = ssdrt::build_manifest(p.split, p.n_real, p.n_fake, c.seed,
                                       p.ood ? ood_pool : pool);
    fs::path mpath = out / p.file;
    ssdrt::save_manifest(m, mpath.string());
    std::cout << "wrote " << mpath.string() << " (" << p.n_real << " real, "
              << p.n_fake << " fake)\n";
    if (render) {
      fs::path wav_dir = out / "wav" / fs::path(p.file).stem();
      fs::create_directories(wav_dir);
      std::vector<ssdrt::Waveform> wavs(m.clips.size());
      ssdrt::parallel_for(int(m.clips.size()), c.jobs, [&](int i) {
        wavs[size_t(i)] = ssdrt::synth_clip(m.clips[size_t(i)],
                                            m.sample_rate);
      });
      for (size_t i = 0; i < m.clips.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "clip_%016llx.wav",
                      static_cast<unsigned long long>(m.clips[i].seed));
        ssdrt::write_wav(wavs[i], (wav_dir / name).string());
      }
      std::cout << "wrote " << m.clips.size() << " wav files under "
                << wav_dir.string() << "\n";
    }
  }
  return 0;
}

int run_train(const Common& c, const std::string& arch_arg,
              const std::string& manifest_path, const CLI::Option* lr_opt,
              double lr, const CLI::Option* epochs_opt, int epochs,
              const CLI::Option* batch_opt, int batch) {
  Config cfg = load_config(c);
  fs::path out = ensure_out(c);
  Manifest m = ssdrt::load_manifest(manifest_path);

  ssdrt::TrainHp hp;
  hp.lr = pick(lr_opt, lr, cfg, "models.lr", hp.lr);
  hp.epochs = pick(epochs_opt, epochs, cfg, "models.epochs", hp.epochs);
  hp.batch = pick(batch_opt, batch, cfg, "models.batch", hp.batch);
  hp.seed = c.seed;

  for (ArchId id : parse_archs(arch_arg)) {
    DetectorModel model = ssdrt::train(id, m, hp);
    std::string path = ckpt_path(out, id);
    ssdrt::save_checkpoint(model, path);
    std::cout << ssdrt::to_string(id) << ": trained " << hp.epochs
              << " epochs, saved " << path << "\n";
  }
  return 0;
}

int run_eval_eer(const Common& c, const std::string& arch_arg,
                 const std::string& ckpt_dir,
                 const std::string& manifest_path) {
  Manifest m = ssdrt::load_manifest(manifest_path);
  std::vector<ArchId> ids = parse_archs(arch_arg);
  nlohmann::ordered_json j;
  j["version"] = ssdrt::kVersion;
  nlohmann::ordered_json per;
  for (ArchId id : ids) {
    DetectorModel model = ssdrt::load_checkpoint(ckpt_path(ckpt_dir, id), id);
    double eer = ssdrt::eval_eer(model, m);
    std::cout << ssdrt::to_string(id) << " eer " << eer << "\n";
    per[ssdrt::to_string(id)] = eer;
  }
  j["eer"] = per;
  if (!c.out.empty()) {
    fs::path out = ensure_out(c);
    std::ofstream f(out / "eer.json", std::ios::binary);
    f << j.dump(2) << '\n';
    std::cout << "wrote " << (out / "eer.json").string() << "\n";
  }
  return 0;
}

// Single attack configuration = one-cell sweep; reuses the harness for
// seeding, export, metrics and the JSON report.
int run_attack_cmd(const Common& c, const AttackFlags& flags,
                   const std::string& arch_arg, const std::string& ckpt_dir,
                   const std::string& manifest_path) {
  Config cfg = load_config(c);
  fs::path out = ensure_out(c);
  AttackSettings settings = resolve_attack(flags, cfg);

  SweepSpec spec;
  spec.attack = settings.kind;
  spec.axis = SweepAxis::step_size;
  spec.axis_values = {settings.kind == AttackKind::SimBA ? settings.sb.alpha
                                                         : settings.wb.alpha};
  spec.fixed = settings;
  spec.models = parse_archs(arch_arg);
  spec.manifest = ssdrt::load_manifest(manifest_path);
  spec.repeats = 1;
  spec.master_seed = c.seed;

  ModelSet models = load_models(ckpt_dir, spec.models);
  ssdrt::SweepResult res = ssdrt::run_sweep(spec, models, c.jobs);
  for (const auto& r : res.records)
    std::cout << ssdrt::to_string(r.model) << " asr " << r.asr_avg
              << " visqol " << r.vqs_avg << " snr " << r.snr_avg << "\n";
  ssdrt::emit_json(spec, res, (out / "report.json").string());
  std::cout << "wrote " << (out / "report.json").string() << "\n";
  return 0;
}

int run_sweep_cmd(const Common& c, const AttackFlags& flags,
                  const CLI::Option* axis_opt, const std::string& axis_arg,
                  const CLI::Option* values_opt,
                  const std::vector<double>& values_arg,
                  const CLI::Option* repeats_opt, int repeats_arg,
                  const CLI::Option* models_opt, const std::string& models_arg,
                  const CLI::Option* manifest_opt,
                  const std::string& manifest_arg,
                  const CLI::Option* ckpt_opt, const std::string& ckpt_arg) {
  Config cfg = load_config(c);
  fs::path out = ensure_out(c);

  SweepSpec spec;
  spec.fixed = resolve_attack(flags, cfg);
  spec.attack = spec.fixed.kind;
  spec.axis = ssdrt::sweep_axis_from_string(
      pick(axis_opt, axis_arg, cfg, "sweep.axis", "step_size"));
  if (values_opt->count())
    spec.axis_values = values_arg;
  else if (cfg.has("sweep.values"))
    spec.axis_values = cfg.get_double_list("sweep.values");
  else
    spec.axis_values = ssdrt::default_axis_values(spec.attack, spec.axis);
  spec.repeats = pick(repeats_opt, repeats_arg, cfg, "sweep.repeats", 3);
  spec.models =
      parse_archs(pick(models_opt, models_arg, cfg, "sweep.models", "all"));
  std::string manifest_path =
      pick(manifest_opt, manifest_arg, cfg, "sweep.manifest", "");
  if (manifest_path.empty())
    throw CLI::ValidationError("--manifest",
                               "required (flag or [sweep] manifest)");
  std::string ckpt_dir =
      pick(ckpt_opt, ckpt_arg, cfg, "sweep.checkpoints", "");
  if (ckpt_dir.empty())
    throw CLI::ValidationError("--checkpoints",
                               "required (flag or [sweep] checkpoints)");
  spec.manifest = ssdrt::load_manifest(manifest_path);
  spec.master_seed = c.seed;

  ModelSet models = load_models(ckpt_dir, spec.models);
  ssdrt::SweepResult res = ssdrt::run_sweep(spec, models, c.jobs);
  for (const auto& r : res.records)
    std::cout << ssdrt::axis_column(spec.axis) << " " << r.axis_value << " "
              << ssdrt::to_string(r.model) << " asr " << r.asr_avg
              << " visqol " << r.vqs_avg << "\n";
  ssdrt::emit_csv(res.records, spec.axis, (out / "sweep.csv").string());
  ssdrt::emit_json(spec, res, (out / "sweep.json").string());
  std::cout << "wrote " << (out / "sweep.csv").string() << " and "
            << (out / "sweep.json").string() << "\n";
  return 0;
}

int run_transfer_cmd(const Common& c, const AttackFlags& flags,
                     const std::string& models_arg,
                     const std::string& manifest_path,
                     const std::string& ckpt_dir, std::string tag) {
  Config cfg = load_config(c);
  fs::path out = ensure_out(c);
  AttackSettings settings = resolve_attack(flags, cfg);
  Manifest m = ssdrt::load_manifest(manifest_path);
  std::vector<ArchId> ids = parse_archs(models_arg);
  ModelSet models = load_models(ckpt_dir, ids);
  if (tag.empty()) tag = fs::path(manifest_path).stem().string();

  ssdrt::TransferMatrix tm = ssdrt::run_transfer(
      settings, ids, models, m, tag, c.seed, c.jobs);
  for (size_t src = 0; src < ids.size(); ++src) {
    std::cout << ssdrt::to_string(ids[src]) << " ->";
    for (size_t tgt = 0; tgt < ids.size(); ++tgt) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %.3f", tm.at(int(src), int(tgt)));
      std::cout << buf;
    }
    std::cout << "\n";
  }
  ssdrt::emit_transfer_csv(tm, (out / "transfer.csv").string());
  ssdrt::emit_transfer_json(tm, c.seed, (out / "transfer.json").string());
  std::cout << "wrote " << (out / "transfer.csv").string() << " and "
            << (out / "transfer.json").string() << "\n";
  return 0;
}

int run_quality_cmd(const Common& c, const std::string& ref_path,
                    const std::string& deg_path) {
  ssdrt::Waveform ref = ssdrt::read_wav(ref_path);
  ssdrt::Waveform deg = ssdrt::read_wav(deg_path);
  ssdrt::QualityReport q = ssdrt::vqs_score(ref, deg);
  std::cout << "linf " << q.linf << "\n"
            << "snr_db " << q.snr_db << "\n"
            << "nsim " << q.nsim << "\n"
            << "visqol " << q.vqs << "\n";
  if (!c.out.empty()) {
    fs::path out = ensure_out(c);
    nlohmann::ordered_json j;
    j["version"] = ssdrt::kVersion;
    j["reference"] = fs::path(ref_path).filename().string();
    j["degraded"] = fs::path(deg_path).filename().string();
    j["linf"] = q.linf;
    j["snr_db"] = q.snr_db;
    j["nsim"] = q.nsim;
    j["visqol"] = q.vqs;
    std::ofstream f(out / "quality.json", std::ios::binary);
    f << j.dump(2) << '\n';
    std::cout << "wrote " << (out / "quality.json").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speech deepfake detector red-team toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ssdrt::kVersion);

  // gen-corpus
  Common gc_common;
  std::string gc_split = "all";
  int gc_nr = 0, gc_nf = 0;
  std::string gc_profiles;
  bool gc_render = false;
  auto* gen = app.add_subcommand(
      "gen-corpus", "Generate manifests (and optionally WAVs) for the "
      "train/eval/redteam splits");
  add_common(gen, gc_common, /*out_required=*/true);
  gen->add_option("--split", gc_split,
                  "Split to generate: train, eval, redteam, redteam-ood, all")
      ->check(CLI::IsMember({"train", "eval", "redteam", "redteam-ood",
                             "all"}));
  auto* gc_nr_opt = gen->add_option(
      "--n_real", gc_nr, "Real clips (count; single split only)");
  auto* gc_nf_opt = gen->add_option(
      "--n_fake", gc_nf, "Fake clips (count; single split only)");
  auto* gc_prof_opt = gen->add_option(
      "--profiles", gc_profiles,
      "In-domain fake artifact pool, comma separated (SpectralNotch, "
      "PhaseJitter, Quantize)");
  gen->add_flag("--render", gc_render, "Also write 16-bit WAV files");

  // train
  Common tr_common;
  std::string tr_arch = "all", tr_manifest;
  double tr_lr = 0.0;
  int tr_epochs = 0, tr_batch = 0;
  auto* tr = app.add_subcommand(
      "train", "Train detector(s) on a Train-split manifest and write "
      "checkpoints");
  add_common(tr, tr_common, /*out_required=*/true);
  tr->add_option("--arch", tr_arch,
                 "Architecture: ConvS, ConvM, ConvL, ConvGate, a comma "
                 "list, or all");
  tr->add_option("--manifest", tr_manifest, "Train manifest JSON path")
      ->required()
      ->check(CLI::ExistingFile);
  auto* tr_lr_opt =
      tr->add_option("--lr", tr_lr, "Learning rate (dimensionless; default "
                     "0.01)");
  auto* tr_epochs_opt = tr->add_option(
      "--epochs", tr_epochs, "Training epochs (count; default 60)");
  auto* tr_batch_opt = tr->add_option(
      "--batch", tr_batch, "Mini-batch size (clips; default 16)");

  // eval-eer
  Common ee_common;
  std::string ee_arch = "all", ee_ckpt, ee_manifest;
  auto* ee = app.add_subcommand(
      "eval-eer", "Score a manifest and report per-model equal error rate");
  add_common(ee, ee_common, /*out_required=*/false);
  ee->add_option("--arch", ee_arch,
                 "Architecture: ConvS, ConvM, ConvL, ConvGate, a comma "
                 "list, or all");
  ee->add_option("--checkpoints", ee_ckpt,
                 "Directory holding <arch>.ckpt files")
      ->required()
      ->check(CLI::ExistingDirectory);
  ee->add_option("--manifest", ee_manifest, "Eval manifest JSON path")
      ->required()
      ->check(CLI::ExistingFile);

  // attack
  Common at_common;
  AttackFlags at_flags;
  std::string at_arch = "all", at_ckpt, at_manifest;
  auto* at = app.add_subcommand(
      "attack", "Attack every clip in a manifest against the given "
      "model(s) and write a per-clip report");
  add_common(at, at_common, /*out_required=*/true);
  add_attack_flags(at, at_flags);
  at->add_option("--arch", at_arch,
                 "Target architecture(s): name, comma list, or all");
  at->add_option("--checkpoints", at_ckpt,
                 "Directory holding <arch>.ckpt files")
      ->required()
      ->check(CLI::ExistingDirectory);
  at->add_option("--manifest", at_manifest,
                 "Manifest of fake clips to attack")
      ->required()
      ->check(CLI::ExistingFile);

  // sweep
  Common sw_common;
  AttackFlags sw_flags;
  std::string sw_axis = "step_size", sw_models = "all", sw_manifest,
              sw_ckpt;
  std::vector<double> sw_values;
  int sw_repeats = 0;
  auto* sw = app.add_subcommand(
      "sweep", "Sweep one attack hyper-parameter axis and emit CSV/JSON "
      "figure data");
  add_common(sw, sw_common, /*out_required=*/true);
  add_attack_flags(sw, sw_flags);
  auto* sw_axis_opt = sw->add_option(
      "--axis", sw_axis,
      "Swept axis: step_size, epsilon, iterations, batch_size, queries")
      ->check(CLI::IsMember({"step_size", "epsilon", "iterations",
                             "batch_size", "queries"}));
  auto* sw_values_opt = sw->add_option(
      "--values", sw_values,
      "Axis grid values (axis units; default: the figure grid)");
  auto* sw_repeats_opt = sw->add_option(
      "--repeats", sw_repeats, "Repeats per cell (count; default 3)");
  auto* sw_models_opt = sw->add_option(
      "--models", sw_models, "Models to sweep: name, comma list, or all");
  auto* sw_manifest_opt =
      sw->add_option("--manifest", sw_manifest,
                     "Manifest of fake clips to attack");
  auto* sw_ckpt_opt = sw->add_option(
      "--checkpoints", sw_ckpt, "Directory holding <arch>.ckpt files");

  // transfer
  Common tf_common;
  AttackFlags tf_flags;
  std::string tf_models = "all", tf_manifest, tf_ckpt, tf_tag;
  auto* tf = app.add_subcommand(
      "transfer", "Craft attacks on each source model and score them on "
      "every target model");
  add_common(tf, tf_common, /*out_required=*/true);
  add_attack_flags(tf, tf_flags);
  tf->add_option("--models", tf_models,
                 "Models in the matrix: name, comma list, or all");
  tf->add_option("--manifest", tf_manifest,
                 "Manifest of fake clips to attack")
      ->required()
      ->check(CLI::ExistingFile);
  tf->add_option("--checkpoints", tf_ckpt,
                 "Directory holding <arch>.ckpt files")
      ->required()
      ->check(CLI::ExistingDirectory);
  tf->add_option("--tag", tf_tag,
                 "Dataset tag recorded in the output (default: manifest "
                 "file stem)");

  // quality
  Common qa_common;
  std::string qa_ref, qa_deg;
  auto* qa = app.add_subcommand(
      "quality", "Compare two WAV files: L-infinity, SNR, NSIM and the 1-5 "
      "quality score");
  add_common(qa, qa_common, /*out_required=*/false);
  qa->add_option("--reference", qa_ref, "Reference WAV path")
      ->required()
      ->check(CLI::ExistingFile);
  qa->add_option("--degraded", qa_deg, "Degraded WAV path")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
    if (gen->parsed())
      return run_gen_corpus(gc_common, gc_split, gc_nr_opt, gc_nr, gc_nf_opt,
                            gc_nf, gc_prof_opt, gc_profiles, gc_render);
    if (tr->parsed())
      return run_train(tr_common, tr_arch, tr_manifest, tr_lr_opt, tr_lr,
                       tr_epochs_opt, tr_epochs, tr_batch_opt, tr_batch);
    if (ee->parsed())
      return run_eval_eer(ee_common, ee_arch, ee_ckpt, ee_manifest);
    if (at->parsed())
      return run_attack_cmd(at_common, at_flags, at_arch, at_ckpt,
                            at_manifest);
    if (sw->parsed())
      return run_sweep_cmd(sw_common, sw_flags, sw_axis_opt, sw_axis,
                           sw_values_opt, sw_values, sw_repeats_opt,
                           sw_repeats, sw_models_opt, sw_models,
                           sw_manifest_opt, sw_manifest, sw_ckpt_opt,
                           sw_ckpt);
    if (tf->parsed())
      return run_transfer_cmd(tf_common, tf_flags, tf_models, tf_manifest,
                              tf_ckpt, tf_tag);
    if (qa->parsed())
      return run_quality_cmd(qa_common, qa_ref, qa_deg);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ssdrt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
