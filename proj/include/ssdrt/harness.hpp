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

#ifndef SSDRT_HARNESS_HPP_
#define SSDRT_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ssdrt/attack.hpp"
#include "ssdrt/corpus.hpp"
#include "ssdrt/detector.hpp"

namespace ssdrt {

enum class AttackKind { PGD, IFGSM, SimBA };
enum class SweepAxis { step_size, epsilon, iterations, batch_size, queries };

const char* to_string(AttackKind k);
const char* to_string(SweepAxis a);
AttackKind attack_kind_from_string(const std::string& s);
SweepAxis sweep_axis_from_string(const std::string& s);

// CSV column name for the axis: lr, eps, iter, bs, query.
const char* axis_column(SweepAxis a);

// Complete attack settings; the white-box half applies to PGD/IFGSM, the
// SimBA half to SimBA. SimBA's per-clip seed is derived by the harness.
struct AttackSettings {
  AttackKind kind = AttackKind::PGD;
  WhiteBoxConfig wb;
  SimbaConfig sb;
};

// Paper figure grids (x ticks of the sweep figures).
std::vector<double> default_axis_values(AttackKind kind, SweepAxis axis);

struct SweepSpec {
  AttackKind attack = AttackKind::PGD;
  SweepAxis axis = SweepAxis::step_size;
  std::vector<double> axis_values;  // nonempty, strictly increasing
  AttackSettings fixed;
  std::vector<ArchId> models;
  Manifest manifest;  // Redteam split
  int repeats = 3;
  uint64_t master_seed = 1;
};

struct SweepRecord {
  double axis_value = 0.0;
  ArchId model = ArchId::ConvS;
  double asr_avg = 0.0;
  double asr_std = 0.0;
  double vqs_avg = 0.0;
  double vqs_std = 0.0;
  double snr_avg = 0.0;
};

// One attacked clip. Metrics are computed on the exported audio, meaning
// s+delta clamped to [-1,1] and quantized to the 16-bit grid; success is
// re-verified on that exported audio. delta_linf is max|delta| of the raw
// attack output, the quantity the attacks' L-infinity contract bounds.
struct ClipOutcome {
  double axis_value = 0.0;
  ArchId model = ArchId::ConvS;
  int repeat = 0;
  uint64_t clip_seed = 0;
  bool success = false;
  int steps_used = 0;
  double linf = 0.0;
  double vqs = 0.0;
  double snr_db = 0.0;
  double delta_linf = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<ClipOutcome> clips;
};

using ModelSet = std::map<ArchId, DetectorModel>;

// count(success) / count(all); empty input is an error.
double attack_success_rate(const std::vector<AttackResult>& results);

// Attacks every (axis value, model, repeat, clip) cell. All seeds are
// derived from (master_seed, axis index, model index, repeat, clip index),
// so results do not depend on scheduling or job count. Mean/std aggregate
// over clips within a repeat (sample std), then average over repeats.
SweepResult run_sweep(const SweepSpec& spec, const ModelSet& models,
                      int jobs);

struct TransferMatrix {
  AttackKind attack = AttackKind::PGD;
  std::string dataset_tag;
  std::vector<ArchId> models;
  // Row-major source x target bypass rates in [0,1]. The diagonal equals
  // the direct (re-verified) ASR of that source run by construction: the
  // same exported audio is scored on every target, the source included.
  std::vector<double> cells;

  double at(int source, int target) const {
    return cells[size_t(source) * models.size() + target];
  }
};

TransferMatrix run_transfer(const AttackSettings& cfg,
                            const std::vector<ArchId>& model_ids,
                            const ModelSet& models, const Manifest& manifest,
                            const std::string& dataset_tag,
                            uint64_t master_seed, int jobs);

// CSV schema: header `<axis>,asr-avg,asr-std,visqol-avg,visqol-std,snr-avg,
// model`, one row per (axis value, model) in record order, floats with 6
// significant digits.
void emit_csv(const std::vector<SweepRecord>& records, SweepAxis axis,
              const std::string& path);

// JSON run record: version string, full config, aggregated records, and
// per-clip outcomes. No timestamps; reruns are byte-identical.
void emit_json(const SweepSpec& spec, const SweepResult& result,
               const std::string& path);

void emit_transfer_csv(const TransferMatrix& m, const std::string& path);
void emit_transfer_json(const TransferMatrix& m, uint64_t master_seed,
                        const std::string& path);

// Shared worker pool helper; fn(i) runs for i in [0, n). jobs <= 1 runs
// serially. The first worker exception is rethrown after join.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace ssdrt

#endif  // SSDRT_HARNESS_HPP_
