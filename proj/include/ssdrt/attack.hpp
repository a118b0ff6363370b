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

#ifndef SSDRT_ATTACK_HPP_
#define SSDRT_ATTACK_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "ssdrt/detector.hpp"
#include "ssdrt/wav.hpp"

namespace ssdrt {

struct WhiteBoxConfig {
  enum class Method { PGD, IFGSM };
  Method method = Method::PGD;
  double alpha = 1e-3;    // step size
  double epsilon = 0.004; // L-infinity budget
  int max_iters = 200;
  // Shrink delta elementwise so s + delta stays in [-1, 1]. Exported audio
  // is clamped regardless; this keeps the internal iterate legal too.
  bool clamp_valid_range = true;
};

struct SimbaConfig {
  double alpha = 0.005;
  int q = 2000;           // timesteps per proposal
  int max_queries = 7500;
  double epsilon = 0.05;
  uint64_t seed = 1;
};

struct AttackResult {
  std::vector<double> delta;
  bool success = false;
  // Iterations executed for white-box; model evaluations for SimBA.
  int steps_used = 0;
  Score final_score;
  // SimBA only: history of the best-so-far p_real, starting at the initial
  // score. Strictly increasing by construction.
  std::vector<double> accepted_p_trace;
};

// Iterative gradient descent on delta against cross-entropy toward Real,
// projected into the epsilon ball after every step; stops as soon as the
// post-update signal scores Real. delta starts at zero and there is no
// pre-update success check, so at least one update always runs. Each
// iteration costs one model evaluation: the evaluation opening iteration
// t+1 doubles as the success check for iteration t.
AttackResult pgd_attack(const DetectorModel& model, const Waveform& s,
                        const WhiteBoxConfig& cfg);

// Same loop with delta stepping by alpha * sign(gradient); sign(0) = 0.
AttackResult ifgsm_attack(const DetectorModel& model, const Waveform& s,
                          const WhiteBoxConfig& cfg);

// Query-only attack. Each trial draws q distinct timesteps (without
// replacement) with independent +-alpha signs forming r, then tries
// s+delta+r and on failure s+delta-r; a strict p_real increase accepts.
// Acceptance clips delta to the epsilon ball; when clipping changed delta
// the stored p is recomputed on the clipped delta (one more counted query)
// and the acceptance is rolled back if the recomputed p no longer strictly
// beats the stored one or the budget ran out first. Every model evaluation,
// including the initial score, counts toward max_queries; steps_used is
// that exact count. Success is checked before each trial on the cached
// score, costing nothing.
AttackResult simba_attack(const DetectorModel& model, const Waveform& s,
                          const SimbaConfig& cfg);

// Test seam: identical procedure with the model evaluation behind a
// callable, so query accounting is auditable with a counting wrapper.
using ScoreFn = std::function<Score(const std::vector<double>&)>;
AttackResult simba_attack_with(const ScoreFn& scorer, int length,
                               const std::vector<double>& s,
                               const SimbaConfig& cfg);

}  // namespace ssdrt

#endif  // SSDRT_ATTACK_HPP_
