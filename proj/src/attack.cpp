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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssdrt/error.hpp"
#include "ssdrt/rng.hpp"

namespace ssdrt {

namespace {

constexpr const char* kModule = "attacks";

void validate_whitebox(const WhiteBoxConfig& cfg) {
  if (cfg.alpha < 0.0) throw Error(kModule, "alpha", "alpha must be >= 0");
  if (cfg.epsilon < 0.0) throw Error(kModule, "epsilon", "epsilon must be >= 0");
  if (cfg.max_iters < 1) throw Error(kModule, "max_iters", "need >= 1");
}

AttackResult whitebox_attack(const DetectorModel& model, const Waveform& s,
                             const WhiteBoxConfig& cfg, bool sign_step) {
  validate_whitebox(cfg);
  if (s.length() != model.input_length) {
    throw Error(kModule, "length", "clip length does not match model");
  }
  const int n = s.length();
  std::vector<double> delta(n, 0.0);
  std::vector<double> x(n);

  auto evaluate = [&]() {
    for (int i = 0; i < n; ++i) x[i] = s.samples[i] + delta[i];
    return score_and_input_gradient(model, x, Label::Real);
  };

  AttackResult res;
  ScoreGrad sg;
  int iters_done = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    sg = evaluate();
    // This evaluation is the post-update success check of the previous
    // iteration; there is no check before the first update.
    if (it > 1 && sg.score.label == Label::Real) {
      res.delta = std::move(delta);
      res.success = true;
      res.steps_used = iters_done;
      res.final_score = sg.score;
      return res;
    }
    for (int i = 0; i < n; ++i) {
      const double g = sg.grad[i];
      double step;
      if (sign_step) {
        step = g > 0.0 ? cfg.alpha : (g < 0.0 ? -cfg.alpha : 0.0);
      } else {
        step = cfg.alpha * g;
      }
      double d = delta[i] - step;
      d = std::clamp(d, -cfg.epsilon, cfg.epsilon);
      if (cfg.clamp_valid_range) {
        d = std::clamp(d, -1.0 - s.samples[i], 1.0 - s.samples[i]);
      }
      delta[i] = d;
    }
    iters_done = it;
  }
  // Final update still needs its success check.
  sg = evaluate();
  res.delta = std::move(delta);
  res.success = sg.score.label == Label::Real;
  res.steps_used = iters_done;
  res.final_score = sg.score;
  return res;
}

}  // namespace

AttackResult pgd_attack(const DetectorModel& model, const Waveform& s,
                        const WhiteBoxConfig& cfg) {
  if (cfg.method != WhiteBoxConfig::Method::PGD) {
    throw Error(kModule, "method", "config method is not PGD");
  }
  return whitebox_attack(model, s, cfg, /*sign_step=*/false);
}

AttackResult ifgsm_attack(const DetectorModel& model, const Waveform& s,
                          const WhiteBoxConfig& cfg) {
  if (cfg.method != WhiteBoxConfig::Method::IFGSM) {
    throw Error(kModule, "method", "config method is not IFGSM");
  }
  return whitebox_attack(model, s, cfg, /*sign_step=*/true);
}

AttackResult simba_attack_with(const ScoreFn& scorer, int length,
                               const std::vector<double>& s,
                               const SimbaConfig& cfg) {
  if (cfg.alpha <= 0.0) throw Error(kModule, "alpha", "alpha must be > 0");
  if (cfg.epsilon < 0.0) throw Error(kModule, "epsilon", "epsilon must be >= 0");
  if (cfg.max_queries < 1) throw Error(kModule, "max_queries", "need >= 1");
  if (cfg.q < 1 || cfg.q > length) {
    throw Error(kModule, "q", "need 1 <= q <= waveform length");
  }
  if (int(s.size()) != length) {
    throw Error(kModule, "length", "sample buffer length mismatch");
  }

  const int n = length;
  Rng rng(derive_seed(cfg.seed, {0}));
  std::vector<double> delta(n, 0.0);
  std::vector<double> x(n);
  std::vector<int> prop_idx(cfg.q);
  std::vector<double> prop_step(cfg.q);
  int queries = 0;

  auto evaluate = [&](const std::vector<double>& d, double r_sign) {
    for (int i = 0; i < n; ++i) x[i] = s[i] + d[i];
    if (r_sign != 0.0) {
      for (int k = 0; k < cfg.q; ++k) {
        x[prop_idx[k]] += r_sign * prop_step[k];
      }
    }
    ++queries;
    return scorer(x);
  };

  AttackResult res;
  Score cached = evaluate(delta, 0.0);  // initial p, counted
  double p = cached.p_real;
  res.accepted_p_trace.push_back(p);

  // Persistent index pool for without-replacement draws; partial
  // Fisher-Yates from the current permutation is still uniform.
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);

  auto try_accept = [&](double dir, const Score& sc) {
    // Apply delta <- delta + dir*r, clip, and recompute p if the clip
    // changed anything. Rolls back when the clipped delta fails to improve
    // on the stored p or the recompute cannot be afforded.
    std::vector<double> next = delta;
    bool clipped = false;
    for (int k = 0; k < cfg.q; ++k) {
      const double v = next[prop_idx[k]] + dir * prop_step[k];
      const double c = std::clamp(v, -cfg.epsilon, cfg.epsilon);
      next[prop_idx[k]] = c;
      if (c != v) clipped = true;
    }
    if (!clipped) {
      delta = std::move(next);
      p = sc.p_real;
      cached = sc;
      res.accepted_p_trace.push_back(p);
      return;
    }
    if (queries >= cfg.max_queries) return;  // cannot verify, roll back
    const Score rescored = evaluate(next, 0.0);
    if (rescored.p_real > p) {
      delta = std::move(next);
      p = rescored.p_real;
      cached = rescored;
      res.accepted_p_trace.push_back(p);
    }
  };

  while (queries < cfg.max_queries) {
    if (cached.label == Label::Real) break;  // cached, costs no query
    // Draw q distinct timesteps with independent signs.
    for (int k = 0; k < cfg.q; ++k) {
      const int j = k + int(rng.below(uint64_t(n - k)));
      std::swap(pool[k], pool[j]);
      prop_idx[k] = pool[k];
      prop_step[k] = (rng.next() & 1) ? cfg.alpha : -cfg.alpha;
    }
    const Score plus = evaluate(delta, +1.0);
    if (plus.p_real > p) {
      try_accept(+1.0, plus);
      continue;
    }
    if (queries >= cfg.max_queries) break;
    const Score minus = evaluate(delta, -1.0);
    if (minus.p_real > p) {
      try_accept(-1.0, minus);
      continue;
    }
    // Rejected proposal: two queries spent, delta unchanged.
  }

  res.delta = std::move(delta);
  res.success = cached.label == Label::Real;
  res.steps_used = queries;
  res.final_score = cached;
  return res;
}

AttackResult simba_attack(const DetectorModel& model, const Waveform& s,
                          const SimbaConfig& cfg) {
  if (s.length() != model.input_length) {
    throw Error(kModule, "length", "clip length does not match model");
  }
  return simba_attack_with(
      [&model](const std::vector<double>& x) { return score_raw(model, x); },
      model.input_length, s.samples, cfg);
}

}  // namespace ssdrt
