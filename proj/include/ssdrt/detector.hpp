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

#ifndef SSDRT_DETECTOR_HPP_
#define SSDRT_DETECTOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ssdrt/corpus.hpp"
#include "ssdrt/net.hpp"
#include "ssdrt/wav.hpp"

namespace ssdrt {

// Four raw-waveform architectures of differing capacity. Parameter counts:
// ConvS 542 < ConvM 1167 < ConvGate 1757 < ConvL 1904. ConvGate is ConvM's
// trunk plus a parallel conv gate branch whose pooled features multiply the
// trunk features elementwise before the dense head. Exact layer tables are
// in detector.cpp (make_layers).
enum class ArchId : uint8_t { ConvS = 0, ConvM = 1, ConvL = 2, ConvGate = 3 };

const char* to_string(ArchId id);
ArchId arch_from_string(const std::string& s);
std::vector<ArchId> all_archs();

// Class order is fixed: index 0 = Real, index 1 = Fake.
inline constexpr int kClassReal = 0;
inline constexpr int kClassFake = 1;

struct Score {
  double p_real = 0.0;
  double p_fake = 0.0;
  Label label = Label::Fake;
};

// Chains are stored in checkpoint declaration order: trunk, gate, head.
// trunk and gate both end at AvgPoolGlobal; head is Dense(c, 2) plus the
// SoftmaxCE marker. gate is empty for every arch but ConvGate.
struct DetectorModel {
  ArchId arch_id = ArchId::ConvS;
  int sample_rate = kSampleRate;
  int input_length = kClipLength;
  std::vector<LayerSpec> trunk;
  std::vector<LayerSpec> gate;
  std::vector<LayerSpec> head;
  ParamSet trunk_params;
  ParamSet gate_params;
  ParamSet head_params;
};

// Seeded initialization; what train(epochs = 0) returns.
DetectorModel make_model(ArchId id, uint64_t init_seed);

// Softmax over forward logits. Ties (exact probability equality) resolve to
// Fake: a tie must not count as a successful bypass.
Score score(const DetectorModel& model, const Waveform& w);

// Gradient of cross_entropy(logits, target) with respect to the waveform
// samples.
std::vector<double> input_gradient(const DetectorModel& model,
                                   const Waveform& w, Label target);

// Attack hot path: one forward pass yields the score and, reusing its
// cache, the input gradient. Operates on a raw sample buffer so attack
// iterates need not round-trip through Waveform invariant checks.
struct ScoreGrad {
  Score score;
  std::vector<double> grad;
};
Score score_raw(const DetectorModel& model, const std::vector<double>& x);
ScoreGrad score_and_input_gradient(const DetectorModel& model,
                                   const std::vector<double>& x, Label target);

struct TrainHp {
  double lr = 0.01;
  int epochs = 60;
  int batch = 16;
  uint64_t seed = 1;
};

// Mini-batch SGD with momentum 0.9 on mean cross-entropy, deterministic
// given hp.seed. Clips are synthesized once up front; batch order reshuffles
// every epoch from a derived seed. Returns the final-epoch model.
DetectorModel train(ArchId id, const Manifest& manifest, const TrainHp& hp);

// Threshold-sweep EER over p_fake scores, linearly interpolated between the
// adjacent operating points when no threshold hits FAR = FRR exactly.
double eval_eer(const DetectorModel& model, const Manifest& manifest);

// Score-level entry point used by eval_eer. Convention: decision is Fake
// iff score >= theta; FAR = fraction of fake scores below theta, FRR =
// fraction of real scores at or above theta.
double eer_from_scores(const std::vector<double>& real_scores,
                       const std::vector<double>& fake_scores);

// Checkpoint layout, little endian throughout:
//   "SSDRT1" magic (6 bytes)
//   u8  arch_id
//   u32 sample_rate
//   u32 input_length
//   u32 parameter count (float32 values)
//   float32 parameter blob, chains in declaration order (trunk, gate,
//     head), per layer weight then bias
//   u32 CRC-32 (zlib polynomial) of every preceding byte
// Round-trip is bit-exact because parameters live on the float32 grid.
void save_checkpoint(const DetectorModel& model, const std::string& path);
DetectorModel load_checkpoint(const std::string& path);
DetectorModel load_checkpoint(const std::string& path, ArchId expected);

}  // namespace ssdrt

#endif  // SSDRT_DETECTOR_HPP_
