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

#include "ssdrt/detector.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include <zlib.h>

#include "ssdrt/error.hpp"

namespace ssdrt {

namespace {

constexpr const char* kModule = "detector";
constexpr char kMagic[6] = {'S', 'S', 'D', 'R', 'T', '1'};

struct ArchDef {
  std::vector<LayerSpec> trunk;
  std::vector<LayerSpec> gate;
  std::vector<LayerSpec> head;
};

// Architecture table. First layers use 64-tap kernels on a 2 ms stride:
// long enough to resolve the air band against the voiced spectrum two
// octaves below, short enough that a forward pass stays under ~1.1M MACs.
// The gate branch reads the raw waveform on its own coarser grid.
ArchDef make_layers(ArchId id) {
  ArchDef d;
  auto head_for = [](int c) {
    return std::vector<LayerSpec>{DenseSpec{c, 2}, SoftmaxCESpec{}};
  };
  switch (id) {
    case ArchId::ConvS:
      d.trunk = {Conv1dSpec{64, 1, 4, 32, 1}, ReluSpec{}, MaxPool1dSpec{4, 4},
                 Conv1dSpec{8, 4, 8, 2, 1},   ReluSpec{}, AvgPoolGlobalSpec{}};
      d.head = head_for(8);
      break;
    case ArchId::ConvM:
      d.trunk = {Conv1dSpec{64, 1, 5, 32, 1},  ReluSpec{}, MaxPool1dSpec{4, 4},
                 Conv1dSpec{8, 5, 10, 2, 1},   ReluSpec{}, MaxPool1dSpec{2, 2},
                 Conv1dSpec{4, 10, 10, 1, 1},  ReluSpec{}, AvgPoolGlobalSpec{}};
      d.head = head_for(10);
      break;
    case ArchId::ConvL:
      d.trunk = {Conv1dSpec{64, 1, 6, 32, 1},  ReluSpec{}, MaxPool1dSpec{4, 4},
                 Conv1dSpec{8, 6, 14, 2, 1},   ReluSpec{}, MaxPool1dSpec{2, 2},
                 Conv1dSpec{4, 14, 14, 1, 2},  ReluSpec{}, AvgPoolGlobalSpec{}};
      d.head = head_for(14);
      break;
    case ArchId::ConvGate:
      d.trunk = {Conv1dSpec{64, 1, 5, 32, 1},  ReluSpec{}, MaxPool1dSpec{4, 4},
                 Conv1dSpec{8, 5, 10, 2, 1},   ReluSpec{}, MaxPool1dSpec{2, 2},
                 Conv1dSpec{4, 10, 10, 1, 1},  ReluSpec{}, AvgPoolGlobalSpec{}};
      d.gate = {Conv1dSpec{64, 1, 4, 64, 1}, ReluSpec{}, MaxPool1dSpec{4, 4},
                Conv1dSpec{8, 4, 10, 4, 1}, ReluSpec{}, AvgPoolGlobalSpec{}};
      d.head = head_for(10);
      break;
  }
  return d;
}

Tensor as_input_tensor(const std::vector<double>& x) {
  Tensor t;
  t.shape = {1, int(x.size())};
  t.data = x;
  return t;
}

void check_input(const DetectorModel& model, const Waveform& w) {
  if (w.length() != model.input_length) {
    throw Error(kModule, "length",
                "waveform length " + std::to_string(w.length()) +
                    " does not match model input length " +
                    std::to_string(model.input_length));
  }
  if (w.sample_rate != model.sample_rate) {
    throw Error(kModule, "sample_rate",
                "waveform rate " + std::to_string(w.sample_rate) +
                    " does not match model rate " +
                    std::to_string(model.sample_rate));
  }
}

struct ModelForward {
  ForwardResult trunk;
  ForwardResult gate;   // unused when the model has no gate branch
  ForwardResult head;
  Tensor features;      // head input, after the gate product if present
};

ModelForward model_forward(const DetectorModel& model, const Tensor& input) {
  ModelForward mf;
  mf.trunk = forward(model.trunk, model.trunk_params, input);
  if (!model.gate.empty()) {
    mf.gate = forward(model.gate, model.gate_params, input);
    mf.features = mf.trunk.output;
    for (size_t i = 0; i < mf.features.data.size(); ++i) {
      mf.features.data[i] *= mf.gate.output.data[i];
    }
  } else {
    mf.features = mf.trunk.output;
  }
  mf.head = forward(model.head, model.head_params, mf.features);
  return mf;
}

Score score_from_logits(const Tensor& logits) {
  const auto p = softmax2(logits);
  Score s;
  s.p_real = p[kClassReal];
  s.p_fake = p[kClassFake];
  // Tie resolves to Fake.
  s.label = s.p_real > s.p_fake ? Label::Real : Label::Fake;
  return s;
}

// Backpropagates a gradient at the head input through trunk (and gate) down
// to the waveform. Fills per-chain parameter gradients when requested.
Tensor model_backward(const DetectorModel& model, const ModelForward& mf,
                      const Tensor& grad_logits, ParamSet* trunk_g,
                      ParamSet* gate_g, ParamSet* head_g) {
  Tensor grad_features;
  if (head_g) {
    *head_g = backward_params(mf.head.cache, grad_logits);
    grad_features = backward_input(mf.head.cache, grad_logits);
  } else {
    grad_features = backward_input(mf.head.cache, grad_logits);
  }
  if (model.gate.empty()) {
    if (trunk_g) *trunk_g = backward_params(mf.trunk.cache, grad_features);
    return backward_input(mf.trunk.cache, grad_features);
  }
  // Product rule at the feature join: d/du (u*g) = g, d/dg (u*g) = u.
  Tensor grad_u = grad_features;
  Tensor grad_g = grad_features;
  for (size_t i = 0; i < grad_features.data.size(); ++i) {
    grad_u.data[i] *= mf.gate.output.data[i];
    grad_g.data[i] *= mf.trunk.output.data[i];
  }
  if (trunk_g) *trunk_g = backward_params(mf.trunk.cache, grad_u);
  if (gate_g) *gate_g = backward_params(mf.gate.cache, grad_g);
  Tensor gin = backward_input(mf.trunk.cache, grad_u);
  Tensor gin_gate = backward_input(mf.gate.cache, grad_g);
  for (size_t i = 0; i < gin.data.size(); ++i) {
    gin.data[i] += gin_gate.data[i];
  }
  return gin;
}

uint32_t crc_update(uint32_t crc, const void* data, size_t n) {
  return uint32_t(
      crc32(crc, reinterpret_cast<const unsigned char*>(data), uInt(n)));
}

void append_u32(std::string& out, uint32_t v) {
  out.push_back(char(v & 0xFF));
  out.push_back(char((v >> 8) & 0xFF));
  out.push_back(char((v >> 16) & 0xFF));
  out.push_back(char((v >> 24) & 0xFF));
}

uint32_t take_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

void append_params(std::string& out, const ParamSet& ps) {
  for (const LayerParams& lp : ps) {
    for (const Tensor* t : {&lp.weight, &lp.bias}) {
      for (double v : t->data) {
        const float f = float(v);
        uint32_t bits;
        std::memcpy(&bits, &f, 4);
        append_u32(out, bits);
      }
    }
  }
}

int64_t param_count(const ParamSet& ps) {
  int64_t n = 0;
  for (const LayerParams& lp : ps) n += lp.weight.size() + lp.bias.size();
  return n;
}

}  // namespace

const char* to_string(ArchId id) {
  switch (id) {
    case ArchId::ConvS: return "ConvS";
    case ArchId::ConvM: return "ConvM";
    case ArchId::ConvL: return "ConvL";
    case ArchId::ConvGate: return "ConvGate";
  }
  return "?";
}

ArchId arch_from_string(const std::string& s) {
  for (ArchId id : all_archs()) {
    if (s == to_string(id)) return id;
  }
  throw Error(kModule, "arch_id", "unknown architecture " + s);
}

std::vector<ArchId> all_archs() {
  return {ArchId::ConvS, ArchId::ConvM, ArchId::ConvL, ArchId::ConvGate};
}

namespace {

// Filterbank init for a first conv layer reading raw samples: channel c gets
// a Hann-windowed bandpass impulse response. The bands partition
// [100, 6400] Hz geometrically into c_out + 1 slices with the lowest slice
// dropped, so the top channel always opens above the harmonic range and the
// bank starts frequency-selective instead of white. A small seeded jitter
// keeps distinct init seeds from colliding; per-filter L2 matches the
// He-init expectation for the same shape.
void bandpass_bank_init(const Conv1dSpec& spec, LayerParams& lp,
                        int sample_rate, Rng& rng) {
  const int k = spec.kernel;
  const double ratio =
      std::pow(6400.0 / 100.0, 1.0 / double(spec.c_out + 1));
  const double center = 0.5 * double(k - 1);
  for (int c = 0; c < spec.c_out; ++c) {
    const double f_lo = 100.0 * std::pow(ratio, c + 1);
    const double f_hi = 100.0 * std::pow(ratio, c + 2);
    // Gain rises 6 dB per octave toward the top band (pre-emphasis), so the
    // falling voiced spectrum maps to comparable output scales per channel,
    // and the overall level puts pooled band amplitudes near unit scale on
    // full-scale program material.
    const double target_l2 = std::sqrt(2.0 / double(spec.c_in)) *
                             std::sqrt(f_lo * f_hi) / 800.0;
    std::vector<double> h(k);
    double norm2 = 0.0;
    for (int t = 0; t < k; ++t) {
      const double tau = (double(t) - center) / double(sample_rate);
      double v;
      if (t * 2 == k - 1 || std::abs(tau) < 1e-15) {
        v = 2.0 * (f_hi - f_lo) / double(sample_rate);
      } else {
        v = (std::sin(2.0 * M_PI * f_hi * tau) -
             std::sin(2.0 * M_PI * f_lo * tau)) /
            (M_PI * tau * double(sample_rate));
      }
      const double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * t / double(k - 1));
      v *= w;
      v += 0.02 * target_l2 / std::sqrt(double(k)) * rng.normal();
      h[t] = v;
      norm2 += v * v;
    }
    const double rescale = target_l2 / std::sqrt(norm2);
    for (int t = 0; t < k; ++t) {
      lp.weight.data[size_t(c) * k + t] = h[t] * rescale;
    }
  }
}

// Later conv stages start as channel passthroughs: output channel o reads
// input channel o mod c_in through a center-tap Dirac plus jitter. Together
// with the first-layer bank this makes the head inputs per-band amplitude
// summaries at init, so the readout problem starts near-linear; training
// is free to move the weights anywhere from there.
void passthrough_init(const Conv1dSpec& spec, LayerParams& lp, Rng& rng) {
  const int k = spec.kernel;
  const double jitter = 0.02 / std::sqrt(double(spec.c_in * k));
  for (double& v : lp.weight.data) v = jitter * rng.normal();
  for (int o = 0; o < spec.c_out; ++o) {
    const int src = o % spec.c_in;
    const size_t at = (size_t(o) * spec.c_in + src) * k + k / 2;
    lp.weight.data[at] += 1.0;
  }
}

void apply_bank_init(const std::vector<LayerSpec>& layers, ParamSet& params,
                     int sample_rate, Rng& rng) {
  if (layers.empty()) return;
  const auto* first = std::get_if<Conv1dSpec>(&layers[0]);
  if (first == nullptr || first->c_in != 1) return;
  bandpass_bank_init(*first, params[0], sample_rate, rng);
  for (size_t i = 1; i < layers.size(); ++i) {
    if (const auto* c = std::get_if<Conv1dSpec>(&layers[i])) {
      passthrough_init(*c, params[i], rng);
    }
  }
  round_params_to_float32(params);
}

}  // namespace

DetectorModel make_model(ArchId id, uint64_t init_seed) {
  DetectorModel m;
  m.arch_id = id;
  ArchDef def = make_layers(id);
  m.trunk = std::move(def.trunk);
  m.gate = std::move(def.gate);
  m.head = std::move(def.head);
  Rng rng(init_seed);
  // One stream in declaration order; the gate draw count depends on the
  // arch but the arch fixes the layer list, so this stays reproducible.
  m.trunk_params = init_params(m.trunk, rng);
  m.gate_params = init_params(m.gate, rng);
  m.head_params = init_params(m.head, rng);
  // Sample-domain front ends start as a filterbank on a separate stream.
  Rng bank_rng(derive_seed(init_seed, {7}));
  apply_bank_init(m.trunk, m.trunk_params, m.sample_rate, bank_rng);
  apply_bank_init(m.gate, m.gate_params, m.sample_rate, bank_rng);
  return m;
}

Score score_raw(const DetectorModel& model, const std::vector<double>& x) {
  if (int(x.size()) != model.input_length) {
    throw Error(kModule, "length", "sample buffer length mismatch");
  }
  ModelForward mf = model_forward(model, as_input_tensor(x));
  return score_from_logits(mf.head.output);
}

Score score(const DetectorModel& model, const Waveform& w) {
  check_input(model, w);
  return score_raw(model, w.samples);
}

ScoreGrad score_and_input_gradient(const DetectorModel& model,
                                   const std::vector<double>& x,
                                   Label target) {
  if (int(x.size()) != model.input_length) {
    throw Error(kModule, "length", "sample buffer length mismatch");
  }
  ModelForward mf = model_forward(model, as_input_tensor(x));
  ScoreGrad out;
  out.score = score_from_logits(mf.head.output);
  const int target_class =
      target == Label::Real ? kClassReal : kClassFake;
  Tensor gl = cross_entropy_grad(mf.head.output, target_class);
  Tensor gin = model_backward(model, mf, gl, nullptr, nullptr, nullptr);
  out.grad = std::move(gin.data);
  return out;
}

std::vector<double> input_gradient(const DetectorModel& model,
                                   const Waveform& w, Label target) {
  check_input(model, w);
  return score_and_input_gradient(model, w.samples, target).grad;
}

DetectorModel train(ArchId id, const Manifest& manifest, const TrainHp& hp) {
  if (manifest.split != Split::Train) {
    throw Error(kModule, "split", "training requires the Train split");
  }
  if (manifest.clips.empty()) {
    throw Error(kModule, "manifest", "empty training manifest");
  }
  if (hp.batch < 1 || hp.epochs < 0 || hp.lr <= 0.0) {
    throw Error(kModule, "hp", "need batch >= 1, epochs >= 0, lr > 0");
  }

  DetectorModel model = make_model(id, derive_seed(hp.seed, {0}));

  const size_t n = manifest.clips.size();
  std::vector<std::vector<double>> clips(n);
  std::vector<int> targets(n);
  for (size_t i = 0; i < n; ++i) {
    clips[i] =
        synth_clip(manifest.clips[i], manifest.sample_rate).samples;
    targets[i] =
        manifest.clips[i].label == Label::Real ? kClassReal : kClassFake;
  }

  // Parameterless layers hold empty tensors; Tensor::zeros would turn their
  // empty shape into a scalar, so emptiness is preserved explicitly.
  auto zero_like = [](const ParamSet& ps) {
    ParamSet z(ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
      if (!ps[i].weight.empty())
        z[i].weight = Tensor::zeros(ps[i].weight.shape);
      if (!ps[i].bias.empty()) z[i].bias = Tensor::zeros(ps[i].bias.shape);
    }
    return z;
  };
  ParamSet vel_trunk = zero_like(model.trunk_params);
  ParamSet vel_gate = zero_like(model.gate_params);
  ParamSet vel_head = zero_like(model.head_params);

  constexpr double kMomentum = 0.9;
  auto apply = [&](ParamSet& params, ParamSet& vel, const ParamSet& grad,
                   double scale) {
    for (size_t i = 0; i < params.size(); ++i) {
      for (int which = 0; which < 2; ++which) {
        Tensor& p = which ? params[i].bias : params[i].weight;
        Tensor& v = which ? vel[i].bias : vel[i].weight;
        const Tensor& g = which ? grad[i].bias : grad[i].weight;
        if (p.empty()) continue;
        for (size_t k = 0; k < p.data.size(); ++k) {
          v.data[k] = kMomentum * v.data[k] + scale * g.data[k];
          p.data[k] -= hp.lr * v.data[k];
        }
      }
    }
  };

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(hp.seed, {1, uint64_t(epoch)}));
    for (size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    for (size_t start = 0; start < n; start += size_t(hp.batch)) {
      const size_t end = std::min(n, start + size_t(hp.batch));
      ParamSet g_trunk = zero_like(model.trunk_params);
      ParamSet g_gate = zero_like(model.gate_params);
      ParamSet g_head = zero_like(model.head_params);
      auto accumulate = [](ParamSet& into, const ParamSet& from) {
        for (size_t i = 0; i < into.size(); ++i) {
          for (size_t k = 0; k < into[i].weight.data.size(); ++k) {
            into[i].weight.data[k] += from[i].weight.data[k];
          }
          for (size_t k = 0; k < into[i].bias.data.size(); ++k) {
            into[i].bias.data[k] += from[i].bias.data[k];
          }
        }
      };
      for (size_t bi = start; bi < end; ++bi) {
        const size_t idx = order[bi];
        ModelForward mf =
            model_forward(model, as_input_tensor(clips[idx]));
        Tensor gl = cross_entropy_grad(mf.head.output, targets[idx]);
        ParamSet bt, bg, bh;
        model_backward(model, mf, gl, &bt, &bg, &bh);
        accumulate(g_trunk, bt);
        if (!model.gate.empty()) accumulate(g_gate, bg);
        accumulate(g_head, bh);
      }
      const double scale = 1.0 / double(end - start);
      apply(model.trunk_params, vel_trunk, g_trunk, scale);
      if (!model.gate.empty()) apply(model.gate_params, vel_gate, g_gate, scale);
      apply(model.head_params, vel_head, g_head, scale);
      // Keep parameters on the float32 grid; the checkpoint blob is float32
      // and must reproduce the in-memory model exactly.
      round_params_to_float32(model.trunk_params);
      round_params_to_float32(model.gate_params);
      round_params_to_float32(model.head_params);
    }
  }
  return model;
}

double eer_from_scores(const std::vector<double>& real_scores,
                       const std::vector<double>& fake_scores) {
  if (real_scores.empty() || fake_scores.empty()) {
    throw Error(kModule, "scores", "both classes required for EER");
  }
  std::vector<double> real = real_scores, fake = fake_scores;
  std::sort(real.begin(), real.end());
  std::sort(fake.begin(), fake.end());
  std::vector<double> thresholds;
  thresholds.reserve(real.size() + fake.size() + 1);
  thresholds.insert(thresholds.end(), real.begin(), real.end());
  thresholds.insert(thresholds.end(), fake.begin(), fake.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  const double nr = double(real.size()), nf = double(fake.size());
  auto far_at = [&](double theta) {
    // Fakes scored below theta are accepted as real.
    return double(std::lower_bound(fake.begin(), fake.end(), theta) -
                  fake.begin()) /
           nf;
  };
  auto frr_at = [&](double theta) {
    // Reals scored at or above theta are rejected as fake.
    return double(real.end() -
                  std::lower_bound(real.begin(), real.end(), theta)) /
           nr;
  };

  // FAR - FRR is nondecreasing in theta: -1 at the global minimum score,
  // +1 at +inf, so a sign change always exists.
  double prev_far = far_at(thresholds[0]);
  double prev_frr = frr_at(thresholds[0]);
  if (prev_far >= prev_frr) return prev_far;  // degenerate one-point case
  for (size_t i = 1; i < thresholds.size(); ++i) {
    const double far = far_at(thresholds[i]);
    const double frr = frr_at(thresholds[i]);
    if (far == frr) return far;
    if (far > frr) {
      const double denom = (far - prev_far) - (frr - prev_frr);
      const double t = (prev_frr - prev_far) / denom;
      return prev_far + (far - prev_far) * t;
    }
    prev_far = far;
    prev_frr = frr;
  }
  return 1.0;  // unreachable: the +inf endpoint has FAR 1, FRR 0
}

double eval_eer(const DetectorModel& model, const Manifest& manifest) {
  std::vector<double> real, fake;
  for (const ClipSpec& spec : manifest.clips) {
    const Waveform w = synth_clip(spec, manifest.sample_rate);
    const Score s = score(model, w);
    (spec.label == Label::Real ? real : fake).push_back(s.p_fake);
  }
  if (real.empty() || fake.empty()) {
    throw Error(kModule, "manifest", "EER needs both classes in the manifest");
  }
  return eer_from_scores(real, fake);
}

void save_checkpoint(const DetectorModel& model, const std::string& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  out.push_back(char(uint8_t(model.arch_id)));
  append_u32(out, uint32_t(model.sample_rate));
  append_u32(out, uint32_t(model.input_length));
  const int64_t count = param_count(model.trunk_params) +
                        param_count(model.gate_params) +
                        param_count(model.head_params);
  append_u32(out, uint32_t(count));
  append_params(out, model.trunk_params);
  append_params(out, model.gate_params);
  append_params(out, model.head_params);
  const uint32_t crc = crc_update(crc_update(0, nullptr, 0), out.data(),
                                  out.size());
  append_u32(out, crc);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(kModule, "file", "cannot open for write: " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw Error(kModule, "file", "short write: " + path);
}

DetectorModel load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(kModule, "file", "cannot open: " + path);
  std::string raw((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  const uint8_t* p = reinterpret_cast<const uint8_t*>(raw.data());
  if (raw.size() < sizeof(kMagic) + 1 + 4 + 4 + 4 + 4) {
    throw Error(kModule, "truncated", "checkpoint too short: " + path);
  }
  if (std::memcmp(p, kMagic, sizeof(kMagic)) != 0) {
    throw Error(kModule, "magic", "bad magic or version: " + path);
  }
  const uint32_t stored_crc = take_u32(p + raw.size() - 4);
  const uint32_t crc = crc_update(crc_update(0, nullptr, 0), raw.data(),
                                  raw.size() - 4);
  if (crc != stored_crc) {
    throw Error(kModule, "checksum", "CRC mismatch: " + path);
  }
  size_t off = sizeof(kMagic);
  const uint8_t arch_byte = p[off++];
  if (arch_byte > uint8_t(ArchId::ConvGate)) {
    throw Error(kModule, "arch_id",
                "unknown arch id " + std::to_string(int(arch_byte)));
  }
  DetectorModel model = make_model(ArchId(arch_byte), 0);
  model.sample_rate = int(take_u32(p + off));
  off += 4;
  model.input_length = int(take_u32(p + off));
  off += 4;
  const uint32_t count = take_u32(p + off);
  off += 4;
  const int64_t expect = param_count(model.trunk_params) +
                         param_count(model.gate_params) +
                         param_count(model.head_params);
  if (int64_t(count) != expect ||
      raw.size() != off + size_t(count) * 4 + 4) {
    throw Error(kModule, "param_count", "parameter blob size mismatch");
  }
  auto read_into = [&](ParamSet& ps) {
    for (LayerParams& lp : ps) {
      for (Tensor* t : {&lp.weight, &lp.bias}) {
        for (double& v : t->data) {
          const uint32_t bits = take_u32(p + off);
          off += 4;
          float fv;
          std::memcpy(&fv, &bits, 4);
          v = double(fv);
        }
      }
    }
  };
  read_into(model.trunk_params);
  read_into(model.gate_params);
  read_into(model.head_params);
  return model;
}

DetectorModel load_checkpoint(const std::string& path, ArchId expected) {
  DetectorModel m = load_checkpoint(path);
  if (m.arch_id != expected) {
    throw Error(kModule, "arch_id",
                std::string("checkpoint holds ") + to_string(m.arch_id) +
                    ", caller requested " + to_string(expected));
  }
  return m;
}

}  // namespace ssdrt
