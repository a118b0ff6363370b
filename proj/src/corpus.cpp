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

#include "ssdrt/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "ssdrt/error.hpp"
#include "ssdrt/fft.hpp"
#include "ssdrt/rng.hpp"

namespace ssdrt {

namespace {

constexpr const char* kModule = "corpus";

// Synthesis constants. Part of the corpus contract: changing any of them
// changes every generated sample.
constexpr double kHarmonicCeilingHz = 2800.0;
constexpr double kPeak = 0.9;
constexpr int kStftSize = 512;
constexpr int kStftHop = 256;

// Air band: every clip carries band noise of exactly known RMS in a region
// the harmonic voice never reaches. The band sits far above the voice
// ceiling so even a 16-tap first conv layer separates it from the voiced
// energy by frequency alone.
constexpr double kAirLoHz = 4000.0;
constexpr double kAirHiHz = 5400.0;
constexpr int kAirComponents = 280;
constexpr double kAirRms = 0.06;

// SpectralNotch: comb of narrow zeroed bands across the air band. Centers
// every 200 Hz, half-width 50 Hz, killing half the air energy. Positions are
// fixed (not per clip): the detectors must be able to learn the comb as an
// invariant cue, and the resulting air-RMS drop is the same for every clip.
constexpr double kNotchFirstHz = 4100.0;
constexpr double kNotchStepHz = 200.0;
constexpr int kNotchCount = 7;
constexpr double kNotchHalfWidthHz = 15.0;

// Coarse enough to leave an audible texture, fine enough that the air band
// (RMS well above half a step) survives; Quantize stays a texture artifact,
// not a second air cut.
constexpr int kQuantizeLevels = 96;

double peak_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

void normalize_peak(std::vector<double>& x) {
  const double m = peak_abs(x);
  if (m == 0.0) return;
  const double scale = kPeak / m;
  for (double& v : x) v *= scale;
}

// Pink noise by the Voss-McCartney row scheme: row k redraws every 2^k
// samples; the sum of 16 rows plus a white term approximates 1/f.
std::vector<double> pink_noise(int n, Rng& rng) {
  constexpr int kRows = 16;
  double rows[kRows];
  for (double& r : rows) r = rng.uniform(-1.0, 1.0);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      for (int k = 0; k < kRows; ++k) {
        if (i % (1 << k) == 0) {
          rows[k] = rng.uniform(-1.0, 1.0);
        } else {
          break;  // higher rows tick on strictly coarser grids
        }
      }
    }
    double s = rng.uniform(-1.0, 1.0);
    for (double r : rows) s += r;
    out[i] = s / double(kRows + 1);
  }
  return out;
}

struct Stft {
  // Frames start at offsets m*hop - hop in padded coordinates, so every
  // real sample sits in the exact-COLA interior (Hann at 50% overlap sums
  // to 1 everywhere for the periodic window).
  std::vector<double> window = hann_window(kStftSize);

  template <typename FrameFn>
  void process(std::vector<double>& x, FrameFn&& modify) {
    const int n = int(x.size());
    const int pad = kStftHop;
    const int padded = pad + n + kStftSize;
    std::vector<double> in(padded, 0.0), out(padded, 0.0);
    std::copy(x.begin(), x.end(), in.begin() + pad);
    std::vector<std::complex<double>> frame(kStftSize);
    const int frames = (padded - kStftSize) / kStftHop + 1;
    for (int m = 0; m < frames; ++m) {
      const int off = m * kStftHop;
      for (int i = 0; i < kStftSize; ++i) {
        frame[i] = in[off + i] * window[i];
      }
      fft(frame, false);
      modify(m, frame);
      fft(frame, true);
      // Analysis window only; COLA of the window itself reconstructs
      // unmodified frames exactly.
      for (int i = 0; i < kStftSize; ++i) {
        out[off + i] += frame[i].real();
      }
    }
    std::copy(out.begin() + pad, out.begin() + pad + n, x.begin());
  }
};

void apply_spectral_notch(std::vector<double>& x, int sample_rate) {
  const double bin_hz = double(sample_rate) / kStftSize;
  std::vector<int> zero_bins;
  for (int c = 0; c < kNotchCount; ++c) {
    const double fc = kNotchFirstHz + c * kNotchStepHz;
    const int lo = int(std::ceil((fc - kNotchHalfWidthHz) / bin_hz));
    const int hi = int(std::floor((fc + kNotchHalfWidthHz) / bin_hz));
    for (int k = std::max(lo, 1); k <= std::min(hi, kStftSize / 2); ++k) {
      zero_bins.push_back(k);
    }
  }
  Stft stft;
  stft.process(x, [&](int, std::vector<std::complex<double>>& frame) {
    for (int k : zero_bins) {
      frame[k] = 0.0;
      if (k != kStftSize / 2) frame[kStftSize - k] = 0.0;
    }
  });
}

void apply_phase_jitter(std::vector<double>& x, Rng& rng) {
  Stft stft;
  stft.process(x, [&](int, std::vector<std::complex<double>>& frame) {
    if (rng.uniform() >= 0.5) return;
    for (int k = 1; k < kStftSize / 2; ++k) {
      const double phi = rng.uniform(-M_PI, M_PI);
      const std::complex<double> rot(std::cos(phi), std::sin(phi));
      frame[k] *= rot;
      frame[kStftSize - k] = std::conj(frame[k]);
    }
    // DC and Nyquist stay real so the inverse transform stays real.
  });
}

void apply_quantize(std::vector<double>& x) {
  for (double& v : x) {
    v = std::round(v * kQuantizeLevels) / kQuantizeLevels;
  }
}

// Band noise over [kAirLoHz, kAirHiHz] with RMS exactly kAirRms: random
// phases on every FFT bin inside the band, inverse transform, then one
// scalar rescale. The exact RMS makes the class gap after the notch a
// corpus constant instead of a per-clip draw.
std::vector<double> air_band(int n, int sample_rate, Rng& rng) {
  size_t n2 = 1;
  while (n2 < size_t(n)) n2 <<= 1;
  std::vector<std::complex<double>> spec(n2);
  const double bin_hz = double(sample_rate) / double(n2);
  for (size_t k = 1; k < n2 / 2; ++k) {
    const double f = k * bin_hz;
    if (f < kAirLoHz || f > kAirHiHz) continue;
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    spec[k] = std::complex<double>(std::cos(phi), std::sin(phi));
    spec[n2 - k] = std::conj(spec[k]);
  }
  fft(spec, true);
  std::vector<double> out(n);
  double power = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = spec[i].real();
    power += out[i] * out[i];
  }
  if (power > 0.0) {
    const double scale = kAirRms / std::sqrt(power / double(n));
    for (double& v : out) v *= scale;
  }
  return out;
}

}  // namespace

const char* to_string(Label l) { return l == Label::Real ? "Real" : "Fake"; }

const char* to_string(Split s) {
  switch (s) {
    case Split::Train: return "Train";
    case Split::Eval: return "Eval";
    case Split::Redteam: return "Redteam";
  }
  return "?";
}

const char* to_string(ArtifactProfile p) {
  switch (p) {
    case ArtifactProfile::None: return "None";
    case ArtifactProfile::SpectralNotch: return "SpectralNotch";
    case ArtifactProfile::PhaseJitter: return "PhaseJitter";
    case ArtifactProfile::Quantize: return "Quantize";
  }
  return "?";
}

Waveform synth_clip(const ClipSpec& spec, int sample_rate) {
  if (spec.f0 < 60.0 || spec.f0 > 300.0) {
    throw Error(kModule, "f0", "fundamental out of [60, 300] Hz");
  }
  if (spec.duration_s <= 0.0) {
    throw Error(kModule, "duration_s", "duration must be positive");
  }
  if ((spec.label == Label::Real) !=
      (spec.artifact_profile == ArtifactProfile::None)) {
    throw Error(kModule, "artifact_profile",
                "label Real iff artifact_profile None");
  }
  const int n = int(std::lround(spec.duration_s * sample_rate));

  // Independent sub-streams per stage; draw counts in one stage cannot
  // shift another stage's randomness.
  Rng harm_rng(derive_seed(spec.seed, {1}));
  Rng noise_rng(derive_seed(spec.seed, {2}));
  Rng artifact_rng(derive_seed(spec.seed, {3}));
  Rng air_rng(derive_seed(spec.seed, {4}));

  const int n_harm =
      std::max(1, int(std::floor(kHarmonicCeilingHz / spec.f0)));
  const double decay = harm_rng.uniform(1.0, 1.1);
  std::vector<double> amp(n_harm), phase_cos(n_harm), phase_sin(n_harm);
  for (int h = 0; h < n_harm; ++h) {
    amp[h] = std::pow(double(h + 1), -decay);
    const double phi = harm_rng.uniform(0.0, 2.0 * M_PI);
    phase_cos[h] = std::cos(phi);
    phase_sin[h] = std::sin(phi);
  }

  // Pitch jitter: three slow sinusoids modulating the instantaneous
  // frequency; integrated into the phase so harmonics stay coherent.
  double jit_amp[3], jit_hz[3], jit_ph[3];
  for (int i = 0; i < 3; ++i) {
    jit_amp[i] = harm_rng.uniform(0.002, 0.008);
    jit_hz[i] = harm_rng.uniform(0.4, 2.5);
    jit_ph[i] = harm_rng.uniform(0.0, 2.0 * M_PI);
  }
  const double env_hz = harm_rng.uniform(0.3, 1.2);
  const double env_ph = harm_rng.uniform(0.0, 2.0 * M_PI);

  std::vector<double> x(n);
  double theta = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = double(i) / sample_rate;
    double jitter = 0.0;
    for (int j = 0; j < 3; ++j) {
      jitter += jit_amp[j] * std::sin(2.0 * M_PI * jit_hz[j] * t + jit_ph[j]);
    }
    theta += 2.0 * M_PI * spec.f0 * (1.0 + jitter) / sample_rate;
    // sin(h*theta + phi_h) for all h by angle-addition recurrence:
    // one sincos per sample instead of one per harmonic.
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double ch = c1, sh = s1;
    double acc = 0.0;
    for (int h = 0; h < n_harm; ++h) {
      acc += amp[h] * (sh * phase_cos[h] + ch * phase_sin[h]);
      const double ch_next = ch * c1 - sh * s1;
      sh = sh * c1 + ch * s1;
      ch = ch_next;
    }
    const double env = 0.85 + 0.15 * std::sin(2.0 * M_PI * env_hz * t + env_ph);
    x[i] = env * acc;
  }

  const double noise_level = noise_rng.uniform(0.006, 0.009) * peak_abs(x);
  std::vector<double> pink = pink_noise(n, noise_rng);
  for (int i = 0; i < n; ++i) x[i] += noise_level * pink[i];

  normalize_peak(x);

  // Air after the peak normalization so its RMS is absolute, and no
  // normalization afterwards so the artifact transforms cannot rescale the
  // class gap. Peak may exceed kPeak by the air's crest; export clamps.
  std::vector<double> air = air_band(n, sample_rate, air_rng);
  for (int i = 0; i < n; ++i) x[i] += air[i];

  switch (spec.artifact_profile) {
    case ArtifactProfile::None:
      break;
    case ArtifactProfile::SpectralNotch:
      apply_spectral_notch(x, sample_rate);
      break;
    case ArtifactProfile::PhaseJitter:
      apply_phase_jitter(x, artifact_rng);
      break;
    case ArtifactProfile::Quantize:
      apply_quantize(x);
      break;
  }

  // Hard ceiling below full scale: phase jitter can pile frames up past 1.0,
  // and a clip touching the valid-range boundary would force an attack's
  // [-1, 1] clamp to eat into its own perturbation budget.
  for (double& v : x) v = std::clamp(v, -0.99, 0.99);

  Waveform w;
  w.sample_rate = sample_rate;
  w.samples = std::move(x);
  return w;
}

Manifest build_manifest(Split split, int n_real, int n_fake,
                        uint64_t master_seed,
                        const std::vector<ArtifactProfile>& fake_profiles) {
  if (n_real < 0 || n_fake < 0) {
    throw Error(kModule, "counts", "clip counts must be >= 0");
  }
  if (split == Split::Redteam && n_real > 0) {
    throw Error(kModule, "n_real", "Redteam split holds only Fake clips");
  }
  std::vector<ArtifactProfile> pool = fake_profiles;
  if (pool.empty()) pool.push_back(ArtifactProfile::SpectralNotch);
  for (ArtifactProfile p : pool) {
    if (p == ArtifactProfile::None) {
      throw Error(kModule, "fake_profiles", "None is not a fake profile");
    }
  }

  Rng rng(derive_seed(master_seed, {uint64_t(split)}));
  Manifest m;
  m.split = split;
  m.sample_rate = kSampleRate;
  std::set<uint64_t> used;
  auto fresh_seed = [&]() {
    uint64_t s;
    do {
      s = rng.next();
    } while (!used.insert(s).second);
    return s;
  };
  for (int i = 0; i < n_real + n_fake; ++i) {
    ClipSpec spec;
    spec.seed = fresh_seed();
    spec.duration_s = kClipSeconds;
    spec.f0 = rng.uniform(120.0, 220.0);
    if (i < n_real) {
      spec.label = Label::Real;
      spec.artifact_profile = ArtifactProfile::None;
    } else {
      spec.label = Label::Fake;
      spec.artifact_profile = pool[size_t(i - n_real) % pool.size()];
    }
    m.clips.push_back(spec);
  }
  return m;
}

Label label_from_string(const std::string& s) {
  if (s == "Real") return Label::Real;
  if (s == "Fake") return Label::Fake;
  throw Error(kModule, "label", "unknown label " + s);
}

Split split_from_string(const std::string& s) {
  if (s == "Train") return Split::Train;
  if (s == "Eval") return Split::Eval;
  if (s == "Redteam") return Split::Redteam;
  throw Error(kModule, "split", "unknown split " + s);
}

ArtifactProfile profile_from_string(const std::string& s) {
  if (s == "None") return ArtifactProfile::None;
  if (s == "SpectralNotch") return ArtifactProfile::SpectralNotch;
  if (s == "PhaseJitter") return ArtifactProfile::PhaseJitter;
  if (s == "Quantize") return ArtifactProfile::Quantize;
  throw Error(kModule, "artifact_profile", "unknown profile " + s);
}

void save_manifest(const Manifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["split"] = to_string(m.split);
  j["sample_rate"] = m.sample_rate;
  j["clips"] = nlohmann::ordered_json::array();
  for (const ClipSpec& c : m.clips) {
    nlohmann::ordered_json jc;
    jc["label"] = to_string(c.label);
    jc["seed"] = c.seed;
    jc["duration_s"] = c.duration_s;
    jc["f0"] = c.f0;
    jc["artifact_profile"] = to_string(c.artifact_profile);
    j["clips"].push_back(std::move(jc));
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(kModule, "file", "cannot open for write: " + path);
  f << j.dump(2) << "\n";
}

Manifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(kModule, "file", "cannot open: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(kModule, "file", std::string("bad JSON: ") + e.what());
  }
  Manifest m;
  try {
    m.split = split_from_string(j.at("split").get<std::string>());
    m.sample_rate = j.at("sample_rate").get<int>();
    for (const auto& jc : j.at("clips")) {
      ClipSpec c;
      c.label = label_from_string(jc.at("label").get<std::string>());
      c.seed = jc.at("seed").get<uint64_t>();
      c.duration_s = jc.at("duration_s").get<double>();
      c.f0 = jc.at("f0").get<double>();
      c.artifact_profile =
          profile_from_string(jc.at("artifact_profile").get<std::string>());
      if ((c.label == Label::Real) !=
          (c.artifact_profile == ArtifactProfile::None)) {
        throw Error(kModule, "artifact_profile",
                    "label Real iff artifact_profile None");
      }
      m.clips.push_back(c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(kModule, "clips", std::string("manifest field: ") + e.what());
  }
  std::set<uint64_t> seeds;
  for (const ClipSpec& c : m.clips) {
    if (!seeds.insert(c.seed).second) {
      throw Error(kModule, "seed", "duplicate clip seed in manifest");
    }
    if (m.split == Split::Redteam && c.label != Label::Fake) {
      throw Error(kModule, "label", "Redteam split holds only Fake clips");
    }
  }
  return m;
}

}  // namespace ssdrt
