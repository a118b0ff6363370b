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

#ifndef SSDRT_QUALITY_HPP_
#define SSDRT_QUALITY_HPP_

#include <vector>

#include "ssdrt/wav.hpp"

namespace ssdrt {

// Stealthiness metrics for attacked audio against its unattacked original.
// vqs is an NSIM-on-log-mel similarity mapped affinely to ViSQOL's 1-5
// scale; it is monotone and deterministic, not metric-exact ViSQOL.
struct QualityReport {
  double linf = 0.0;
  double snr_db = 0.0;
  double nsim = 0.0;
  double vqs = 0.0;  // 1 + 4 * nsim, always
};

// Spectro-temporal constants. Fixed so scores agree across implementations:
//   STFT window 512 (periodic Hann), hop 256, frames fully inside the clip
//   64 triangular mel bands, HTK mel 1127*ln(1+f/700), edges uniform in mel
//     over 50-8000 Hz, unnormalized triangles applied to magnitude spectra
//   log compression log(1 + S)
inline constexpr int kQualityWindow = 512;
inline constexpr int kQualityHop = 256;
inline constexpr int kMelBands = 64;
inline constexpr double kMelLoHz = 50.0;
inline constexpr double kMelHiHz = 8000.0;
inline constexpr double kNsimC1 = 0.01 * 0.01;
inline constexpr double kNsimC2 = 0.03 * 0.03;
inline constexpr double kSnrCapDb = 200.0;

// Row-major (mel band, frame) matrix.
struct Spectrogram {
  int n_mel = 0;
  int n_frames = 0;
  std::vector<double> data;

  double at(int m, int t) const { return data[size_t(m) * n_frames + t]; }
};

Spectrogram log_mel_spectrogram(const Waveform& w);

// max |a_i - b_i|; lengths must match.
double linf_dist(const Waveform& a, const Waveform& b);

// 10*log10(sum ref^2 / sum (ref-deg)^2), capped at kSnrCapDb when the
// degraded signal is bit-identical. All-zero reference is an error.
double snr_db(const Waveform& reference, const Waveform& degraded);

// NSIM: both spectrograms normalized to [0,1] by their joint max, then per
// cell luminance * structure over a 3x3 uniform neighborhood (shrunk at
// edges, population moments), constants kNsimC1/kNsimC2, cells clamped to
// [0,1], nsim = mean. vqs_score(x, x) returns vqs = 5 exactly.
QualityReport vqs_score(const Waveform& reference, const Waveform& degraded);

}  // namespace ssdrt

#endif  // SSDRT_QUALITY_HPP_
