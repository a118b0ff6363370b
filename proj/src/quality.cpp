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

#include "ssdrt/quality.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ssdrt/error.hpp"
#include "ssdrt/fft.hpp"

namespace ssdrt {

namespace {

constexpr const char* kModule = "quality";

double hz_to_mel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

void check_pair(const Waveform& a, const Waveform& b) {
  if (a.samples.size() != b.samples.size()) {
    throw Error(kModule, "length", "waveform lengths differ");
  }
  if (a.sample_rate != b.sample_rate) {
    throw Error(kModule, "sample_rate", "sample rates differ");
  }
}

}  // namespace

Spectrogram log_mel_spectrogram(const Waveform& w) {
  const int n = w.length();
  if (n < kQualityWindow) {
    throw Error(kModule, "length", "clip shorter than one STFT window");
  }
  const int bins = kQualityWindow / 2 + 1;
  const int frames = 1 + (n - kQualityWindow) / kQualityHop;
  const std::vector<double> window = hann_window(kQualityWindow);

  // Triangular mel weights, interpolated in mel space over edges uniform
  // between kMelLoHz and kMelHiHz.
  std::vector<double> edges(kMelBands + 2);
  const double mel_lo = hz_to_mel(kMelLoHz), mel_hi = hz_to_mel(kMelHiHz);
  for (int i = 0; i < kMelBands + 2; ++i) {
    edges[i] = mel_lo + (mel_hi - mel_lo) * double(i) / double(kMelBands + 1);
  }
  std::vector<double> bin_mel(bins);
  for (int k = 0; k < bins; ++k) {
    bin_mel[k] =
        hz_to_mel(double(k) * w.sample_rate / double(kQualityWindow));
  }
  // filter m covers (edges[m], edges[m+2]) peaking at edges[m+1]
  std::vector<std::pair<int, int>> band_range(kMelBands);
  std::vector<std::vector<double>> band_weight(kMelBands);
  for (int m = 0; m < kMelBands; ++m) {
    int k0 = bins, k1 = -1;
    for (int k = 0; k < bins; ++k) {
      if (bin_mel[k] > edges[m] && bin_mel[k] < edges[m + 2]) {
        k0 = std::min(k0, k);
        k1 = std::max(k1, k);
      }
    }
    band_range[m] = {k0, k1};
    for (int k = k0; k <= k1; ++k) {
      const double mel = bin_mel[k];
      const double weight =
          mel <= edges[m + 1]
              ? (mel - edges[m]) / (edges[m + 1] - edges[m])
              : (edges[m + 2] - mel) / (edges[m + 2] - edges[m + 1]);
      band_weight[m].push_back(weight);
    }
  }

  Spectrogram out;
  out.n_mel = kMelBands;
  out.n_frames = frames;
  out.data.assign(size_t(kMelBands) * frames, 0.0);

  std::vector<std::complex<double>> frame(kQualityWindow);
  std::vector<double> mag(bins);
  for (int t = 0; t < frames; ++t) {
    const int off = t * kQualityHop;
    for (int i = 0; i < kQualityWindow; ++i) {
      frame[i] = w.samples[off + i] * window[i];
    }
    fft(frame, false);
    for (int k = 0; k < bins; ++k) mag[k] = std::abs(frame[k]);
    for (int m = 0; m < kMelBands; ++m) {
      const auto [k0, k1] = band_range[m];
      double acc = 0.0;
      for (int k = k0; k <= k1; ++k) {
        acc += band_weight[m][k - k0] * mag[k];
      }
      out.data[size_t(m) * frames + t] = std::log1p(acc);
    }
  }
  return out;
}

double linf_dist(const Waveform& a, const Waveform& b) {
  if (a.samples.size() != b.samples.size()) {
    throw Error(kModule, "length", "waveform lengths differ");
  }
  double m = 0.0;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    m = std::max(m, std::fabs(a.samples[i] - b.samples[i]));
  }
  return m;
}

double snr_db(const Waveform& reference, const Waveform& degraded) {
  check_pair(reference, degraded);
  double sig = 0.0, noise = 0.0;
  for (size_t i = 0; i < reference.samples.size(); ++i) {
    const double r = reference.samples[i];
    const double d = r - degraded.samples[i];
    sig += r * r;
    noise += d * d;
  }
  if (sig == 0.0) {
    throw Error(kModule, "reference", "all-zero reference has no SNR");
  }
  if (noise == 0.0) return kSnrCapDb;
  return 10.0 * std::log10(sig / noise);
}

QualityReport vqs_score(const Waveform& reference, const Waveform& degraded) {
  check_pair(reference, degraded);
  const Spectrogram A = log_mel_spectrogram(reference);
  const Spectrogram B = log_mel_spectrogram(degraded);

  double joint_max = 0.0;
  for (double v : A.data) joint_max = std::max(joint_max, v);
  for (double v : B.data) joint_max = std::max(joint_max, v);

  double nsim;
  if (joint_max == 0.0) {
    nsim = 1.0;  // two silent spectrograms are identical
  } else {
    const double inv = 1.0 / joint_max;
    const int M = A.n_mel, T = A.n_frames;
    double total = 0.0;
    for (int m = 0; m < M; ++m) {
      for (int t = 0; t < T; ++t) {
        // 3x3 neighborhood, shrunk at the edges; population moments.
        const int m0 = std::max(0, m - 1), m1 = std::min(M - 1, m + 1);
        const int t0 = std::max(0, t - 1), t1 = std::min(T - 1, t + 1);
        const double cnt = double((m1 - m0 + 1) * (t1 - t0 + 1));
        double sa = 0.0, sb = 0.0;
        for (int mm = m0; mm <= m1; ++mm) {
          for (int tt = t0; tt <= t1; ++tt) {
            sa += A.at(mm, tt) * inv;
            sb += B.at(mm, tt) * inv;
          }
        }
        const double mu_a = sa / cnt, mu_b = sb / cnt;
        double va = 0.0, vb = 0.0, vab = 0.0;
        for (int mm = m0; mm <= m1; ++mm) {
          for (int tt = t0; tt <= t1; ++tt) {
            const double da = A.at(mm, tt) * inv - mu_a;
            const double db = B.at(mm, tt) * inv - mu_b;
            va += da * da;
            vb += db * db;
            vab += da * db;
          }
        }
        va /= cnt;
        vb /= cnt;
        vab /= cnt;
        const double lum =
            (2.0 * (mu_a * mu_b) + kNsimC1) / (mu_a * mu_a + mu_b * mu_b + kNsimC1);
        const double str = (2.0 * vab + kNsimC2) / (va + vb + kNsimC2);
        total += std::clamp(lum * str, 0.0, 1.0);
      }
    }
    nsim = total / double(size_t(A.n_mel) * A.n_frames);
  }

  QualityReport r;
  r.linf = linf_dist(reference, degraded);
  r.snr_db = snr_db(reference, degraded);
  r.nsim = nsim;
  r.vqs = 1.0 + 4.0 * nsim;
  return r;
}

}  // namespace ssdrt
