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

#ifndef SSDRT_CORPUS_HPP_
#define SSDRT_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ssdrt/wav.hpp"

namespace ssdrt {

// Reference corpus geometry. 4 s at 16 kHz keeps attack runtimes desk-sized.
inline constexpr int kSampleRate = 16000;
inline constexpr double kClipSeconds = 4.0;
inline constexpr int kClipLength = 64000;

enum class Label { Real, Fake };
enum class Split { Train, Eval, Redteam };

// Fake-clip transforms standing in for different TTS systems. The harness
// treats SpectralNotch as in-domain (present in Train) and PhaseJitter /
// Quantize as out-of-domain.
enum class ArtifactProfile { None, SpectralNotch, PhaseJitter, Quantize };

struct ClipSpec {
  Label label = Label::Real;
  uint64_t seed = 0;
  double duration_s = kClipSeconds;
  double f0 = 120.0;  // fundamental, Hz; valid range [60, 300]
  ArtifactProfile artifact_profile = ArtifactProfile::None;
};

struct Manifest {
  Split split = Split::Train;
  std::vector<ClipSpec> clips;
  int sample_rate = kSampleRate;
};

const char* to_string(Label l);
const char* to_string(Split s);
const char* to_string(ArtifactProfile p);
Label label_from_string(const std::string& s);
Split split_from_string(const std::string& s);
ArtifactProfile profile_from_string(const std::string& s);

// Deterministic synthesis. Real pipeline: harmonic stack at f0 (decaying
// partials up to 2.8 kHz, random phases), slow pitch jitter integrated into
// the phase, slow amplitude envelope, low-level pink noise, peak-normalized
// to 0.9, then a fixed-RMS noise band at 4-5.4 kHz added after the
// normalization so its absolute level is class-stable. Fake pipeline: same,
// then the artifact transform with no re-normalization (the transforms must
// not rescale the band). Both end with a hard clamp to +/-0.99 so no clip
// sits on the valid-range boundary. Same spec and rate always give
// identical samples.
Waveform synth_clip(const ClipSpec& spec, int sample_rate);

// Draws clip specs from fixed parameter ranges with a portable PRNG seeded
// from master_seed. fake_profiles empty means {SpectralNotch}; otherwise
// fake clips cycle through the given pool in order. Redteam requires
// n_real = 0.
Manifest build_manifest(Split split, int n_real, int n_fake,
                        uint64_t master_seed,
                        const std::vector<ArtifactProfile>& fake_profiles = {});

// JSON serialization. Field names are part of the interface: split,
// sample_rate, clips[{label, seed, duration_s, f0, artifact_profile}].
void save_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);

}  // namespace ssdrt

#endif  // SSDRT_CORPUS_HPP_
