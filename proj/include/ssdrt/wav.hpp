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

#ifndef SSDRT_WAV_HPP_
#define SSDRT_WAV_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace ssdrt {

// Fixed-length mono clip. Samples are normalized floats in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  int length() const { return int(samples.size()); }
};

// Integer code <-> float conversion. Divisor is 32768 (not 32767): the grid
// stays uniform and -1.0 is exactly representable. Codes round half away
// from zero, then clamp to [-32768, 32767].
double code_to_float(int16_t code);
int16_t float_to_code(double x);

// Round-trips every sample through the 16-bit code grid without touching
// disk. Idempotent; grid-quantized waveforms pass through bit-exactly.
Waveform quantize_to_grid(const Waveform& w);

// Reads a RIFF/WAVE file. Accepts PCM format code 1, 16-bit, mono only;
// anything else raises Error("audio_io", <field>, ...) where <field> is one
// of: file, riff_magic, wave_magic, fmt_chunk, format_code, channels,
// bits_per_sample, data_chunk. Chunks after data are ignored.
Waveform read_wav(const std::string& path);

// Writes the canonical 44-byte-header 16-bit mono PCM layout, little endian,
// fmt chunk before data. read_wav(write_wav(w)) differs from w by at most
// one quantization step (1/32768) per sample.
void write_wav(const Waveform& w, const std::string& path);

}  // namespace ssdrt

#endif  // SSDRT_WAV_HPP_
