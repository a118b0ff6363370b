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

#include "ssdrt/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "ssdrt/error.hpp"

namespace ssdrt {

namespace {

constexpr const char* kModule = "audio_io";

uint32_t read_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

uint16_t read_u16(const uint8_t* p) { return uint16_t(p[0] | p[1] << 8); }

void put_u32(std::string& out, uint32_t v) {
  out.push_back(char(v & 0xFF));
  out.push_back(char((v >> 8) & 0xFF));
  out.push_back(char((v >> 16) & 0xFF));
  out.push_back(char((v >> 24) & 0xFF));
}

void put_u16(std::string& out, uint16_t v) {
  out.push_back(char(v & 0xFF));
  out.push_back(char((v >> 8) & 0xFF));
}

}  // namespace

double code_to_float(int16_t code) { return double(code) / 32768.0; }

int16_t float_to_code(double x) {
  // lround rounds half away from zero, matching the documented mapping.
  long code = std::lround(x * 32768.0);
  if (code > 32767) code = 32767;
  if (code < -32768) code = -32768;
  return int16_t(code);
}

Waveform quantize_to_grid(const Waveform& w) {
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    out.samples[i] = code_to_float(float_to_code(w.samples[i]));
  }
  return out;
}

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(kModule, "file", "cannot open " + path);
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  const uint8_t* p = reinterpret_cast<const uint8_t*>(raw.data());
  const size_t size = raw.size();

  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0) {
    throw Error(kModule, "riff_magic", "not a RIFF file: " + path);
  }
  if (std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw Error(kModule, "wave_magic", "RIFF form is not WAVE: " + path);
  }

  // Walk chunks. fmt must appear before data; trailing chunks are ignored.
  bool have_fmt = false;
  uint16_t format_code = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t off = 12;
  while (off + 8 <= size) {
    const char* id = reinterpret_cast<const char*>(p + off);
    const uint32_t chunk_size = read_u32(p + off + 4);
    const size_t body = off + 8;
    if (body + chunk_size > size) {
      throw Error(kModule, "data_chunk", "chunk overruns file: " + path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw Error(kModule, "fmt_chunk", "fmt chunk too short");
      }
      format_code = read_u16(p + body);
      channels = read_u16(p + body + 2);
      sample_rate = read_u32(p + body + 4);
      bits = read_u16(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) {
        throw Error(kModule, "fmt_chunk", "data chunk precedes fmt chunk");
      }
      if (format_code != 1) {
        throw Error(kModule, "format_code",
                    "PCM (code 1) required, got code " +
                        std::to_string(format_code));
      }
      if (channels != 1) {
        throw Error(kModule, "channels",
                    "mono required, got " + std::to_string(channels));
      }
      if (bits != 16) {
        throw Error(kModule, "bits_per_sample",
                    "16-bit required, got " + std::to_string(bits));
      }
      Waveform w;
      w.sample_rate = int(sample_rate);
      const size_t n = chunk_size / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        w.samples[i] = code_to_float(int16_t(read_u16(p + body + 2 * i)));
      }
      return w;
    }
    // Chunk bodies are word aligned; odd sizes carry a pad byte.
    off = body + chunk_size + (chunk_size & 1);
  }
  throw Error(kModule, "data_chunk", "no data chunk found: " + path);
}

void write_wav(const Waveform& w, const std::string& path) {
  const uint32_t n = uint32_t(w.samples.size());
  const uint32_t data_bytes = 2 * n;
  const uint32_t rate = uint32_t(w.sample_rate);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, rate);
  put_u32(out, rate * 2);  // byte rate
  put_u16(out, 2);         // block align
  put_u16(out, 16);        // bits per sample
  out += "data";
  put_u32(out, data_bytes);
  for (double x : w.samples) put_u16(out, uint16_t(float_to_code(x)));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(kModule, "file", "cannot open for write: " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw Error(kModule, "file", "short write: " + path);
}

}  // namespace ssdrt
