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

#ifndef SSDRT_CONFIG_HPP_
#define SSDRT_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ssdrt {

// Minimal INI-style config: [section] headers, key = value lines, comments
// starting with # or ; (full line or trailing), blank lines ignored.
// Duplicate keys keep the last value. Lookups take "section.key"; typed
// getters raise Error("config", "section.key", ...) on bad values, and the
// *_or variants fall back to a default when the key is absent.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& dotted) const;
  std::string get_string(const std::string& dotted) const;
  std::string get_string_or(const std::string& dotted,
                            const std::string& fallback) const;
  double get_double(const std::string& dotted) const;
  double get_double_or(const std::string& dotted, double fallback) const;
  int get_int(const std::string& dotted) const;
  int get_int_or(const std::string& dotted, int fallback) const;
  uint64_t get_u64(const std::string& dotted) const;
  uint64_t get_u64_or(const std::string& dotted, uint64_t fallback) const;
  bool get_bool(const std::string& dotted) const;
  bool get_bool_or(const std::string& dotted, bool fallback) const;
  // Comma-separated values.
  std::vector<double> get_double_list(const std::string& dotted) const;
  std::vector<std::string> get_string_list(const std::string& dotted) const;

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  // Flat map keyed "section.key"; keyless-section entries use the bare key.
  std::map<std::string, std::string> entries_;
};

}  // namespace ssdrt

#endif  // SSDRT_CONFIG_HPP_
