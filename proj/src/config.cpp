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

#include "ssdrt/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ssdrt/error.hpp"

namespace ssdrt {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  size_t pos = line.find_first_of("#;");
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("config", "file", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error("config", "line " + std::to_string(lineno),
                    "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw Error("config", "line " + std::to_string(lineno),
                    "empty section name");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config", "line " + std::to_string(lineno),
                  "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error("config", "line " + std::to_string(lineno), "empty key");
    std::string dotted = section.empty() ? key : section + "." + key;
    cfg.entries_[dotted] = value;
  }
  return cfg;
}

bool Config::has(const std::string& dotted) const {
  return entries_.count(dotted) != 0;
}

std::string Config::get_string(const std::string& dotted) const {
  auto it = entries_.find(dotted);
  if (it == entries_.end())
    throw Error("config", dotted, "missing key");
  return it->second;
}

std::string Config::get_string_or(const std::string& dotted,
                                  const std::string& fallback) const {
  auto it = entries_.find(dotted);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& dotted) const {
  const std::string v = get_string(dotted);
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw Error("config", dotted, "not a number: " + v);
  return x;
}

double Config::get_double_or(const std::string& dotted,
                             double fallback) const {
  return has(dotted) ? get_double(dotted) : fallback;
}

int Config::get_int(const std::string& dotted) const {
  const std::string v = get_string(dotted);
  char* end = nullptr;
  long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw Error("config", dotted, "not an integer: " + v);
  return int(x);
}

int Config::get_int_or(const std::string& dotted, int fallback) const {
  return has(dotted) ? get_int(dotted) : fallback;
}

uint64_t Config::get_u64(const std::string& dotted) const {
  const std::string v = get_string(dotted);
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw Error("config", dotted, "not an unsigned integer: " + v);
  return uint64_t(x);
}

uint64_t Config::get_u64_or(const std::string& dotted,
                            uint64_t fallback) const {
  return has(dotted) ? get_u64(dotted) : fallback;
}

bool Config::get_bool(const std::string& dotted) const {
  const std::string v = get_string(dotted);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config", dotted, "not a boolean: " + v);
}

bool Config::get_bool_or(const std::string& dotted, bool fallback) const {
  return has(dotted) ? get_bool(dotted) : fallback;
}

std::vector<std::string> Config::get_string_list(
    const std::string& dotted) const {
  const std::string v = get_string(dotted);
  std::vector<std::string> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw Error("config", dotted, "empty list");
  return out;
}

std::vector<double> Config::get_double_list(const std::string& dotted) const {
  std::vector<double> out;
  for (const std::string& item : get_string_list(dotted)) {
    char* end = nullptr;
    double x = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw Error("config", dotted, "not a number: " + item);
    out.push_back(x);
  }
  return out;
}

}  // namespace ssdrt
