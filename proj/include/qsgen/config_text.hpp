// Copyright 2026 The qsgen Authors.
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

#ifndef QSGEN_CONFIG_TEXT_HPP_
#define QSGEN_CONFIG_TEXT_HPP_

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsgen {

// Flat `key = value` configuration text: one assignment per line, '#'
// comments, section membership expressed with dotted prefixes
// ("train.learning_rate").  Insertion order is preserved so serialization
// is canonical and diffs stay readable.
class KeyValueText {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& kv : items_)
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    items_.emplace_back(key, value);
  }

  bool has(const std::string& key) const {
    for (const auto& kv : items_)
      if (kv.first == key) return true;
    return false;
  }

  const std::string& get(const std::string& key) const {
    for (const auto& kv : items_)
      if (kv.first == key) return kv.second;
    throw std::invalid_argument("KeyValueText: missing key " + key);
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    for (const auto& kv : items_)
      if (kv.first == key) return kv.second;
    return fallback;
  }

  const std::vector<std::pair<std::string, std::string>>& items() const {
    return items_;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& kv : items_) {
      out += kv.first;
      out += " = ";
      out += kv.second;
      out += '\n';
    }
    return out;
  }

  static KeyValueText parse(const std::string& text) {
    KeyValueText kv;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string::npos) eol = text.size();
      std::string line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": empty key");
      kv.set(key, value);
    }
    return kv;
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r'))
      --b;
    return s.substr(a, b - a);
  }

  std::vector<std::pair<std::string, std::string>> items_;
};

// Value formatting/parsing used everywhere config text is produced, so the
// same config always serializes to the same bytes.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_u64(std::uint64_t v) { return std::to_string(v); }

inline std::string format_bool(bool v) { return v ? "true" : "false"; }

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s[0] == '-')
    throw std::invalid_argument("expected a nonnegative integer, got '" + s +
                                "'");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("expected a nonnegative integer, got '" + s +
                                "'");
  return static_cast<std::uint64_t>(v);
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

}  // namespace qsgen

#endif  // QSGEN_CONFIG_TEXT_HPP_
