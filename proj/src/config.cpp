// Copyright 2026 The kerrfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kerrfb/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kerrfb/error.hpp"

namespace kerrfb {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
    return std::string(v.substr(1, v.size() - 2));
  return std::string(v);
}

const std::vector<KeyValueDoc::Entry> kEmpty;

// Bare TOML scalars; everything else is written as a basic string.
bool is_bare_scalar(const std::string& v) {
  if (v == "true" || v == "false") return true;
  if (v.empty()) return false;
  double x = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  return ec == std::errc() && end == v.data() + v.size();
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::string_view text) {
  KeyValueDoc doc;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    // Comments start at '#' outside a quoted value.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("", "line " + std::to_string(line_no) +
                                  ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("", "line " + std::to_string(line_no) +
                                ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    doc.set(section, std::string(key), unquote(trim(line.substr(eq + 1))));
  }
  return doc;
}

KeyValueDoc KeyValueDoc::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void KeyValueDoc::set(const std::string& section, const std::string& key,
                      const std::string& value) {
  auto [it, inserted] = data_.try_emplace(section);
  if (inserted) section_order_.push_back(section);
  auto& list = it->second;
  auto found = std::find_if(list.begin(), list.end(),
                            [&](const Entry& e) { return e.key == key; });
  if (found != list.end())
    found->value = value;
  else
    list.push_back({key, value});
}

std::optional<std::string> KeyValueDoc::get(const std::string& section,
                                            const std::string& key) const {
  const auto it = data_.find(section);
  if (it == data_.end()) return std::nullopt;
  for (const auto& e : it->second)
    if (e.key == key) return e.value;
  return std::nullopt;
}

bool KeyValueDoc::contains(const std::string& section,
                           const std::string& key) const {
  return get(section, key).has_value();
}

const std::vector<KeyValueDoc::Entry>& KeyValueDoc::entries(
    const std::string& section) const {
  const auto it = data_.find(section);
  return it == data_.end() ? kEmpty : it->second;
}

std::vector<std::string> KeyValueDoc::sections() const { return section_order_; }

void KeyValueDoc::merge(const KeyValueDoc& other) {
  for (const auto& s : other.section_order_)
    for (const auto& e : other.entries(s)) set(s, e.key, e.value);
}

std::string KeyValueDoc::to_text() const {
  std::string out;
  for (const auto& s : section_order_) {
    if (!s.empty()) {
      if (!out.empty()) out += '\n';
      out += "[" + s + "]\n";
    }
    for (const auto& e : entries(s)) {
      out += e.key + " = " +
             (is_bare_scalar(e.value) ? e.value : "\"" + e.value + "\"") + "\n";
    }
  }
  return out;
}

void KeyValueDoc::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_text();
  if (!out) throw IoError("write failed for " + path);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError(key, key + ": not a number: '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError(key, key + " must be finite");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  std::uint64_t v = 0;
  int base = 10;
  std::string_view digits = t;
  if (digits.starts_with("0x") || digits.starts_with("0X")) {
    base = 16;
    digits.remove_prefix(2);
  }
  const auto res =
      std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
  if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() ||
      digits.empty())
    throw ConfigError(key, key + ": not an unsigned integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "on" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "off" || t == "0" || t == "no") return false;
  throw ConfigError(key, key + ": expected on/off, got '" + text + "'");
}

}  // namespace kerrfb
