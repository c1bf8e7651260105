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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kerrfb {

// Flat `key = value` document with optional `[section]` headers and `#`
// comments. Keys keep their insertion order so written files diff cleanly.
class KeyValueDoc {
 public:
  struct Entry {
    std::string key;
    std::string value;
  };

  static KeyValueDoc parse(std::string_view text);
  static KeyValueDoc load_file(const std::string& path);

  void set(const std::string& section, const std::string& key,
           const std::string& value);
  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const;
  bool contains(const std::string& section, const std::string& key) const;
  const std::vector<Entry>& entries(const std::string& section) const;
  std::vector<std::string> sections() const;

  // Overlays every entry of `other` (same section) on top of this document.
  void merge(const KeyValueDoc& other);

  std::string to_text() const;
  void save_file(const std::string& path) const;

 private:
  std::vector<std::string> section_order_;
  std::map<std::string, std::vector<Entry>> data_;
};

// Number formatting shared by every text and CSV writer; round-trips doubles.
std::string format_double(double v);
double parse_double(const std::string& key, const std::string& text);
std::uint64_t parse_u64(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);

}  // namespace kerrfb
