// Copyright 2026 The typedhwr Authors.
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

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace typedhwr::typedgen {

// Ordered output symbols of the recognizer. The CTC blank is not a symbol;
// it is the class right after the last symbol.
class Alphabet {
 public:
  // space, 0-9, A-Z, a-z, then . , - / ' :  (69 symbols, 70 classes)
  static Alphabet default_alphabet();
  // One symbol per line, UTF-8, in output order. Only '\n' / "\r\n" are
  // stripped, so a line holding a single space defines the space symbol.
  static Alphabet load(const std::filesystem::path& path);

  explicit Alphabet(std::u32string symbols);

  const std::u32string& symbols() const { return symbols_; }
  int size() const { return static_cast<int>(symbols_.size()); }
  int blank_index() const { return size(); }
  int num_classes() const { return size() + 1; }

  bool contains(char32_t c) const { return index_.contains(c); }
  std::optional<int> index(char32_t c) const;
  char32_t symbol(int index) const { return symbols_.at(static_cast<std::size_t>(index)); }

  // Throws EncodingError naming `context` and the offending character.
  std::vector<int> encode(std::string_view utf8, std::string_view context = {}) const;
  std::string decode(std::span<const int> indices) const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::u32string symbols_;
  std::unordered_map<char32_t, int> index_;
};

// Diacritics folded, unsupported characters dropped. May return "".
std::string fold_to_alphabet(std::string_view text, const Alphabet& alphabet);

}  // namespace typedhwr::typedgen
