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

#include "typedhwr/typedgen/alphabet.hpp"

#include <fstream>
#include <sstream>

#include "typedhwr/common/error.hpp"
#include "typedhwr/common/text.hpp"

namespace typedhwr::typedgen {

Alphabet Alphabet::default_alphabet() {
  std::u32string symbols = U" 0123456789";
  for (char32_t c = U'A'; c <= U'Z'; ++c) symbols.push_back(c);
  for (char32_t c = U'a'; c <= U'z'; ++c) symbols.push_back(c);
  symbols += U".,-/':";
  return Alphabet(std::move(symbols));
}

Alphabet Alphabet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open alphabet file " + path.string());
  std::u32string symbols;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto decoded = utf8_decode(line);
    if (decoded.size() != 1) {
      throw ConfigError("alphabet line must hold exactly one symbol: '" + line + "' in " + path.string());
    }
    symbols.push_back(decoded.front());
  }
  return Alphabet(std::move(symbols));
}

Alphabet::Alphabet(std::u32string symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw ConfigError("alphabet is empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!index_.emplace(symbols_[i], static_cast<int>(i)).second) {
      throw ConfigError("duplicate alphabet symbol '" + utf8_encode(symbols_[i]) + "'");
    }
  }
}

std::optional<int> Alphabet::index(char32_t c) const {
  auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Alphabet::encode(std::string_view utf8, std::string_view context) const {
  std::vector<int> out;
  for (char32_t c : utf8_decode(utf8)) {
    auto idx = index(c);
    if (!idx) {
      std::ostringstream msg;
      msg << "symbol '" << utf8_encode(c) << "' is not in the alphabet";
      if (!context.empty()) msg << " (sample " << context << ")";
      throw EncodingError(msg.str());
    }
    out.push_back(*idx);
  }
  return out;
}

std::string Alphabet::decode(std::span<const int> indices) const {
  std::u32string out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(symbol(i));
  return utf8_encode(out);
}

std::string fold_to_alphabet(std::string_view text, const Alphabet& alphabet) {
  std::u32string out;
  for (char32_t c : fold_diacritics(utf8_decode(text))) {
    if (alphabet.contains(c)) out.push_back(c);
  }
  return utf8_encode(out);
}

}  // namespace typedhwr::typedgen
