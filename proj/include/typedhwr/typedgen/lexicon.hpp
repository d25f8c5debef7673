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
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace typedhwr::typedgen {

// Named word lists backing the lexicon-driven content types. The names used
// by the generators are listed in lexicon_names (generators.hpp).
class LexiconSet {
 public:
  // Loads every `<name>.txt` in `dir`: UTF-8, one entry per line, '#'
  // starts a comment line, blank lines ignored.
  static LexiconSet load_dir(const std::filesystem::path& dir);
  static std::vector<std::string> parse(std::string_view content);

  void add(std::string name, std::vector<std::string> entries);
  bool has(std::string_view name) const;
  // Empty list if absent.
  const std::vector<std::string>& get(std::string_view name) const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> lists_;
};

}  // namespace typedhwr::typedgen
