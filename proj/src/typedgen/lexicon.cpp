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

#include "typedhwr/typedgen/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "typedhwr/common/error.hpp"

namespace typedhwr::typedgen {

std::vector<std::string> LexiconSet::parse(std::string_view content) {
  std::vector<std::string> entries;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    entries.push_back(line.substr(first, last - first + 1));
  }
  return entries;
}

LexiconSet LexiconSet::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("lexicon directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  LexiconSet set;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    set.add(file.stem().string(), parse(buffer.str()));
  }
  return set;
}

void LexiconSet::add(std::string name, std::vector<std::string> entries) { lists_[std::move(name)] = std::move(entries); }

bool LexiconSet::has(std::string_view name) const {
  auto it = lists_.find(name);
  return it != lists_.end() && !it->second.empty();
}

const std::vector<std::string>& LexiconSet::get(std::string_view name) const {
  static const std::vector<std::string> kEmpty;
  auto it = lists_.find(name);
  return it == lists_.end() ? kEmpty : it->second;
}

}  // namespace typedhwr::typedgen
