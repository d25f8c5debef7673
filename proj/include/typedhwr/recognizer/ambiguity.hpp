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

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "typedhwr/imaging/font.hpp"
#include "typedhwr/imaging/render.hpp"
#include "typedhwr/recognizer/trainer.hpp"

namespace typedhwr::recognizer {

// Digit / letter pairs drawn with one shared glyph (the digit's).
inline constexpr std::array<std::pair<char, char>, 5> kAmbiguousPairs{
    {{'0', 'O'}, {'1', 'I'}, {'8', 'B'}, {'5', 'S'}, {'2', 'Z'}}};

// The fallback bitmap font with every letter above aliased to its digit.
const imaging::BitmapFont& ambiguous_font();

// Strings of min_length..max_length characters, all from the ambiguous set:
// letters under Name (half the samples), digits under PhoneNumber and Date
// (a quarter each). Same glyphs either way, so only the type tells them apart.
struct AmbiguityTestbedConfig {
  int train_samples = 4000;
  int validation_samples = 400;
  int test_samples = 1000;
  int min_length = 3;
  int max_length = 6;
  std::uint64_t seed = 20190425;
  imaging::RenderStyle style;
};

struct AmbiguityTestbed {
  LabeledSet train, validation, test;
};

AmbiguityTestbed make_ambiguity_testbed(const AmbiguityTestbedConfig& cfg);

struct AmbiguityScores {
  double cer = 0.0;            // macro CER in percent
  double ambiguous_cer = 0.0;  // percent of ambiguous groundtruth characters not matched
};

AmbiguityScores score_ambiguity(const std::vector<std::string>& predictions, const LabeledSet& set);

}  // namespace typedhwr::recognizer
