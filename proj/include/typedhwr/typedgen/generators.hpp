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
#include <string>
#include <string_view>

#include "typedhwr/common/rng.hpp"
#include "typedhwr/typedgen/alphabet.hpp"
#include "typedhwr/typedgen/content_type.hpp"
#include "typedhwr/typedgen/lexicon.hpp"

namespace typedhwr::typedgen {

struct TypedString {
  std::string text;  // UTF-8, every character in the active alphabet
  ContentType ctype = ContentType::FreeText;

  bool operator==(const TypedString&) const = default;
};

namespace lexicon_names {
inline constexpr std::string_view kFirstNames = "first_names";
inline constexpr std::string_view kLastNames = "last_names";
inline constexpr std::string_view kStreetTypes = "street_types";
inline constexpr std::string_view kStreetNames = "street_names";
inline constexpr std::string_view kCities = "cities";
inline constexpr std::string_view kCarModels = "car_models";
inline constexpr std::string_view kInsurers = "insurers";
inline constexpr std::string_view kWords = "words";
}  // namespace lexicon_names

// Attempts made before generate() gives up on strings that fold to "".
inline constexpr int kMaxFoldRetries = 16;

// Raw (unfolded) text for one attempt. Exposed for tests of the grammars.
std::string generate_raw(ContentType ctype, Xoshiro256& rng, const LexiconSet& lexicons);

// Deterministic typed string: attempt k draws from seed.child(k); the text is
// folded to the alphabet and the first non-empty result wins.
TypedString generate(ContentType ctype, const SeedStream& seed, const LexiconSet& lexicons,
                     const Alphabet& alphabet = Alphabet::default_alphabet());

// Throws ConfigError naming the type when a required list is missing.
void require_lexicons(ContentType ctype, const LexiconSet& lexicons);

}  // namespace typedhwr::typedgen
