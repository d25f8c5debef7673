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

#include <string>
#include <string_view>

namespace typedhwr {

// Strict UTF-8 decoding; malformed input raises EncodingError.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
std::string utf8_encode(char32_t c);

// Canonical decomposition with combining marks stripped, plus the ligature
// map (oe, ae, fi, fl). Case is preserved: "Bergérac" -> "Bergerac".
std::u32string fold_diacritics(std::u32string_view text);
std::string fold_diacritics(std::string_view utf8);

// Trim both ends and collapse internal whitespace runs to one space.
std::u32string normalize_whitespace(std::u32string_view text);

}  // namespace typedhwr
