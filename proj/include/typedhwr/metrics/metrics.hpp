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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typedhwr/typedgen/content_type.hpp"

namespace typedhwr::metrics {

using typedgen::ContentType;

struct EvalPair {
  std::string prediction;
  std::string groundtruth;
  ContentType ctype = ContentType::FreeText;
};

// Levenshtein distance with unit costs over Unicode scalar values.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);
std::size_t edit_distance(std::string_view a, std::string_view b);

// For each groundtruth character, whether an optimal alignment matches it
// exactly (no substitution, no deletion). Ties prefer matches.
std::vector<bool> matched_groundtruth_positions(std::u32string_view prediction, std::u32string_view groundtruth);

// Per-field ratio EditDist / max(1, NumChars(gt)), before the 100/N scaling.
double field_cer(const EvalPair& pair, bool ascii_fold);
// 1 when the whitespace-normalized (and optionally folded) strings differ.
bool field_error(const EvalPair& pair, bool ascii_fold);

// Macro averages in percent. Empty input yields 0.
double cer(std::span<const EvalPair> pairs, bool ascii_fold);
double fer(std::span<const EvalPair> pairs, bool ascii_fold);

struct MetricRow {
  std::size_t count = 0;
  std::size_t empty_groundtruth = 0;
  // Absent when count == 0.
  std::optional<double> cer, cer_ascii, fer, fer_ascii;
};

struct EvalReport {
  MetricRow overall;
  // Only types that occur in the input are populated.
  std::array<std::optional<MetricRow>, typedgen::kNumContentTypes> per_type;

  std::string to_json() const;
  // Aligned columns, one line per populated type plus the overall row.
  std::string to_table() const;
};

EvalReport report(std::span<const EvalPair> pairs);

// JSON Lines of {prediction, groundtruth, type}.
std::vector<EvalPair> parse_eval_jsonl(std::string_view content);

}  // namespace typedhwr::metrics
