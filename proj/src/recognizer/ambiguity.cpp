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

#include "typedhwr/recognizer/ambiguity.hpp"

#include "typedhwr/common/text.hpp"
#include "typedhwr/formset/preprocess.hpp"
#include "typedhwr/metrics/metrics.hpp"

namespace typedhwr::recognizer {

const imaging::BitmapFont& ambiguous_font() {
  static const imaging::BitmapFont font = [] {
    imaging::BitmapFont f = imaging::BitmapFont::fallback();
    for (auto [digit, letter] : kAmbiguousPairs) f = f.with_alias(static_cast<char32_t>(letter), static_cast<char32_t>(digit));
    return f;
  }();
  return font;
}

namespace {

bool is_ambiguous(char32_t c) {
  for (auto [d, l] : kAmbiguousPairs) {
    if (c == static_cast<char32_t>(d) || c == static_cast<char32_t>(l)) return true;
  }
  return false;
}

LabeledSet make_split(const AmbiguityTestbedConfig& cfg, int count, std::uint64_t split, const char* prefix) {
  LabeledSet set;
  const SeedStream base{cfg.seed, split};
  for (int i = 0; i < count; ++i) {
    const SeedStream s = base.child(static_cast<std::uint64_t>(i));
    Xoshiro256 rng = s.child(0).rng();
    const double u = rng.uniform();
    const auto ctype = u < 0.5 ? ContentType::Name : (u < 0.75 ? ContentType::PhoneNumber : ContentType::Date);
    const bool letters = ctype == ContentType::Name;
    const int len = rng.range(cfg.min_length, cfg.max_length);
    std::string text;
    for (int k = 0; k < len; ++k) {
      const auto& pair = kAmbiguousPairs[rng.below(kAmbiguousPairs.size())];
      text += letters ? pair.second : pair.first;
    }
    auto rendered = imaging::render_text(text, ambiguous_font(), cfg.style, s.child(1), imaging::BitmapFont::fallback());
    set.add(formset::preprocess(rendered.image), text, ctype, std::string(prefix) + std::to_string(i));
  }
  return set;
}

}  // namespace

AmbiguityTestbed make_ambiguity_testbed(const AmbiguityTestbedConfig& cfg) {
  return {make_split(cfg, cfg.train_samples, 0, "train-"), make_split(cfg, cfg.validation_samples, 1, "val-"),
          make_split(cfg, cfg.test_samples, 2, "test-")};
}

AmbiguityScores score_ambiguity(const std::vector<std::string>& predictions, const LabeledSet& set) {
  std::vector<metrics::EvalPair> pairs;
  std::size_t ambiguous = 0, missed = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    pairs.push_back({predictions[i], set.texts[i], set.types[i]});
    const auto gt = utf8_decode(set.texts[i]);
    const auto matched = metrics::matched_groundtruth_positions(utf8_decode(predictions[i]), gt);
    for (std::size_t k = 0; k < gt.size(); ++k) {
      if (!is_ambiguous(gt[k])) continue;
      ++ambiguous;
      if (!matched[k]) ++missed;
    }
  }
  AmbiguityScores s;
  s.cer = metrics::cer(pairs, false);
  s.ambiguous_cer = ambiguous == 0 ? 0.0 : 100.0 * static_cast<double>(missed) / static_cast<double>(ambiguous);
  return s;
}

}  // namespace typedhwr::recognizer
