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

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "typedhwr/common/rng.hpp"
#include "typedhwr/metrics/metrics.hpp"

using namespace typedhwr;
using namespace typedhwr::metrics;

TEST(EditDistance, ExhaustiveAgainstRecursiveDefinition) {
  std::vector<std::string> all{""};
  for (std::size_t begin = 0, len = 1; len <= 4; ++len) {
    const std::size_t end = all.size();
    for (std::size_t i = begin; i < end; ++i)
      for (char c : {'a', 'b', 'c'}) all.push_back(all[i] + c);
    begin = end;
  }
  for (const auto& a : all)
    for (const auto& b : all) ASSERT_EQ(edit_distance(a, b), testkit::recursive_edit_distance(a, b)) << a << "|" << b;
}

TEST(EditDistance, Utf8CountsCodePoints) {
  EXPECT_EQ(edit_distance("caf\xc3\xa9", "cafe"), 1u);
  EXPECT_EQ(edit_distance(std::u32string(U"kitten"), std::u32string(U"sitting")), 3u);
}

TEST(EditDistance, MatchedPositions) {
  const auto m = matched_groundtruth_positions(U"0I8", U"OI8");
  EXPECT_EQ(m, (std::vector<bool>{false, true, true}));
  EXPECT_EQ(matched_groundtruth_positions(U"", U"ab"), (std::vector<bool>{false, false}));
}

TEST(Cer, FieldAndCorpus) {
  const EvalPair p{"Parls", "Paris", typedgen::ContentType::Address};
  EXPECT_DOUBLE_EQ(field_cer(p, false), 0.2);
  EXPECT_TRUE(field_error(p, false));
  const EvalPair accent{"Beziers", "B\xc3\xa9ziers", typedgen::ContentType::Address};
  EXPECT_GT(field_cer(accent, false), 0.0);
  EXPECT_DOUBLE_EQ(field_cer(accent, true), 0.0);
  EXPECT_FALSE(field_error(accent, true));
  const std::vector<EvalPair> pairs{p, {"Paris", "Paris", typedgen::ContentType::Address}};
  EXPECT_DOUBLE_EQ(cer(pairs, false), 10.0);
  EXPECT_DOUBLE_EQ(fer(pairs, false), 50.0);
}

TEST(Report, PerTypeRowsAndEmpty) {
  const std::vector<EvalPair> pairs{{"12", "12", typedgen::ContentType::Numbers},
                                    {"A", "B", typedgen::ContentType::Name}};
  const auto r = report(pairs);
  EXPECT_EQ(r.overall.count, 2u);
  ASSERT_TRUE(r.per_type[static_cast<std::size_t>(typedgen::ContentType::Numbers)].has_value());
  EXPECT_FALSE(r.per_type[static_cast<std::size_t>(typedgen::ContentType::Date)].has_value());
  const auto empty = report({});
  EXPECT_EQ(empty.overall.count, 0u);
  EXPECT_FALSE(empty.overall.cer.has_value());
}

TEST(Metric, SpaceProperties) {
  Xoshiro256 r(3);
  auto word = [&] {
    std::string s;
    const int n = static_cast<int>(r.below(8));
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + r.below(4)));
    return s;
  };
  for (int i = 0; i < 10000; ++i) {
    const auto a = word(), b = word(), c = word();
    const auto ab = edit_distance(a, b);
    ASSERT_EQ(ab, edit_distance(b, a));
    ASSERT_EQ(ab == 0, a == b);
    ASSERT_LE(edit_distance(a, c), ab + edit_distance(b, c));
  }
}
