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

#include "typedhwr/typedgen/generators.hpp"

#include <unicode/uchar.h>

#include <cstdio>
#include <string>

#include "typedhwr/common/error.hpp"
#include "typedhwr/common/text.hpp"

namespace typedhwr::typedgen {

namespace {

namespace lx = lexicon_names;

// SIV plates never use I, O or U.
constexpr std::string_view kPlateLetters = "ABCDEFGHJKLMNPQRSTVWXYZ";

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

std::string digits(Xoshiro256& rng, int count) {
  std::string s;
  for (int i = 0; i < count; ++i) s.push_back(static_cast<char>('0' + rng.range(0, 9)));
  return s;
}

const std::string& pick(Xoshiro256& rng, const std::vector<std::string>& list) {
  return list[static_cast<std::size_t>(rng.below(list.size()))];
}

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

std::string to_upper(std::string_view utf8) {
  std::u32string s = utf8_decode(utf8);
  for (auto& c : s) c = static_cast<char32_t>(u_toupper(static_cast<UChar32>(c)));
  return utf8_encode(s);
}

std::string make_date(Xoshiro256& rng) {
  const int year = rng.range(1950, 2025);
  const int month = rng.range(1, 12);
  const int day = rng.range(1, days_in_month(year, month));
  const std::string dd = two_digits(day);
  const std::string mm = two_digits(month);
  const std::string yy = two_digits(year % 100);
  const std::string yyyy = std::to_string(year);
  switch (rng.range(0, 3)) {
    case 0: return dd + "/" + mm + "/" + yy;
    case 1: return dd + "/" + mm + "/" + yyyy;
    case 2: return dd + "." + mm + "." + yy;
    default: return dd + "-" + mm + "-" + yyyy;
  }
}

std::string make_time(Xoshiro256& rng) {
  const std::string hh = two_digits(rng.range(0, 23));
  const std::string mm = two_digits(rng.range(0, 59));
  switch (rng.range(0, 2)) {
    case 0: return hh + ":" + mm;
    case 1: return hh + "H" + mm;
    default: return hh + " h " + mm;
  }
}

std::string make_phone(Xoshiro256& rng) {
  const std::string number = "0" + std::to_string(rng.range(1, 9)) + digits(rng, 8);
  const int style = rng.range(0, 2);
  if (style == 0) return number;
  const char sep = style == 1 ? ' ' : '.';
  std::string out;
  for (std::size_t i = 0; i < number.size(); i += 2) {
    if (i > 0) out.push_back(sep);
    out += number.substr(i, 2);
  }
  return out;
}

std::string plate_letters(Xoshiro256& rng, int count) {
  std::string s;
  for (int i = 0; i < count; ++i) s.push_back(kPlateLetters[rng.below(kPlateLetters.size())]);
  return s;
}

std::string make_plate(Xoshiro256& rng) {
  char number[8];
  std::snprintf(number, sizeof number, "%03d", rng.range(1, 999));
  if (rng.bernoulli(0.8)) {
    return plate_letters(rng, 2) + "-" + number + "-" + plate_letters(rng, 2);
  }
  // Legacy FNI: number, three letters, department.
  return std::string(number) + " " + plate_letters(rng, 3) + " " + two_digits(rng.range(1, 95));
}

std::string make_numbers(Xoshiro256& rng) {
  const int total = rng.range(1, 10);
  auto leading = [&](int count) {
    if (count == 1) return digits(rng, 1);
    return std::to_string(rng.range(1, 9)) + digits(rng, count - 1);
  };
  if (total == 1 || rng.bernoulli(0.6)) return leading(total);
  const int int_part = rng.range(1, total - 1);
  const char sep = rng.bernoulli(0.5) ? ',' : '.';
  std::string head = leading(int_part);
  return head + sep + digits(rng, total - int_part);
}

std::string make_name(Xoshiro256& rng, const LexiconSet& lexicons) {
  const std::string& first = pick(rng, lexicons.get(lx::kFirstNames));
  const std::string& last = pick(rng, lexicons.get(lx::kLastNames));
  switch (rng.range(0, 3)) {
    case 0: return first + " " + last;
    case 1: return to_upper(last) + " " + first;
    case 2: return utf8_encode(utf8_decode(first).substr(0, 1)) + ". " + last;
    default: return last;
  }
}

std::string make_address(Xoshiro256& rng, const LexiconSet& lexicons) {
  std::string out = std::to_string(rng.range(1, 199));
  if (rng.bernoulli(0.1)) out += rng.bernoulli(0.5) ? " bis" : " ter";
  if (rng.bernoulli(0.3)) out += ",";
  out += " " + pick(rng, lexicons.get(lx::kStreetTypes));
  out += " " + pick(rng, lexicons.get(lx::kStreetNames));
  if (rng.bernoulli(0.5)) {
    out += " " + two_digits(rng.range(1, 95)) + digits(rng, 3);
    out += " " + pick(rng, lexicons.get(lx::kCities));
  }
  return out;
}

std::string make_free_text(Xoshiro256& rng, const LexiconSet& lexicons) {
  const int count = rng.range(1, 6);
  std::string out;
  for (int i = 0; i < count; ++i) {
    if (i > 0) out.push_back(' ');
    out += pick(rng, lexicons.get(lx::kWords));
  }
  return out;
}

}  // namespace

void require_lexicons(ContentType ctype, const LexiconSet& lexicons) {
  std::vector<std::string_view> needed;
  switch (ctype) {
    case ContentType::Name: needed = {lx::kFirstNames, lx::kLastNames}; break;
    case ContentType::Address: needed = {lx::kStreetTypes, lx::kStreetNames, lx::kCities}; break;
    case ContentType::CarModel: needed = {lx::kCarModels}; break;
    case ContentType::InsuranceName: needed = {lx::kInsurers}; break;
    case ContentType::FreeText: needed = {lx::kWords}; break;
    default: break;
  }
  for (auto name : needed) {
    if (!lexicons.has(name)) {
      throw ConfigError("content type " + std::string(to_string(ctype)) + " needs lexicon '" + std::string(name) +
                        "'");
    }
  }
}

std::string generate_raw(ContentType ctype, Xoshiro256& rng, const LexiconSet& lexicons) {
  require_lexicons(ctype, lexicons);
  switch (ctype) {
    case ContentType::FreeText: return make_free_text(rng, lexicons);
    case ContentType::Name: return make_name(rng, lexicons);
    case ContentType::PhoneNumber: return make_phone(rng);
    case ContentType::Date: return make_date(rng);
    case ContentType::Time: return make_time(rng);
    case ContentType::Address: return make_address(rng, lexicons);
    case ContentType::LicensePlate: return make_plate(rng);
    case ContentType::Numbers: return make_numbers(rng);
    case ContentType::CarModel: return pick(rng, lexicons.get(lx::kCarModels));
    case ContentType::InsuranceName: return pick(rng, lexicons.get(lx::kInsurers));
  }
  throw ConfigError("unhandled content type");
}

TypedString generate(ContentType ctype, const SeedStream& seed, const LexiconSet& lexicons, const Alphabet& alphabet) {
  require_lexicons(ctype, lexicons);
  for (int attempt = 0; attempt < kMaxFoldRetries; ++attempt) {
    Xoshiro256 rng = seed.child(static_cast<std::uint64_t>(attempt)).rng();
    const std::string folded = fold_to_alphabet(generate_raw(ctype, rng, lexicons), alphabet);
    const std::string text = utf8_encode(normalize_whitespace(utf8_decode(folded)));
    if (!text.empty()) return {text, ctype};
  }
  throw ConfigError("generator for " + std::string(to_string(ctype)) + " produced only empty strings after " +
                    std::to_string(kMaxFoldRetries) + " attempts");
}

}  // namespace typedhwr::typedgen
