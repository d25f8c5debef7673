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

// Reference implementations written straight from the definitions. They
// share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <regex>
#include <string>
#include <vector>

namespace typedhwr::testkit {

// ---- CTC ----

// Repeat-merge then blank-delete.
inline std::vector<int> collapse_path(const std::vector<int>& path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int k : path) {
    if (k != prev && k != blank) out.push_back(k);
    prev = k;
  }
  return out;
}

// P(label) = sum over all S^T frame paths collapsing to label of the product
// of per-frame softmax probabilities. logits is T x S row-major.
inline double enumerate_label_prob(const std::vector<double>& logits, int T, int S, const std::vector<int>& label) {
  std::vector<double> p(logits.size());
  for (int t = 0; t < T; ++t) {
    double z = 0;
    for (int k = 0; k < S; ++k) z += std::exp(logits[t * S + k]);
    for (int k = 0; k < S; ++k) p[t * S + k] = std::exp(logits[t * S + k]) / z;
  }
  double total = 0;
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  while (true) {
    if (collapse_path(path, S - 1) == label) {
      double prod = 1;
      for (int t = 0; t < T; ++t) prod *= p[t * S + path[static_cast<std::size_t>(t)]];
      total += prod;
    }
    int t = T - 1;
    while (t >= 0 && ++path[static_cast<std::size_t>(t)] == S) path[static_cast<std::size_t>(t--)] = 0;
    if (t < 0) break;
  }
  return total;
}

// Number of frame paths of length T over S classes collapsing to label.
inline long count_valid_paths(int T, int S, const std::vector<int>& label) {
  long n = 0;
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  while (true) {
    if (collapse_path(path, S - 1) == label) ++n;
    int t = T - 1;
    while (t >= 0 && ++path[static_cast<std::size_t>(t)] == S) path[static_cast<std::size_t>(t--)] = 0;
    if (t < 0) break;
  }
  return n;
}

// ---- edit distance ----

// d(a, b) by the recursive definition, memoized on suffix lengths.
template <typename Str>
std::size_t recursive_edit_distance(const Str& a, const Str& b) {
  std::vector<long> memo((a.size() + 1) * (b.size() + 1), -1);
  std::function<long(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> long {
    if (i == 0) return static_cast<long>(j);
    if (j == 0) return static_cast<long>(i);
    long& m = memo[i * (b.size() + 1) + j];
    if (m >= 0) return m;
    const long sub = d(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
    m = std::min({d(i - 1, j) + 1, d(i, j - 1) + 1, sub});
    return m;
  };
  return static_cast<std::size_t>(d(a.size(), b.size()));
}

// ---- grammars ----

inline bool valid_calendar_date(int d, int m, int y) {
  if (m < 1 || m > 12 || d < 1) return false;
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const int days[] = {31, leap ? 29 : 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return d <= days[m - 1];
}

// dd/mm/yy, dd/mm/yyyy, dd.mm.yy, dd-mm-yyyy; real dates in 1950..2025.
inline bool valid_date(const std::string& s) {
  static const std::regex re(R"(^(\d{2})([/.-])(\d{2})([/.-])(\d{2}|\d{4})$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) return false;
  const std::string sep = m[2].str() + m[4].str();
  const bool four = m[5].length() == 4;
  if (!((sep == "//") || (sep == ".." && !four) || (sep == "--" && four))) return false;
  const int d = std::stoi(m[1]), mo = std::stoi(m[3]);
  int y = std::stoi(m[5]);
  if (four) {
    if (y < 1950 || y > 2025) return false;
    return valid_calendar_date(d, mo, y);
  }
  // Two-digit years are ambiguous about the century; accept either reading
  // that lands in range.
  for (int c : {1900, 2000}) {
    if (c + y >= 1950 && c + y <= 2025 && valid_calendar_date(d, mo, c + y)) return true;
  }
  return false;
}

inline bool valid_time(const std::string& s) {
  static const std::regex re(R"(^(\d{2})(:|H| h )(\d{2})$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) return false;
  return std::stoi(m[1]) <= 23 && std::stoi(m[3]) <= 59;
}

// French numbers: ten digits from 0[1-9], compact or paired.
inline bool valid_phone(const std::string& s) {
  static const std::regex re(R"(^0[1-9](\d{8}|( \d{2}){4}|(\.\d{2}){4})$)");
  return std::regex_match(s, re);
}

// SIV AA-NNN-AA without I, O, U, or legacy NNN AAA NN.
inline bool valid_plate(const std::string& s) {
  static const std::regex siv(R"(^[A-HJ-NP-TV-Z]{2}-\d{3}-[A-HJ-NP-TV-Z]{2}$)");
  static const std::regex fni(R"(^\d{3} [A-HJ-NP-TV-Z]{3} \d{2}$)");
  if (std::regex_match(s, siv)) return s.substr(3, 3) != "000";
  return std::regex_match(s, fni);
}

// Integers or decimals with 1..10 digits in total.
inline bool valid_numbers(const std::string& s) {
  static const std::regex re(R"(^\d+([.,]\d+)?$)");
  if (!std::regex_match(s, re)) return false;
  return std::count_if(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) <= 10;
}

// ---- statistics ----

// Upper 0.001 quantile of chi-square with 9 degrees of freedom.
inline constexpr double kChiSquare9dfAt001 = 27.877;

}  // namespace typedhwr::testkit
