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

#include "typedhwr/metrics/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "typedhwr/common/error.hpp"
#include "typedhwr/common/text.hpp"

namespace typedhwr::metrics {

namespace {

// Full DP table, (|a|+1) x (|b|+1), row-major.
std::vector<std::size_t> edit_table(std::u32string_view a, std::u32string_view b) {
  const std::size_t cols = b.size() + 1;
  std::vector<std::size_t> d((a.size() + 1) * cols);
  for (std::size_t j = 0; j < cols; ++j) d[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    d[i * cols] = i;
    for (std::size_t j = 1; j < cols; ++j) {
      const std::size_t sub = d[(i - 1) * cols + j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i * cols + j] = std::min({d[(i - 1) * cols + j] + 1, d[i * cols + j - 1] + 1, sub});
    }
  }
  return d;
}

std::u32string prepare(std::string_view s, bool ascii_fold) {
  std::u32string u = utf8_decode(s);
  return ascii_fold ? fold_diacritics(u) : u;
}

}  // namespace

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(utf8_decode(a), utf8_decode(b));
}

std::vector<bool> matched_groundtruth_positions(std::u32string_view prediction, std::u32string_view groundtruth) {
  const auto d = edit_table(prediction, groundtruth);
  const std::size_t cols = groundtruth.size() + 1;
  std::vector<bool> matched(groundtruth.size(), false);
  std::size_t i = prediction.size(), j = groundtruth.size();
  while (i > 0 || j > 0) {
    const std::size_t here = d[i * cols + j];
    if (i > 0 && j > 0 && prediction[i - 1] == groundtruth[j - 1] && here == d[(i - 1) * cols + j - 1]) {
      matched[j - 1] = true;
      --i;
      --j;
    } else if (i > 0 && j > 0 && here == d[(i - 1) * cols + j - 1] + 1) {
      --i;
      --j;
    } else if (j > 0 && here == d[i * cols + j - 1] + 1) {
      --j;
    } else {
      --i;
    }
  }
  return matched;
}

double field_cer(const EvalPair& pair, bool ascii_fold) {
  const auto pred = prepare(pair.prediction, ascii_fold);
  const auto gt = prepare(pair.groundtruth, ascii_fold);
  const double denom = static_cast<double>(std::max<std::size_t>(1, gt.size()));
  return static_cast<double>(edit_distance(pred, gt)) / denom;
}

bool field_error(const EvalPair& pair, bool ascii_fold) {
  return normalize_whitespace(prepare(pair.prediction, ascii_fold)) !=
         normalize_whitespace(prepare(pair.groundtruth, ascii_fold));
}

double cer(std::span<const EvalPair> pairs, bool ascii_fold) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : pairs) sum += field_cer(p, ascii_fold);
  return 100.0 * sum / static_cast<double>(pairs.size());
}

double fer(std::span<const EvalPair> pairs, bool ascii_fold) {
  if (pairs.empty()) return 0.0;
  std::size_t errors = 0;
  for (const auto& p : pairs) errors += field_error(p, ascii_fold) ? 1 : 0;
  return 100.0 * static_cast<double>(errors) / static_cast<double>(pairs.size());
}

namespace {

MetricRow make_row(std::span<const EvalPair> pairs) {
  MetricRow row;
  row.count = pairs.size();
  for (const auto& p : pairs) row.empty_groundtruth += p.groundtruth.empty() ? 1 : 0;
  if (row.count > 0) {
    row.cer = cer(pairs, false);
    row.cer_ascii = cer(pairs, true);
    row.fer = fer(pairs, false);
    row.fer_ascii = fer(pairs, true);
  }
  return row;
}

nlohmann::ordered_json row_json(const MetricRow& row) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["count"] = row.count;
  j["empty_groundtruth"] = row.empty_groundtruth;
  j["cer"] = opt(row.cer);
  j["cer_ascii"] = opt(row.cer_ascii);
  j["fer"] = opt(row.fer);
  j["fer_ascii"] = opt(row.fer_ascii);
  return j;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v);
  return buf;
}

}  // namespace

EvalReport report(std::span<const EvalPair> pairs) {
  EvalReport r;
  r.overall = make_row(pairs);
  for (auto t : typedgen::kAllContentTypes) {
    std::vector<EvalPair> subset;
    for (const auto& p : pairs) {
      if (p.ctype == t) subset.push_back(p);
    }
    if (!subset.empty()) r.per_type[static_cast<std::size_t>(index_of(t))] = make_row(subset);
  }
  return r;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["overall"] = row_json(overall);
  nlohmann::ordered_json types = nlohmann::ordered_json::object();
  for (auto t : typedgen::kAllContentTypes) {
    const auto& row = per_type[static_cast<std::size_t>(index_of(t))];
    if (row) types[std::string(to_string(t))] = row_json(*row);
  }
  j["per_type"] = types;
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %7s %7s %9s %7s %9s\n", "type", "count", "CER", "CER-ASCII", "FER",
                "FER-ASCII");
  out << line;
  auto emit = [&](std::string_view name, const MetricRow& row) {
    std::snprintf(line, sizeof line, "%-14.*s %7zu %7s %9s %7s %9s\n", static_cast<int>(name.size()), name.data(),
                  row.count, cell(row.cer).c_str(), cell(row.cer_ascii).c_str(), cell(row.fer).c_str(),
                  cell(row.fer_ascii).c_str());
    out << line;
  };
  for (auto t : typedgen::kAllContentTypes) {
    const auto& row = per_type[static_cast<std::size_t>(index_of(t))];
    if (row) emit(to_string(t), *row);
  }
  emit("overall", overall);
  return out.str();
}

std::vector<EvalPair> parse_eval_jsonl(std::string_view content) {
  std::vector<EvalPair> pairs;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      pairs.push_back({j.at("prediction").get<std::string>(), j.at("groundtruth").get<std::string>(),
                       typedgen::content_type_from_string(j.at("type").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("eval input line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return pairs;
}

}  // namespace typedhwr::metrics
