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

#include "typedhwr/ctc/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "typedhwr/common/error.hpp"

namespace typedhwr::ctc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int resolve_valid(const LogitSequence& logits, std::optional<int> valid_columns) {
  const int valid = valid_columns.value_or(logits.steps());
  if (valid < 0 || valid > logits.steps()) {
    throw ConfigError("valid_columns " + std::to_string(valid) + " outside [0, " + std::to_string(logits.steps()) +
                      "]");
  }
  return valid;
}

void check_label(const LogitSequence& logits, std::span<const int> label) {
  for (int s : label) {
    if (s < 0 || s >= logits.blank()) {
      throw ConfigError("label index " + std::to_string(s) + " is not a symbol class (S = " +
                        std::to_string(logits.classes()) + ")");
    }
  }
}

}  // namespace

LogitSequence::LogitSequence(int steps, int classes)
    : steps_(steps), classes_(classes), values_(static_cast<std::size_t>(steps) * classes, 0.0) {
  if (steps < 1 || classes < 2) throw ConfigError("logit sequence needs T >= 1 and S >= 2");
}

LogitSequence::LogitSequence(int steps, int classes, std::vector<double> values)
    : steps_(steps), classes_(classes), values_(std::move(values)) {
  if (steps < 1 || classes < 2) throw ConfigError("logit sequence needs T >= 1 and S >= 2");
  if (values_.size() != static_cast<std::size_t>(steps) * classes) {
    throw ShapeMismatchError("logit values do not match T x S");
  }
}

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

std::vector<double> log_softmax(const LogitSequence& logits, int steps) {
  const int S = logits.classes();
  std::vector<double> out(static_cast<std::size_t>(steps) * S);
  for (int t = 0; t < steps; ++t) {
    const auto row = logits.row(t);
    const double hi = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - hi);
    const double log_z = hi + std::log(sum);
    for (int k = 0; k < S; ++k) out[static_cast<std::size_t>(t * S + k)] = row[static_cast<std::size_t>(k)] - log_z;
  }
  return out;
}

int min_steps(std::span<const int> label) {
  int n = static_cast<int>(label.size());
  for (std::size_t i = 1; i < label.size(); ++i) n += label[i] == label[i - 1] ? 1 : 0;
  return n;
}

LossResult ctc_loss(const LogitSequence& logits, std::span<const int> label, std::optional<int> valid_columns) {
  const int T = resolve_valid(logits, valid_columns);
  const int S = logits.classes();
  const int blank = logits.blank();
  check_label(logits, label);
  if (T < min_steps(label) || T == 0) {
    throw InfeasibleLabelError("label of length " + std::to_string(label.size()) + " needs at least " +
                               std::to_string(std::max(1, min_steps(label))) + " steps, have " + std::to_string(T));
  }

  const int U = 2 * static_cast<int>(label.size()) + 1;
  std::vector<int> ext(static_cast<std::size_t>(U), blank);
  for (std::size_t i = 0; i < label.size(); ++i) ext[2 * i + 1] = label[i];
  // skip[s]: transition s-2 -> s allowed.
  std::vector<char> skip(static_cast<std::size_t>(U), 0);
  for (int s = 2; s < U; ++s) skip[s] = ext[s] != blank && ext[s] != ext[s - 2];

  const auto logp = log_softmax(logits, T);
  auto lp = [&](int t, int k) { return logp[static_cast<std::size_t>(t * S + k)]; };

  std::vector<double> alpha(static_cast<std::size_t>(T) * U, kNegInf);
  std::vector<double> beta(static_cast<std::size_t>(T) * U, kNegInf);
  auto A = [&](int t, int s) -> double& { return alpha[static_cast<std::size_t>(t * U + s)]; };
  auto B = [&](int t, int s) -> double& { return beta[static_cast<std::size_t>(t * U + s)]; };

  A(0, 0) = lp(0, ext[0]);
  if (U > 1) A(0, 1) = lp(0, ext[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < U; ++s) {
      double acc = A(t - 1, s);
      if (s >= 1) acc = log_sum_exp(acc, A(t - 1, s - 1));
      if (s >= 2 && skip[s]) acc = log_sum_exp(acc, A(t - 1, s - 2));
      if (acc != kNegInf) A(t, s) = acc + lp(t, ext[s]);
    }
  }
  double log_prob = A(T - 1, U - 1);
  if (U > 1) log_prob = log_sum_exp(log_prob, A(T - 1, U - 2));

  // beta excludes the emission at t itself.
  B(T - 1, U - 1) = 0.0;
  if (U > 1) B(T - 1, U - 2) = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    for (int s = 0; s < U; ++s) {
      double acc = B(t + 1, s) == kNegInf ? kNegInf : B(t + 1, s) + lp(t + 1, ext[s]);
      if (s + 1 < U && B(t + 1, s + 1) != kNegInf) {
        acc = log_sum_exp(acc, B(t + 1, s + 1) + lp(t + 1, ext[s + 1]));
      }
      if (s + 2 < U && skip[s + 2] && B(t + 1, s + 2) != kNegInf) {
        acc = log_sum_exp(acc, B(t + 1, s + 2) + lp(t + 1, ext[s + 2]));
      }
      B(t, s) = acc;
    }
  }

  LossResult result;
  result.loss = -log_prob;
  result.grad.assign(static_cast<std::size_t>(logits.steps()) * S, 0.0);
  for (int t = 0; t < T; ++t) {
    double* g = result.grad.data() + static_cast<std::ptrdiff_t>(t) * S;
    for (int k = 0; k < S; ++k) g[k] = std::exp(lp(t, k));
    for (int s = 0; s < U; ++s) {
      const double a = A(t, s), b = B(t, s);
      if (a == kNegInf || b == kNegInf) continue;
      g[ext[s]] -= std::exp(a + b - log_prob);
    }
  }
  return result;
}

LabelSeq collapse(std::span<const int> path, int blank) {
  LabelSeq out;
  int prev = -1;
  for (int k : path) {
    if (k != prev && k != blank) out.push_back(k);
    prev = k;
  }
  return out;
}

LabelSeq greedy_decode_indices(const LogitSequence& logits, int valid_columns) {
  const int T = resolve_valid(logits, valid_columns);
  std::vector<int> path(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const auto row = logits.row(t);
    path[static_cast<std::size_t>(t)] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return collapse(path, logits.blank());
}

std::string greedy_decode(const LogitSequence& logits, int valid_columns, const typedgen::Alphabet& alphabet) {
  if (alphabet.num_classes() != logits.classes()) throw ConfigError("alphabet does not match logit classes");
  return alphabet.decode(greedy_decode_indices(logits, valid_columns));
}

std::vector<Hypothesis> beam_search(const LogitSequence& logits, int valid_columns, int beam_width) {
  if (beam_width < 1) throw ConfigError("beam_width must be >= 1");
  const int T = resolve_valid(logits, valid_columns);
  const int S = logits.classes();
  const int blank = logits.blank();
  const auto logp = log_softmax(logits, T);

  struct Mass {
    double blank = kNegInf;
    double nonblank = kNegInf;
    double total() const { return log_sum_exp(blank, nonblank); }
  };
  using Beam = std::map<LabelSeq, Mass>;

  auto prune = [&](const Beam& beam) {
    std::vector<std::pair<LabelSeq, Mass>> items(beam.begin(), beam.end());
    // Stable on the map's lexicographic order, so ties resolve identically.
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second.total() > b.second.total(); });
    if (items.size() > static_cast<std::size_t>(beam_width)) items.resize(static_cast<std::size_t>(beam_width));
    return items;
  };

  Beam beam;
  beam[{}].blank = 0.0;
  for (int t = 0; t < T; ++t) {
    const double* lp = logp.data() + static_cast<std::ptrdiff_t>(t) * S;
    Beam next;
    for (const auto& [prefix, mass] : prune(beam)) {
      auto& same = next[prefix];
      same.blank = log_sum_exp(same.blank, mass.total() + lp[blank]);
      const int last = prefix.empty() ? -1 : prefix.back();
      for (int k = 0; k < S; ++k) {
        if (k == blank) continue;
        LabelSeq extended = prefix;
        extended.push_back(k);
        auto& ext = next[extended];
        if (k == last) {
          ext.nonblank = log_sum_exp(ext.nonblank, mass.blank + lp[k]);
          auto& stay = next[prefix];
          stay.nonblank = log_sum_exp(stay.nonblank, mass.nonblank + lp[k]);
        } else {
          ext.nonblank = log_sum_exp(ext.nonblank, mass.total() + lp[k]);
        }
      }
    }
    beam = std::move(next);
  }

  std::vector<Hypothesis> out;
  for (auto& [prefix, mass] : prune(beam)) out.push_back({prefix, mass.total()});
  return out;
}

std::vector<std::pair<std::string, double>> beam_decode(const LogitSequence& logits, int valid_columns,
                                                        int beam_width, const typedgen::Alphabet& alphabet) {
  if (alphabet.num_classes() != logits.classes()) throw ConfigError("alphabet does not match logit classes");
  std::vector<std::pair<std::string, double>> out;
  for (const auto& h : beam_search(logits, valid_columns, beam_width)) {
    out.emplace_back(alphabet.decode(h.labels), h.log_prob);
  }
  return out;
}

double oracle_label_prob(const LogitSequence& logits, std::span<const int> label) {
  const int T = logits.steps();
  const int S = logits.classes();
  if (T > kOracleMaxSteps || S > kOracleMaxClasses) {
    throw GuardError("oracle enumeration limited to T <= 8 and S <= 5");
  }
  check_label(logits, label);
  const auto logp = log_softmax(logits, T);
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  double total = 0.0;
  for (;;) {
    double log_path = 0.0;
    for (int t = 0; t < T; ++t) log_path += logp[static_cast<std::size_t>(t * S + path[static_cast<std::size_t>(t)])];
    const LabelSeq collapsed = collapse(path, logits.blank());
    if (std::equal(collapsed.begin(), collapsed.end(), label.begin(), label.end())) total += std::exp(log_path);
    int t = 0;
    while (t < T && ++path[static_cast<std::size_t>(t)] == S) path[static_cast<std::size_t>(t++)] = 0;
    if (t == T) break;
  }
  return total;
}

}  // namespace typedhwr::ctc
