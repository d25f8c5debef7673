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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typedhwr/typedgen/alphabet.hpp"

namespace typedhwr::ctc {

// T x S row-major scores; the blank is the last class (S - 1).
class LogitSequence {
 public:
  LogitSequence() = default;
  LogitSequence(int steps, int classes);
  LogitSequence(int steps, int classes, std::vector<double> values);

  int steps() const { return steps_; }
  int classes() const { return classes_; }
  int blank() const { return classes_ - 1; }

  double& at(int t, int k) { return values_[static_cast<std::size_t>(t * classes_ + k)]; }
  double at(int t, int k) const { return values_[static_cast<std::size_t>(t * classes_ + k)]; }
  std::span<const double> row(int t) const {
    return {values_.data() + static_cast<std::ptrdiff_t>(t) * classes_, static_cast<std::size_t>(classes_)};
  }
  std::span<double> row(int t) {
    return {values_.data() + static_cast<std::ptrdiff_t>(t) * classes_, static_cast<std::size_t>(classes_)};
  }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  int steps_ = 0;
  int classes_ = 0;
  std::vector<double> values_;
};

using LabelSeq = std::vector<int>;

double log_sum_exp(double a, double b);
// Row-wise log-softmax of the first `steps` rows.
std::vector<double> log_softmax(const LogitSequence& logits, int steps);

// |label| plus the number of adjacent equal pairs.
int min_steps(std::span<const int> label);

struct LossResult {
  double loss = 0.0;
  // T x S, gradient of loss w.r.t. the raw scores. Rows >= valid are zero.
  std::vector<double> grad;
};

// -log P(label | softmax(logits)) over the first `valid_columns` steps
// (default: all). Throws InfeasibleLabelError instead of returning +inf.
LossResult ctc_loss(const LogitSequence& logits, std::span<const int> label,
                    std::optional<int> valid_columns = std::nullopt);

// Repeat-merge then blank-delete.
LabelSeq collapse(std::span<const int> path, int blank);

LabelSeq greedy_decode_indices(const LogitSequence& logits, int valid_columns);
std::string greedy_decode(const LogitSequence& logits, int valid_columns, const typedgen::Alphabet& alphabet);

struct Hypothesis {
  LabelSeq labels;
  double log_prob = 0.0;
};

// Prefix beam search with separate blank / non-blank ending masses.
std::vector<Hypothesis> beam_search(const LogitSequence& logits, int valid_columns, int beam_width);
std::vector<std::pair<std::string, double>> beam_decode(const LogitSequence& logits, int valid_columns,
                                                        int beam_width, const typedgen::Alphabet& alphabet);

inline constexpr int kOracleMaxSteps = 8;
inline constexpr int kOracleMaxClasses = 5;

// Brute-force sum over all S^T frame paths; throws GuardError above
// T = 8 or S = 5.
double oracle_label_prob(const LogitSequence& logits, std::span<const int> label);

}  // namespace typedhwr::ctc
