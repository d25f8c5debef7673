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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "typedhwr/formset/preprocess.hpp"
#include "typedhwr/recognizer/network.hpp"
#include "typedhwr/typedgen/alphabet.hpp"

namespace typedhwr::recognizer {

struct TrainerConfig {
  double learning_rate = 0.001;
  double lr_decay_factor = 0.9;
  int lr_decay_every = 5000;
  int batch_size = 32;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_iterations = 5000;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;  // held out when no validation set is given
  int validate_every = 500;
  double grad_clip_norm = 0.0;  // global L2 norm; 0 disables
  double bn_momentum = 0.1;
  int workers = 1;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static TrainerConfig from_json(const nlohmann::ordered_json& j);
};

// lr(t) = learning_rate * decay ^ floor(t / decay_every)
double learning_rate_at(const TrainerConfig& cfg, int iteration);

// Preprocessed images with their labels, in memory.
struct LabeledSet {
  std::vector<formset::Preprocessed> images;
  std::vector<std::string> texts;
  std::vector<ContentType> types;
  std::vector<std::string> names;

  std::size_t size() const { return images.size(); }
  void add(formset::Preprocessed img, std::string text, ContentType t, std::string name);
  LabeledSet subset(const std::vector<std::size_t>& indices) const;
};

// Reads and preprocesses every record; image paths resolve against the
// manifest's directory.
LabeledSet load_labeled_set(const std::filesystem::path& manifest);

struct LogEntry {
  int iteration = 0;
  double loss = 0.0;
  double lr = 0.0;
  std::optional<double> val_cer;

  std::string to_json_line() const;
};

struct TrainResult {
  ModelParams best;   // lowest validation CER (earliest on ties); final when unvalidated
  ModelParams final;
  std::vector<LogEntry> log;
  std::optional<double> best_val_cer;
  int best_iteration = -1;
};

// Adam over mini-batches bucketed by width. Deterministic for a fixed
// config, whatever the worker count. Throws NumericError naming the batch's
// samples when the loss or a gradient turns non-finite.
TrainResult train(const ArchConfig& arch, const TrainerConfig& cfg, const LabeledSet& train_set,
                  const typedgen::Alphabet& alphabet, const std::optional<LabeledSet>& validation = std::nullopt,
                  const std::filesystem::path& log_path = {});

// Manifest in, best checkpoint and JSONL log out.
TrainResult train_from_manifest(const ArchConfig& arch, const TrainerConfig& cfg,
                                const std::filesystem::path& manifest, const typedgen::Alphabet& alphabet,
                                const std::filesystem::path& checkpoint_out, const std::filesystem::path& log_path);

// Greedy transcriptions; `forced` overrides every sample's type.
std::vector<std::string> recognize(const ModelParams& params, const ArchConfig& arch,
                                   const typedgen::Alphabet& alphabet, const LabeledSet& set,
                                   std::optional<ContentType> forced = std::nullopt, int workers = 1);

// Predicted-symbol counts with every type forced to `forced`. Throws
// ConfigError on a model without type input.
std::map<std::string, long> forced_type_histogram(const ModelParams& params, const ArchConfig& arch,
                                                  const typedgen::Alphabet& alphabet, const LabeledSet& set,
                                                  ContentType forced, int workers = 1);

// Share of counted symbols that are ASCII digits; 0 for an empty histogram.
double digit_fraction(const std::map<std::string, long>& histogram);

}  // namespace typedhwr::recognizer
