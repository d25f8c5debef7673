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

#include "typedhwr/recognizer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "typedhwr/common/error.hpp"
#include "typedhwr/common/parallel.hpp"
#include "typedhwr/common/rng.hpp"
#include "typedhwr/common/text.hpp"
#include "typedhwr/metrics/metrics.hpp"

namespace typedhwr::recognizer {

using nlohmann::ordered_json;

void TrainerConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("trainer: learning_rate must be > 0");
  if (!(lr_decay_factor > 0 && lr_decay_factor <= 1)) throw ConfigError("trainer: lr_decay_factor must be in (0, 1]");
  if (lr_decay_every < 1) throw ConfigError("trainer: lr_decay_every must be >= 1");
  if (batch_size < 1) throw ConfigError("trainer: batch_size must be >= 1");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1)) {
    throw ConfigError("trainer: Adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0)) throw ConfigError("trainer: adam_eps must be > 0");
  if (max_iterations < 0) throw ConfigError("trainer: max_iterations must be >= 0");
  if (!(validation_fraction >= 0 && validation_fraction < 1)) {
    throw ConfigError("trainer: validation_fraction must be in [0, 1)");
  }
  if (validate_every < 1) throw ConfigError("trainer: validate_every must be >= 1");
  if (!(grad_clip_norm >= 0)) throw ConfigError("trainer: grad_clip_norm must be >= 0");
  if (!(bn_momentum >= 0 && bn_momentum <= 1)) throw ConfigError("trainer: bn_momentum must be in [0, 1]");
  if (workers < 1) throw ConfigError("trainer: workers must be >= 1");
}

ordered_json TrainerConfig::to_json() const {
  return {{"learning_rate", learning_rate},   {"lr_decay_factor", lr_decay_factor},
          {"lr_decay_every", lr_decay_every}, {"batch_size", batch_size},
          {"adam_beta1", adam_beta1},         {"adam_beta2", adam_beta2},
          {"adam_eps", adam_eps},             {"max_iterations", max_iterations},
          {"seed", seed},                     {"validation_fraction", validation_fraction},
          {"validate_every", validate_every}, {"grad_clip_norm", grad_clip_norm},
          {"bn_momentum", bn_momentum},       {"workers", workers}};
}

TrainerConfig TrainerConfig::from_json(const ordered_json& j) {
  TrainerConfig c;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.lr_decay_factor = j.value("lr_decay_factor", c.lr_decay_factor);
    c.lr_decay_every = j.value("lr_decay_every", c.lr_decay_every);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.seed = j.value("seed", c.seed);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    c.validate_every = j.value("validate_every", c.validate_every);
    c.grad_clip_norm = j.value("grad_clip_norm", c.grad_clip_norm);
    c.bn_momentum = j.value("bn_momentum", c.bn_momentum);
    c.workers = j.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("trainer: malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

double learning_rate_at(const TrainerConfig& cfg, int iteration) {
  return cfg.learning_rate * std::pow(cfg.lr_decay_factor, iteration / cfg.lr_decay_every);
}

void LabeledSet::add(formset::Preprocessed img, std::string text, ContentType t, std::string name) {
  images.push_back(std::move(img));
  texts.push_back(std::move(text));
  types.push_back(t);
  names.push_back(std::move(name));
}

LabeledSet LabeledSet::subset(const std::vector<std::size_t>& indices) const {
  LabeledSet out;
  for (std::size_t i : indices) out.add(images[i], texts[i], types[i], names[i]);
  return out;
}

LabeledSet load_labeled_set(const std::filesystem::path& manifest) {
  const auto records = formset::read_manifest(manifest);
  LabeledSet set;
  const auto root = manifest.parent_path();
  for (const auto& r : records) {
    set.add(formset::preprocess(imaging::read_image(root / r.image_path)), r.text, r.ctype, r.image_path);
  }
  return set;
}

std::string LogEntry::to_json_line() const {
  ordered_json j;
  j["iteration"] = iteration;
  j["loss"] = loss;
  j["lr"] = lr;
  j["val_cer"] = val_cer ? ordered_json(*val_cer) : ordered_json(nullptr);
  return j.dump();
}

namespace {

std::vector<SampleInput> inputs_for(const LabeledSet& set, const std::vector<std::size_t>& ids,
                                    std::optional<ContentType> forced) {
  std::vector<SampleInput> in;
  in.reserve(ids.size());
  for (std::size_t i : ids) {
    in.push_back({&set.images[i].image, set.images[i].original_width, forced ? forced : set.types[i]});
  }
  return in;
}

// Epoch order: a seeded permutation, grouped by width bucket (keeping the
// permuted order inside a bucket), cut into batches, batches shuffled.
std::vector<std::vector<std::size_t>> epoch_batches(const LabeledSet& set, int batch_size, const SeedStream& seed) {
  Xoshiro256 rng = seed.rng();
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::map<int, std::vector<std::size_t>> buckets;
  for (std::size_t i : order) buckets[formset::bucket_width(set.images[i].image.width())].push_back(i);
  std::vector<std::vector<std::size_t>> batches;
  for (const auto& [w, members] : buckets) {
    for (std::size_t s = 0; s < members.size(); s += static_cast<std::size_t>(batch_size)) {
      const auto e = std::min(members.size(), s + static_cast<std::size_t>(batch_size));
      batches.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(s), members.begin() + static_cast<std::ptrdiff_t>(e));
    }
  }
  for (std::size_t i = batches.size(); i > 1; --i) std::swap(batches[i - 1], batches[rng.below(i)]);
  return batches;
}

double validation_cer(const ModelParams& params, const ArchConfig& arch, const typedgen::Alphabet& alphabet,
                      const LabeledSet& set, int workers) {
  const auto preds = recognize(params, arch, alphabet, set, std::nullopt, workers);
  std::vector<metrics::EvalPair> pairs;
  for (std::size_t i = 0; i < set.size(); ++i) pairs.push_back({preds[i], set.texts[i], set.types[i]});
  return metrics::cer(pairs, false);
}

std::string batch_ids(const LabeledSet& set, const std::vector<std::size_t>& ids) {
  std::string s;
  for (std::size_t i : ids) s += (s.empty() ? "" : ", ") + set.names[i];
  return s;
}

}  // namespace

TrainResult train(const ArchConfig& arch, const TrainerConfig& cfg, const LabeledSet& full_set,
                  const typedgen::Alphabet& alphabet, const std::optional<LabeledSet>& validation,
                  const std::filesystem::path& log_path) {
  arch.validate();
  cfg.validate();
  if (arch.num_classes != alphabet.num_classes()) throw ConfigError("arch num_classes does not match the alphabet");
  const SeedStream root{cfg.seed, 0};

  LabeledSet train_set;
  std::optional<LabeledSet> val_set = validation;
  if (!val_set && cfg.validation_fraction > 0 && full_set.size() > 1) {
    std::vector<std::size_t> order(full_set.size());
    std::iota(order.begin(), order.end(), 0);
    Xoshiro256 rng = root.child(1).rng();
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(cfg.validation_fraction * full_set.size())));
    std::vector<std::size_t> val_ids(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> train_ids(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(val_ids.begin(), val_ids.end());
    std::sort(train_ids.begin(), train_ids.end());
    val_set = full_set.subset(val_ids);
    train_set = full_set.subset(train_ids);
  } else {
    train_set = full_set;
  }
  if (train_set.size() == 0 && cfg.max_iterations > 0) throw ConfigError("trainer: empty training set");

  std::vector<std::vector<int>> labels(train_set.size());
  for (std::size_t i = 0; i < train_set.size(); ++i) labels[i] = alphabet.encode(train_set.texts[i], train_set.names[i]);

  std::ofstream log_out;
  if (!log_path.empty()) {
    log_out.open(log_path, std::ios::binary);
    if (!log_out) throw IoError("cannot write training log " + log_path.string());
  }

  TrainResult result;
  ModelParams params = init_params(arch, root.child(0).sub_seed());
  ModelParams m = params.zeros_like(), v = params.zeros_like();
  result.best = params;

  std::vector<std::vector<std::size_t>> batches;
  std::size_t next_batch = 0;
  std::uint64_t epoch = 0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (next_batch == batches.size()) {
      batches = epoch_batches(train_set, cfg.batch_size, root.child(2).child(epoch++));
      next_batch = 0;
    }
    const auto& ids = batches[next_batch++];
    const auto inputs = inputs_for(train_set, ids, std::nullopt);
    std::vector<std::vector<int>> batch_labels;
    for (std::size_t i : ids) batch_labels.push_back(labels[i]);

    BatchGradient g;
    try {
      g = loss_and_gradient(params, arch, inputs, batch_labels, cfg.workers);
    } catch (const InfeasibleLabelError& e) {
      throw InfeasibleLabelError(std::string(e.what()) + " (batch: " + batch_ids(train_set, ids) + ")");
    }
    if (!std::isfinite(g.loss) || !g.grads.all_finite()) {
      throw NumericError("non-finite loss or gradient at iteration " + std::to_string(it) +
                         "; batch samples: " + batch_ids(train_set, ids));
    }
    if (cfg.grad_clip_norm > 0) {
      double sq = 0;
      for (const auto& [name, t] : g.grads.tensors()) {
        for (double x : t.values) sq += x * x;
      }
      const double norm = std::sqrt(sq);
      if (norm > cfg.grad_clip_norm) {
        const double s = cfg.grad_clip_norm / norm;
        for (auto& [name, t] : g.grads.tensors()) {
          for (double& x : t.values) x *= s;
        }
      }
    }

    const double lr = learning_rate_at(cfg, it);
    const double step = static_cast<double>(it + 1);
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, step);
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, step);
    for (auto& [name, t] : params.tensors()) {
      if (!is_trainable(name)) continue;
      auto& gm = m.at(name).values;
      auto& gv = v.at(name).values;
      const auto& gg = g.grads.at(name).values;
      for (std::size_t k = 0; k < t.values.size(); ++k) {
        gm[k] = cfg.adam_beta1 * gm[k] + (1.0 - cfg.adam_beta1) * gg[k];
        gv[k] = cfg.adam_beta2 * gv[k] + (1.0 - cfg.adam_beta2) * gg[k] * gg[k];
        t.values[k] -= lr * (gm[k] / c1) / (std::sqrt(gv[k] / c2) + cfg.adam_eps);
      }
    }
    for (const auto& [bn, mean] : g.batch_mean) {
      auto& rm = params.at(bn + ".running_mean").values;
      auto& rv = params.at(bn + ".running_var").values;
      const auto& var = g.batch_var.at(bn);
      for (std::size_t c = 0; c < rm.size(); ++c) {
        rm[c] = (1.0 - cfg.bn_momentum) * rm[c] + cfg.bn_momentum * mean[c];
        rv[c] = (1.0 - cfg.bn_momentum) * rv[c] + cfg.bn_momentum * var[c];
      }
    }

    LogEntry entry{it, g.loss, lr, std::nullopt};
    const bool last = it + 1 == cfg.max_iterations;
    if (val_set && val_set->size() > 0 && ((it + 1) % cfg.validate_every == 0 || last)) {
      entry.val_cer = validation_cer(params, arch, alphabet, *val_set, cfg.workers);
      if (!result.best_val_cer || *entry.val_cer < *result.best_val_cer) {
        result.best_val_cer = entry.val_cer;
        result.best_iteration = it;
        result.best = params;
      }
    }
    if (log_out) log_out << entry.to_json_line() << '\n';
    result.log.push_back(entry);
  }
  result.final = params;
  if (!result.best_val_cer) {
    result.best = params;
    result.best_iteration = cfg.max_iterations - 1;
  }
  return result;
}

TrainResult train_from_manifest(const ArchConfig& arch, const TrainerConfig& cfg,
                                const std::filesystem::path& manifest, const typedgen::Alphabet& alphabet,
                                const std::filesystem::path& checkpoint_out, const std::filesystem::path& log_path) {
  const LabeledSet set = load_labeled_set(manifest);
  TrainResult r = train(arch, cfg, set, alphabet, std::nullopt, log_path);
  save_checkpoint(checkpoint_out, r.best, arch, alphabet);
  return r;
}

std::vector<std::string> recognize(const ModelParams& params, const ArchConfig& arch,
                                   const typedgen::Alphabet& alphabet, const LabeledSet& set,
                                   std::optional<ContentType> forced, int workers) {
  std::vector<std::string> out(set.size());
  std::vector<std::size_t> all(set.size());
  std::iota(all.begin(), all.end(), 0);
  const auto inputs = inputs_for(set, all, forced);
  parallel_for(set.size(), workers, [&](std::size_t i) {
    const auto r = forward(params, arch, inputs[i]);
    out[i] = ctc::greedy_decode(r.logits, r.valid_columns, alphabet);
  });
  return out;
}

std::map<std::string, long> forced_type_histogram(const ModelParams& params, const ArchConfig& arch,
                                                  const typedgen::Alphabet& alphabet, const LabeledSet& set,
                                                  ContentType forced, int workers) {
  if (!arch.type_input_enabled) throw ConfigError("forced-type analysis needs a model with type input");
  std::map<std::string, long> hist;
  for (const auto& pred : recognize(params, arch, alphabet, set, forced, workers)) {
    for (char32_t c : utf8_decode(pred)) ++hist[utf8_encode(c)];
  }
  return hist;
}

double digit_fraction(const std::map<std::string, long>& histogram) {
  long total = 0, digits = 0;
  for (const auto& [sym, n] : histogram) {
    total += n;
    if (sym.size() == 1 && sym[0] >= '0' && sym[0] <= '9') digits += n;
  }
  return total == 0 ? 0.0 : static_cast<double>(digits) / static_cast<double>(total);
}

}  // namespace typedhwr::recognizer
