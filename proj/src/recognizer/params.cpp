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

#include "typedhwr/recognizer/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "typedhwr/common/error.hpp"
#include "typedhwr/common/rng.hpp"
#include "typedhwr/common/text.hpp"

namespace typedhwr::recognizer {

using nlohmann::ordered_json;

void ModelParams::add(const std::string& name, std::vector<int> shape, double fill) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  tensors_[name] = Tensor{std::move(shape), std::vector<double>(n, fill)};
}

Tensor& ModelParams::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ShapeMismatchError("missing tensor " + name);
  return it->second;
}

const Tensor& ModelParams::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ShapeMismatchError("missing tensor " + name);
  return it->second;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams out;
  for (const auto& [name, t] : tensors_) out.add(name, t.shape);
  return out;
}

bool ModelParams::all_finite() const {
  for (const auto& [name, t] : tensors_) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) {
    if (is_trainable(name)) n += t.size();
  }
  return n;
}

bool is_trainable(const std::string& name) {
  return !name.ends_with(".running_mean") && !name.ends_with(".running_var");
}

ModelParams make_params(const ArchConfig& arch) {
  arch.validate();
  ModelParams p;
  int in = 1;
  for (std::size_t i = 0; i < arch.conv_layers.size(); ++i) {
    const int out = arch.conv_layers[i].out_channels;
    const std::string c = "conv" + std::to_string(i);
    p.add(c + ".weight", {out, in, 3, 3});
    p.add(c + ".bias", {out});
    if (arch.conv_layers[i].batchnorm) {
      const std::string b = "bn" + std::to_string(i);
      p.add(b + ".gamma", {out}, 1.0);
      p.add(b + ".beta", {out});
      p.add(b + ".running_mean", {out});
      p.add(b + ".running_var", {out}, 1.0);
    }
    in = out;
  }
  const int h = arch.recurrent_hidden;
  int rin = arch.column_feature_dim();
  for (int l = 0; l < arch.recurrent_layers; ++l) {
    for (const char* dir : {"fw", "bw"}) {
      const std::string base = "lstm" + std::to_string(l) + "." + dir;
      p.add(base + ".w_ih", {4 * h, rin});
      p.add(base + ".w_hh", {4 * h, h});
      p.add(base + ".bias", {4 * h});
    }
    rin = 2 * h;
  }
  p.add("proj.weight", {arch.num_classes, 2 * h});
  p.add("proj.bias", {arch.num_classes});
  return p;
}

ModelParams init_params(const ArchConfig& arch, std::uint64_t seed) {
  ModelParams p = make_params(arch);
  Xoshiro256 rng(seed);
  const double lstm_bound = 1.0 / std::sqrt(static_cast<double>(arch.recurrent_hidden));
  for (auto& [name, t] : p.tensors()) {
    if (name.ends_with(".weight")) {
      const int fan_in = static_cast<int>(t.size()) / t.shape[0];
      const double bound = std::sqrt((name.starts_with("conv") ? 6.0 : 3.0) / fan_in);
      for (auto& v : t.values) v = rng.uniform(-bound, bound);
    } else if (name.ends_with(".w_ih") || name.ends_with(".w_hh")) {
      for (auto& v : t.values) v = rng.uniform(-lstm_bound, lstm_bound);
    } else if (name.starts_with("lstm") && name.ends_with(".bias")) {
      const int h = arch.recurrent_hidden;
      for (int k = h; k < 2 * h; ++k) t.values[static_cast<std::size_t>(k)] = 1.0;
    }
  }
  return p;
}

void check_shapes(const ModelParams& params, const ArchConfig& arch) {
  const ModelParams expected = make_params(arch);
  for (const auto& [name, t] : expected.tensors()) {
    if (!params.contains(name)) throw ShapeMismatchError("checkpoint lacks tensor " + name);
    const Tensor& have = params.at(name);
    std::size_t n = 1;
    for (int d : have.shape) n *= static_cast<std::size_t>(std::max(d, 0));
    if (have.shape != t.shape || have.values.size() != n) {
      throw ShapeMismatchError("tensor " + name + " does not match the architecture");
    }
  }
  if (params.tensors().size() != expected.tensors().size()) {
    throw ShapeMismatchError("checkpoint has tensors the architecture does not use");
  }
}

std::string checkpoint_to_string(const ModelParams& params, const ArchConfig& arch,
                                 const typedgen::Alphabet& alphabet) {
  check_shapes(params, arch);
  ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["arch"] = arch.to_json();
  j["alphabet"] = ordered_json::array();
  for (char32_t c : alphabet.symbols()) j["alphabet"].push_back(utf8_encode(c));
  j["tensors"] = ordered_json::object();
  for (const auto& [name, t] : params.tensors()) j["tensors"][name] = {{"shape", t.shape}, {"values", t.values}};
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != kCheckpointFormat) {
      throw CorruptFileError("not a typedhwr checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw VersionMismatchError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                                 std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint ck;
    ck.arch = ArchConfig::from_json(j.at("arch"));
    std::u32string symbols;
    for (const auto& s : j.at("alphabet")) {
      const auto cps = utf8_decode(s.get<std::string>());
      if (cps.size() != 1) throw CorruptFileError("checkpoint alphabet entries must be single characters");
      symbols += cps;
    }
    ck.alphabet = typedgen::Alphabet(symbols);
    for (const auto& [name, t] : j.at("tensors").items()) {
      ck.params.tensors()[name] = Tensor{t.at("shape").get<std::vector<int>>(), t.at("values").get<std::vector<double>>()};
    }
    if (ck.alphabet.num_classes() != ck.arch.num_classes) {
      throw ShapeMismatchError("checkpoint alphabet size does not match num_classes");
    }
    check_shapes(ck.params, ck.arch);
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError(std::string("checkpoint is malformed: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, const ArchConfig& arch,
                     const typedgen::Alphabet& alphabet) {
  const std::string text = checkpoint_to_string(params, arch, alphabet);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << text;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace typedhwr::recognizer
