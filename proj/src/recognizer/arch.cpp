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

#include "typedhwr/recognizer/arch.hpp"

#include "typedhwr/common/error.hpp"

namespace typedhwr::recognizer {

ArchConfig ArchConfig::desk(int num_classes, bool typed) {
  ArchConfig a;
  a.conv_layers = {{8, false}, {16, false}};
  a.pools = {{0, PoolKind::k2x2}, {1, PoolKind::k2x1}};
  a.recurrent_hidden = 32;
  a.recurrent_layers = 1;
  a.num_classes = num_classes;
  a.type_input_enabled = typed;
  return a;
}

ArchConfig ArchConfig::full(int num_classes, bool typed) {
  ArchConfig a;
  a.conv_layers = {{64, false}, {128, false}, {256, false}, {256, true}, {512, true}, {512, false}, {512, true}};
  a.pools = {{0, PoolKind::k2x2}, {1, PoolKind::k2x2}, {3, PoolKind::k2x1}, {5, PoolKind::k2x1}};
  a.recurrent_hidden = 256;
  a.recurrent_layers = 2;
  a.num_classes = num_classes;
  a.type_input_enabled = typed;
  return a;
}

int ArchConfig::vertical_factor() const {
  int f = 1;
  for (std::size_t i = 0; i < pools.size(); ++i) f *= 2;
  return f;
}

int ArchConfig::horizontal_factor() const {
  int f = 1;
  for (const auto& p : pools) {
    if (p.kind == PoolKind::k2x2) f *= 2;
  }
  return f;
}

void ArchConfig::validate() const {
  if (input_height < 1) throw ConfigError("arch: input height must be positive");
  if (conv_layers.empty()) throw ConfigError("arch: at least one conv layer is required");
  for (const auto& c : conv_layers) {
    if (c.out_channels < 1) throw ConfigError("arch: conv channels must be positive");
  }
  int last = -1;
  for (const auto& p : pools) {
    if (p.after_layer < 0 || p.after_layer >= static_cast<int>(conv_layers.size())) {
      throw ConfigError("arch: pool refers to a missing conv layer");
    }
    if (p.after_layer < last) throw ConfigError("arch: pools must be listed in layer order");
    last = p.after_layer;
  }
  if (pools.size() > 30 || input_height % vertical_factor() != 0) {
    throw ConfigError("arch: input height must divide evenly through the vertical pool factors");
  }
  if (pools.size() > 2) {
    bool has_2x1 = false;
    for (const auto& p : pools) has_2x1 |= p.kind == PoolKind::k2x1;
    if (!has_2x1) throw ConfigError("arch: more than two pools require at least one 2x1 pool");
  }
  if (recurrent_hidden < 1 || recurrent_layers < 1) throw ConfigError("arch: recurrent sizes must be positive");
  if (num_types < 1) throw ConfigError("arch: num_types must be positive");
  if (num_classes < 2) throw ConfigError("arch: num_classes must be >= 2");
}

std::string to_string(PoolKind k) { return k == PoolKind::k2x2 ? "2x2" : "2x1"; }

nlohmann::ordered_json ArchConfig::to_json() const {
  nlohmann::ordered_json j;
  j["input_height"] = input_height;
  j["conv_layers"] = nlohmann::ordered_json::array();
  for (const auto& c : conv_layers) j["conv_layers"].push_back({{"out_channels", c.out_channels}, {"batchnorm", c.batchnorm}});
  j["pools"] = nlohmann::ordered_json::array();
  for (const auto& p : pools) j["pools"].push_back({{"after_layer", p.after_layer}, {"kind", to_string(p.kind)}});
  j["recurrent_hidden"] = recurrent_hidden;
  j["recurrent_layers"] = recurrent_layers;
  j["num_types"] = num_types;
  j["num_classes"] = num_classes;
  j["type_input_enabled"] = type_input_enabled;
  return j;
}

ArchConfig ArchConfig::from_json(const nlohmann::ordered_json& j) {
  ArchConfig a;
  try {
    a.input_height = j.value("input_height", 32);
    a.conv_layers.clear();
    for (const auto& c : j.at("conv_layers")) {
      a.conv_layers.push_back({c.at("out_channels").get<int>(), c.value("batchnorm", false)});
    }
    a.pools.clear();
    for (const auto& p : j.at("pools")) {
      const auto kind = p.at("kind").get<std::string>();
      if (kind != "2x2" && kind != "2x1") throw ConfigError("arch: unknown pool kind '" + kind + "'");
      a.pools.push_back({p.at("after_layer").get<int>(), kind == "2x2" ? PoolKind::k2x2 : PoolKind::k2x1});
    }
    a.recurrent_hidden = j.value("recurrent_hidden", 32);
    a.recurrent_layers = j.value("recurrent_layers", 1);
    a.num_types = j.value("num_types", 10);
    a.num_classes = j.at("num_classes").get<int>();
    a.type_input_enabled = j.value("type_input_enabled", true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("arch: malformed config: ") + e.what());
  }
  a.validate();
  return a;
}

}  // namespace typedhwr::recognizer
