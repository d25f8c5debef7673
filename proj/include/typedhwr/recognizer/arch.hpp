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

#include <string>
#include <vector>

#include <json.hpp>

namespace typedhwr::recognizer {

struct ConvLayerSpec {
  int out_channels = 8;
  bool batchnorm = false;

  bool operator==(const ConvLayerSpec&) const = default;
};

// 2x2 halves height and width; 2x1 halves the height only.
enum class PoolKind { k2x2, k2x1 };

struct PoolSpec {
  int after_layer = 0;  // index into conv_layers
  PoolKind kind = PoolKind::k2x2;

  bool operator==(const PoolSpec&) const = default;
};

// Every conv is 3x3, stride 1, zero padding 1, followed by optional
// BatchNorm, ReLU and the pools scheduled after it.
struct ArchConfig {
  int input_height = 32;
  std::vector<ConvLayerSpec> conv_layers;
  std::vector<PoolSpec> pools;
  int recurrent_hidden = 32;
  int recurrent_layers = 1;
  int num_types = 10;
  int num_classes = 70;
  bool type_input_enabled = true;

  // 2 conv layers (8, 16 channels), pools 2x2 then 2x1, one BiLSTM of 32.
  static ArchConfig desk(int num_classes, bool typed = true);
  // 7 conv layers with 3 BatchNorms, two 2x2 and two 2x1 pools, two BiLSTMs of 256.
  static ArchConfig full(int num_classes, bool typed = true);

  // Throws ConfigError.
  void validate() const;

  int vertical_factor() const;
  int horizontal_factor() const;
  int final_height() const { return input_height / vertical_factor(); }
  int final_channels() const { return conv_layers.back().out_channels; }
  int conv_feature_dim() const { return final_height() * final_channels(); }
  int column_feature_dim() const { return conv_feature_dim() + (type_input_enabled ? num_types : 0); }

  nlohmann::ordered_json to_json() const;
  static ArchConfig from_json(const nlohmann::ordered_json& j);

  bool operator==(const ArchConfig&) const = default;
};

std::string to_string(PoolKind k);

}  // namespace typedhwr::recognizer
