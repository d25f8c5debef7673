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
#include <string>
#include <vector>

#include "typedhwr/recognizer/arch.hpp"
#include "typedhwr/typedgen/alphabet.hpp"

namespace typedhwr::recognizer {

struct Tensor {
  std::vector<int> shape;
  std::vector<double> values;  // row-major

  std::size_t size() const { return values.size(); }
  double* data() { return values.data(); }
  const double* data() const { return values.data(); }
  bool operator==(const Tensor&) const = default;
};

// Named tensors in a fixed (sorted) order:
//   conv{i}.weight [out, in, 3, 3], conv{i}.bias [out]
//   bn{i}.gamma, bn{i}.beta, bn{i}.running_mean, bn{i}.running_var [out]
//   lstm{l}.{fw,bw}.w_ih [4H, in], .w_hh [4H, H], .bias [4H]  (gates i, f, g, o)
//   proj.weight [classes, 2H], proj.bias [classes]
class ModelParams {
 public:
  void add(const std::string& name, std::vector<int> shape, double fill = 0.0);
  bool contains(const std::string& name) const { return tensors_.contains(name); }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;

  std::map<std::string, Tensor>& tensors() { return tensors_; }
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }

  ModelParams zeros_like() const;
  bool all_finite() const;
  std::size_t parameter_count() const;

  bool operator==(const ModelParams&) const = default;

 private:
  std::map<std::string, Tensor> tensors_;
};

// BatchNorm running statistics are state, not trained parameters.
bool is_trainable(const std::string& name);

// Zero-filled tensors with the shapes `arch` implies.
ModelParams make_params(const ArchConfig& arch);
// conv: U(+-sqrt(6 / fan_in)); proj: U(+-sqrt(3 / fan_in)); LSTM matrices
// U(+-1 / sqrt(H)); biases 0 except the forget gate at 1; BN gamma 1, var 1.
// Tensors are filled in name order from one xoshiro256** stream.
ModelParams init_params(const ArchConfig& arch, std::uint64_t seed);
// Throws ShapeMismatchError naming the first missing or misshapen tensor.
void check_shapes(const ModelParams& params, const ArchConfig& arch);

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointFormat = "typedhwr-checkpoint";

struct Checkpoint {
  ArchConfig arch;
  typedgen::Alphabet alphabet = typedgen::Alphabet::default_alphabet();
  ModelParams params;
};

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, const ArchConfig& arch,
                     const typedgen::Alphabet& alphabet);
// CorruptFileError, VersionMismatchError and ShapeMismatchError are distinct.
Checkpoint load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_to_string(const ModelParams& params, const ArchConfig& arch, const typedgen::Alphabet& alphabet);
Checkpoint checkpoint_from_string(const std::string& text);

}  // namespace typedhwr::recognizer
