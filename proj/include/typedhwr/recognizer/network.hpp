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
#include <vector>

#include <Eigen/Dense>

#include "typedhwr/ctc/ctc.hpp"
#include "typedhwr/imaging/gray_image.hpp"
#include "typedhwr/recognizer/arch.hpp"
#include "typedhwr/recognizer/params.hpp"
#include "typedhwr/typedgen/content_type.hpp"

namespace typedhwr::recognizer {

using typedgen::ContentType;

// One preprocessed image (height = arch.input_height). Columns at or past
// original_width are padding: they never reach the recurrent layer.
struct SampleInput {
  const imaging::GrayImage* image = nullptr;
  int original_width = 0;
  std::optional<ContentType> ctype;
};

enum class Mode { kInference, kTraining };

struct ForwardResult {
  // width / horizontal_factor rows; rows past valid_columns hold proj.bias.
  ctc::LogitSequence logits;
  int valid_columns = 0;
};

// Output column count for an input of the given width.
int column_count(const ArchConfig& arch, int width);
// ceil(original_width / horizontal_factor), capped at column_count.
int valid_columns(const ArchConfig& arch, int width, int original_width);

// Pixel p maps to (255 - p) / 255, so background is 0.
inline double input_value(std::uint8_t p) { return (255.0 - p) / 255.0; }

// Training mode normalizes with batch statistics over every sample's
// unpadded columns; inference uses the running statistics.
std::vector<ForwardResult> forward_batch(const ModelParams& params, const ArchConfig& arch,
                                         std::span<const SampleInput> batch, Mode mode = Mode::kInference,
                                         int workers = 1);
ForwardResult forward(const ModelParams& params, const ArchConfig& arch, const SampleInput& sample);

struct BatchGradient {
  double loss = 0.0;  // mean over samples
  std::vector<double> sample_losses;
  ModelParams grads;  // same names as params; zero for untrained state
  // Per BatchNorm layer name ("bn0", ...): batch mean and variance.
  std::map<std::string, std::vector<double>> batch_mean, batch_var;
};

// Mean CTC loss over the batch and its exact gradient with respect to every
// trainable tensor, in training mode. Per-sample terms are summed in sample
// order regardless of `workers`.
BatchGradient loss_and_gradient(const ModelParams& params, const ArchConfig& arch, std::span<const SampleInput> batch,
                                std::span<const std::vector<int>> labels, int workers = 1);

// Inputs of the projection layer for the valid columns: valid_columns x 2H.
Eigen::MatrixXd features_before_projection(const ModelParams& params, const ArchConfig& arch,
                                           const SampleInput& sample);

// Conv kernels flipped left-right and forward/backward recurrent weights
// swapped.
ModelParams mirrored_params(const ModelParams& params, const ArchConfig& arch);

}  // namespace typedhwr::recognizer
