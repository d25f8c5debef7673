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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "typedhwr/common/rng.hpp"
#include "typedhwr/recognizer/network.hpp"

namespace typedhwr::testkit {

// 32 x 32 input, 2 conv layers (2 and 3 channels), 2 BiLSTM layers of 3,
// 3 classes.
inline recognizer::ArchConfig toy_arch(bool batchnorm) {
  recognizer::ArchConfig a;
  a.conv_layers = {{2, batchnorm}, {3, batchnorm}};
  a.pools = {{0, recognizer::PoolKind::k2x2}, {1, recognizer::PoolKind::k2x1}};
  a.recurrent_hidden = 3;
  a.recurrent_layers = 2;
  a.num_classes = 3;
  a.num_types = 10;
  a.type_input_enabled = true;
  return a;
}

inline imaging::GrayImage noise_image(int w, int h, Xoshiro256& rng) {
  imaging::GrayImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

struct GradCheck {
  std::string worst_tensor;
  double worst = 0;
  int retried = 0;  // entries re-measured at step / 10
};

// Central differences on every trainable entry; relative error floored at
// 1e-6 in the denominator. An entry above retry_above is measured again at
// step / 10 and keeps the smaller error: with random images a ReLU or
// max-pool switch can sit inside +-step, where differences mean nothing.
inline GradCheck check_gradients(const recognizer::ModelParams& params, const recognizer::ArchConfig& arch,
                                 const std::vector<recognizer::SampleInput>& batch,
                                 const std::vector<std::vector<int>>& labels, double step = 1e-5,
                                 double retry_above = INFINITY) {
  const auto g = recognizer::loss_and_gradient(params, arch, batch, labels);
  GradCheck r;
  for (const auto& [name, t] : params.tensors()) {
    if (!recognizer::is_trainable(name)) continue;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double an = g.grads.at(name).values[k];
      auto error_at = [&](double h) {
        auto q = params;
        q.at(name).values[k] += h;
        const double lp = recognizer::loss_and_gradient(q, arch, batch, labels).loss;
        q.at(name).values[k] -= 2 * h;
        const double lm = recognizer::loss_and_gradient(q, arch, batch, labels).loss;
        const double fd = (lp - lm) / (2 * h);
        return std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
      };
      double e = error_at(step);
      if (e > retry_above) {
        e = std::min(e, error_at(step / 10));
        ++r.retried;
      }
      if (e > r.worst) {
        r.worst = e;
        r.worst_tensor = name;
      }
    }
  }
  return r;
}

}  // namespace typedhwr::testkit
