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

#include <array>
#include <filesystem>
#include <string>

#include "typedhwr/common/rng.hpp"
#include "typedhwr/typedgen/content_type.hpp"

namespace typedhwr::typedgen {

// Sampling fraction per content type; validated to sum to 1 within 1e-9.
class TypeWeights {
 public:
  // Real-form distribution: field counts per type divided by their total
  // (1181, 594, 241, 435, 75, 805, 141, 335, 129, 210 of 4146).
  static TypeWeights defaults();
  // JSON object of type name -> fraction; absent types get 0.
  static TypeWeights from_json(const std::string& json_text);
  static TypeWeights load(const std::filesystem::path& path);
  static TypeWeights only(ContentType t);

  explicit TypeWeights(const std::array<double, kNumContentTypes>& weights);

  double operator[](ContentType t) const { return weights_[static_cast<std::size_t>(index_of(t))]; }
  const std::array<double, kNumContentTypes>& values() const { return weights_; }
  std::string to_json() const;

 private:
  std::array<double, kNumContentTypes> weights_{};
};

// Inverse-CDF draw with one uniform from the seed stream.
ContentType sample_type(const TypeWeights& weights, const SeedStream& seed);

}  // namespace typedhwr::typedgen
