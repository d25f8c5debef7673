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

#include "typedhwr/typedgen/weights.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "typedhwr/common/error.hpp"

namespace typedhwr::typedgen {

TypeWeights TypeWeights::defaults() {
  constexpr std::array<double, kNumContentTypes> kCounts = {1181, 594, 241, 435, 75, 805, 141, 335, 129, 210};
  double total = 0;
  for (double c : kCounts) total += c;
  std::array<double, kNumContentTypes> w{};
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = kCounts[i] / total;
  return TypeWeights(w);
}

TypeWeights TypeWeights::only(ContentType t) {
  std::array<double, kNumContentTypes> w{};
  w[static_cast<std::size_t>(index_of(t))] = 1.0;
  return TypeWeights(w);
}

TypeWeights::TypeWeights(const std::array<double, kNumContentTypes>& weights) : weights_(weights) {
  double sum = 0;
  for (double w : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("type weight outside [0, 1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "type weights sum to " << sum << ", expected 1";
    throw ConfigError(msg.str());
  }
}

TypeWeights TypeWeights::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("type weights: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("type weights must be a JSON object");
  std::array<double, kNumContentTypes> w{};
  for (const auto& [key, value] : j.items()) {
    const ContentType t = content_type_from_string(key);
    if (!value.is_number()) throw ConfigError("type weight for " + key + " is not a number");
    w[static_cast<std::size_t>(index_of(t))] = value.get<double>();
  }
  return TypeWeights(w);
}

TypeWeights TypeWeights::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open type weights " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string TypeWeights::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (ContentType t : kAllContentTypes) j[std::string(to_string(t))] = (*this)[t];
  return j.dump(2);
}

ContentType sample_type(const TypeWeights& weights, const SeedStream& seed) {
  const double u = seed.rng().uniform();
  double cumulative = 0.0;
  int last_nonzero = 0;
  for (int i = 0; i < kNumContentTypes; ++i) {
    const double w = weights.values()[static_cast<std::size_t>(i)];
    if (w <= 0.0) continue;
    last_nonzero = i;
    cumulative += w;
    if (u < cumulative) return static_cast<ContentType>(i);
  }
  // Rounding left u above the accumulated total.
  return static_cast<ContentType>(last_nonzero);
}

}  // namespace typedhwr::typedgen
