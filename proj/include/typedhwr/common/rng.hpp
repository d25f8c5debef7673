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
#include <cstdint>

namespace typedhwr {

// splitmix64 finalizer applied to (x + golden gamma). This is the one
// mixing primitive; docs/rng.md spells out every derived quantity so other
// implementations can reproduce the streams bit for bit.
std::uint64_t splitmix64(std::uint64_t x);

// mix(root, index) = splitmix64(root ^ splitmix64(index))
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t index);

// xoshiro256** seeded from four successive splitmix64 outputs.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();

  // 53-bit mantissa uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Unbiased integer in [0, n) by rejection; n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Integer in [lo, hi] inclusive.
  int range(int lo, int hi);
  // Box-Muller; consumes exactly two uniforms per call (no caching).
  double normal(double mean, double stddev);
  bool bernoulli(double p);

 private:
  std::array<std::uint64_t, 4> s_;
};

// (root_seed, sample_index) pair identifying one deterministic stream.
struct SeedStream {
  std::uint64_t root_seed = 0;
  std::uint64_t sample_index = 0;

  std::uint64_t sub_seed() const { return mix_seed(root_seed, sample_index); }
  Xoshiro256 rng() const { return Xoshiro256(sub_seed()); }
  // Independent stream for a named purpose within this sample.
  SeedStream child(std::uint64_t tag) const { return {sub_seed(), tag}; }
};

}  // namespace typedhwr
