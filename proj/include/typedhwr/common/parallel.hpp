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

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace typedhwr {

// Runs fn(i) for i in [0, n) on `workers` threads with a fixed interleaved
// partition. Rethrows the first failure in worker order.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto w = static_cast<std::size_t>(workers);
  std::vector<std::exception_ptr> errors(w);
  {
    std::vector<std::jthread> threads;
    for (std::size_t k = 0; k < w; ++k) {
      threads.emplace_back([&, k] {
        try {
          for (std::size_t i = k; i < n; i += w) fn(i);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace typedhwr
