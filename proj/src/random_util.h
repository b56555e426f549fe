/* Copyright 2026 The algaeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ALGAEVAL_SRC_RANDOM_UTIL_H_
#define ALGAEVAL_SRC_RANDOM_UTIL_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace algaeval::internal {

// std::mt19937_64's output sequence is fixed by the standard; the
// distributions are not, so the mappings below are written out.

// Uniform in [0, bound), bound >= 1, by rejection.
inline std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= limit) return x % bound;
  }
}

// Uniform in [lo, hi]; returns lo exactly when lo == hi.
inline double UniformReal(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

template <typename T>
void Shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = UniformBelow(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace algaeval::internal

#endif  // ALGAEVAL_SRC_RANDOM_UTIL_H_
