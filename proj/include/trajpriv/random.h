// Copyright 2026 The trajpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJPRIV_RANDOM_H_
#define TRAJPRIV_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace trajpriv {

// SplitMix64 finalizer. Used to derive independent stream seeds from a
// master seed and a counter.
constexpr std::uint64_t MixSeed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of the stream with index `counter` under `master_seed`:
//   MixSeed(master_seed + counter * 0x9e3779b97f4a7c15).
// Distinct counters give distinct, decorrelated streams.
constexpr std::uint64_t DeriveSeed(std::uint64_t master_seed,
                                   std::uint64_t counter) {
  return MixSeed(master_seed + counter * 0x9e3779b97f4a7c15ULL);
}

// An explicit, seeded random stream. Conversions from raw engine output are
// done here rather than with <random> distributions so that draws are
// identical across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). `bound` must be positive.
  std::size_t UniformIndex(std::size_t bound) {
    const std::uint64_t range = static_cast<std::uint64_t>(bound);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % range);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trajpriv

#endif  // TRAJPRIV_RANDOM_H_
