// Copyright 2026 The noise-lab Authors.
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

#ifndef NOISELAB_RNG_HPP_
#define NOISELAB_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace noiselab {

// Counter-based generator: SplitMix64 evaluated at an explicit position.
// Draw i of sub-stream s under seed k is
//   mix(key(k, s) + (i + 1) * golden), key(k, s) = mix(k ^ mix(s * golden)),
// so any draw can be recomputed independently of how work was batched.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const noexcept {
    const std::uint64_t key = mix(seed_ ^ mix(stream * kGolden));
    return mix(key + (index + 1) * kGolden);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
    return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

// Documented sub-stream indices.
namespace stream {
inline constexpr std::uint64_t kY = 0;        // original coordinates
inline constexpr std::uint64_t kZ = 1;        // independent copies
inline constexpr std::uint64_t kA = 2;        // random subset for resampling
inline constexpr std::uint64_t kSubset = 3;   // standalone Bernoulli subsets
inline constexpr std::uint64_t kClocks = 4;   // exponential exclusion clocks
}  // namespace stream

}  // namespace noiselab

#endif  // NOISELAB_RNG_HPP_
