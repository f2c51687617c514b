// Copyright 2026 The revprice Authors
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

#include <concepts>
#include <cstdint>
#include <limits>
#include <random>

namespace revprice {

/// Engine used for every realization stream. The standard fixes its output
/// sequence, so a given seed reproduces bit-identical draws on any platform.
using RandomStream = std::mt19937_64;

/// 64-bit engines whose output covers the full [0, 2^64) range.
template <class G>
concept FullRangeEngine =
    std::uniform_random_bit_generator<G> &&
    G::min() == 0 &&
    G::max() == std::numeric_limits<std::uint64_t>::max();

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for the stream of one (slot, realization) cell. Depends only on its
/// arguments, so results do not depend on the order cells are evaluated in.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t slot,
                                    std::uint64_t realization) noexcept {
  return mix64(mix64(mix64(master) ^ slot) ^ realization);
}

inline RandomStream make_stream(std::uint64_t seed) { return RandomStream{seed}; }

/// Uniform on [0, 1) with 53 random mantissa bits.
///
/// std::uniform_real_distribution is implementation-defined, which would break
/// cross-platform reproducibility of the CSV tables.
template <FullRangeEngine G>
double uniform01(G& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on [lo, hi]. Returns lo exactly when lo == hi.
template <FullRangeEngine G>
double uniform_between(G& rng, double lo, double hi) {
  const double u = uniform01(rng);
  const double v = lo + u * (hi - lo);
  return v > hi ? hi : v;
}

}  // namespace revprice
