// Copyright 2026 The weakval developers.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based generator in the SplitMix64 family (Steele, Lea & Flood,
// "Fast splittable pseudorandom number generators", OOPSLA 2014; finalizer
// constants due to Vigna). Every output is a pure function of a (key,
// counter) pair, so disjoint counter ranges can be evaluated in any order,
// on any number of threads, and still reproduce bit-identical streams.

#pragma once

#include <cmath>
#include <cstdint>

namespace weakval::rng {

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// 64 random bits for one (key, counter) pair.
inline std::uint64_t bits(std::uint64_t key, std::uint64_t counter) noexcept {
    return mix64(key + (counter + 1) * golden_gamma);
}

/// Key of an independent substream, e.g. one per Monte Carlo sample index.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64((stream + 1) * golden_gamma));
}

/// Uniform double in [0, 1) with 53 random mantissa bits.
inline double uniform01(std::uint64_t key, std::uint64_t counter) noexcept {
    return static_cast<double>(bits(key, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal deviate via Box-Muller (cosine branch); consumes the
/// counters `counter` and `counter + 1`.
inline double normal(std::uint64_t key, std::uint64_t counter) noexcept {
    // First uniform is mapped to (0, 1] so the logarithm stays finite.
    const double u1 = static_cast<double>((bits(key, counter) >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01(key, counter + 1);
    constexpr double two_pi = 6.28318530717958647692528676655900577;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace weakval::rng
