// Copyright 2026 The NST Toolkit Authors.
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

#ifndef NST_RANDOM_H_
#define NST_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace nst {

using Rng = std::mt19937_64;

// 64-bit FNV-1a.
inline std::uint64_t HashString(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// splitmix64 finalizer.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for a named stream: mix(seed ^ mix(fnv1a(label))).
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label) {
  return MixSeed(seed ^ MixSeed(HashString(label)));
}

inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index,
                                std::string_view label) {
  return DeriveSeed(MixSeed(seed ^ MixSeed(index)), label);
}

// Uniform integer in [lo, hi], both inclusive.
template <typename Int>
Int UniformInt(Rng& rng, Int lo, Int hi) {
  return std::uniform_int_distribution<Int>(lo, hi)(rng);
}

}  // namespace nst

#endif  // NST_RANDOM_H_
