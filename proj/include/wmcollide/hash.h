//
// Copyright 2026 The wmcollide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef WMCOLLIDE_HASH_H_
#define WMCOLLIDE_HASH_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace wmcollide {

// The one mixing function behind every pseudorandom choice in the library.
// It is the SplitMix64 output function:
//
//   z  = x + 0x9E3779B97F4A7C15
//   z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// All arithmetic is modulo 2^64, so results are identical on every platform.
constexpr uint64_t Mix64(uint64_t x) {
  uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Folds words left to right: h = Mix64(seed); h = Mix64(h ^ w) for each w.
constexpr uint64_t HashWords(uint64_t seed, std::initializer_list<uint64_t> words) {
  uint64_t h = Mix64(seed);
  for (uint64_t w : words) h = Mix64(h ^ w);
  return h;
}

// 64-bit FNV-1a over the bytes of s; turns scheme ids into hash words.
constexpr uint64_t HashString(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Top 53 bits mapped onto [0, 1).
constexpr double UnitInterval(uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Standard normal deviate from two hash words (Box-Muller, cosine branch).
inline double GaussianFromHash(uint64_t h1, uint64_t h2) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double u1 = 1.0 - UnitInterval(h1);  // (0, 1], log-safe
  const double u2 = UnitInterval(h2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Deterministic stream of 64-bit words (the SplitMix64 generator). Used where
// a sequence of draws is derived from a single hashed seed.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}

  constexpr uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

}  // namespace wmcollide

#endif  // WMCOLLIDE_HASH_H_
