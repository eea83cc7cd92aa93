// Copyright 2026 The tailsel Authors
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

#ifndef TAILSEL_RNG_HPP_
#define TAILSEL_RNG_HPP_

#include <array>
#include <cstdint>
#include <string_view>

namespace tailsel {

// Counter-based RNG (Philox 4x32-10).  A draw is a pure function of
// (key, counter), so independent work items can be assigned disjoint
// counters and evaluated in any order, on any number of threads, with
// identical results.
class CounterRng {
 public:
  // Returns two 64-bit words for counter (a, b) under the given key.
  static std::array<std::uint64_t, 2> Draw(std::uint64_t key, std::uint64_t a,
                                           std::uint64_t b) {
    std::uint32_t counter[4] = {
        static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::uint32_t k[2] = {static_cast<std::uint32_t>(key),
                          static_cast<std::uint32_t>(key >> 32)};
    for (int round = 0; round < 10; ++round) {
      OneRound(counter, k);
      k[0] += kW32A;
      k[1] += kW32B;
    }
    return {Pack(counter[0], counter[1]), Pack(counter[2], counter[3])};
  }

 private:
  static constexpr std::uint32_t kW32A = 0x9E3779B9;
  static constexpr std::uint32_t kW32B = 0xBB67AE85;
  static constexpr std::uint32_t kM4x32A = 0xD2511F53;
  static constexpr std::uint32_t kM4x32B = 0xCD9E8D57;

  static void MulHiLo(std::uint32_t x, std::uint32_t y, std::uint32_t* lo,
                      std::uint32_t* hi) {
    std::uint64_t product = static_cast<std::uint64_t>(x) * y;
    *lo = static_cast<std::uint32_t>(product);
    *hi = static_cast<std::uint32_t>(product >> 32);
  }

  static void OneRound(std::uint32_t counter[4], const std::uint32_t key[2]) {
    std::uint32_t lo0, hi0, lo1, hi1;
    MulHiLo(kM4x32A, counter[0], &lo0, &hi0);
    MulHiLo(kM4x32B, counter[2], &lo1, &hi1);
    std::uint32_t out[4];
    out[0] = hi1 ^ counter[1] ^ key[0];
    out[1] = lo1;
    out[2] = hi0 ^ counter[3] ^ key[1];
    out[3] = lo0;
    counter[0] = out[0];
    counter[1] = out[1];
    counter[2] = out[2];
    counter[3] = out[3];
  }

  static std::uint64_t Pack(std::uint32_t lo, std::uint32_t hi) {
    return static_cast<std::uint64_t>(hi) << 32 | lo;
  }
};

// Maps a 64-bit word to [0, 1) with 53 bits of precision.
inline double ToUnit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// FNV-1a over (8-byte little-endian seed) ++ UTF-8 text.  This exact
// definition is part of the downsampling output contract: the realized
// count of a sentence depends only on (f1, text, seed), so reruns and
// resharded runs reproduce the same corpus byte for byte.
inline std::uint64_t Fnv1a64(std::uint64_t seed, std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  constexpr std::uint64_t kPrime = 1099511628211ULL;
  for (int i = 0; i < 8; ++i) {
    h ^= (seed >> (8 * i)) & 0xFF;
    h *= kPrime;
  }
  for (unsigned char c : text) {
    h ^= c;
    h *= kPrime;
  }
  return h;
}

// H / 2^64 as a binary64 value.
inline double HashUnit(std::uint64_t seed, std::string_view text) {
  return static_cast<double>(Fnv1a64(seed, text)) * 0x1.0p-64;
}

}  // namespace tailsel

#endif  // TAILSEL_RNG_HPP_
