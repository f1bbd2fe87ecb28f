// Copyright 2026 The dvae-mesh Authors.
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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dvae {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a path of keys,
/// e.g. (seed, epoch, sample). Results do not depend on evaluation order.
inline std::uint64_t substream_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(seed);
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng substream(std::uint64_t seed,
                     std::initializer_list<std::uint64_t> keys) {
  return Rng(substream_seed(seed, keys));
}

// Stream tags, so different consumers of one master seed never collide.
namespace stream {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kShuffle = 2;
inline constexpr std::uint64_t kEpsilon = 3;
inline constexpr std::uint64_t kAugment = 4;
inline constexpr std::uint64_t kFolds = 5;
inline constexpr std::uint64_t kGenerator = 6;
inline constexpr std::uint64_t kPerturb = 7;
inline constexpr std::uint64_t kBench = 8;
}  // namespace stream

}  // namespace dvae
