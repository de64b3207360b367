// Copyright (c) the erwsim authors
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

namespace erw {

inline constexpr uint64_t kDefaultSeed = 0x5eedf00dcafeULL;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Philox 4x32-10 (Salmon et al., SC'11).  Counter-based: every block is a
// pure function of (counter, key), so a draw can be addressed by
// (seed, replica, site, lane, index) and materialized in any order without
// touching shared state.
struct PhiloxBlock {
  uint32_t v[4];
};

inline PhiloxBlock philox4x32(const uint32_t ctr[4], const uint32_t key[2]) {
  constexpr uint32_t kMulA = 0xD2511F53u;
  constexpr uint32_t kMulB = 0xCD9E8D57u;
  constexpr uint32_t kWeylA = 0x9E3779B9u;
  constexpr uint32_t kWeylB = 0xBB67AE85u;
  uint32_t x0 = ctr[0], x1 = ctr[1], x2 = ctr[2], x3 = ctr[3];
  uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kWeylA;
      k1 += kWeylB;
    }
    const uint64_t p0 = static_cast<uint64_t>(kMulA) * x0;
    const uint64_t p1 = static_cast<uint64_t>(kMulB) * x2;
    const uint32_t y0 = static_cast<uint32_t>(p1 >> 32) ^ x1 ^ k0;
    const uint32_t y1 = static_cast<uint32_t>(p1);
    const uint32_t y2 = static_cast<uint32_t>(p0 >> 32) ^ x3 ^ k1;
    const uint32_t y3 = static_cast<uint32_t>(p0);
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
  }
  return PhiloxBlock{{x0, x1, x2, x3}};
}

// Identifies one replica's random stream.  All draws of a replica are keyed
// by the same 64-bit stream word; the counter carries (site, lane, index).
struct SeedKey {
  uint64_t master_seed = kDefaultSeed;
  uint64_t replica = 0;

  uint64_t stream_word() const {
    return splitmix64(splitmix64(master_seed) + replica);
  }
};

inline uint64_t zigzag64(int64_t v) {
  return (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63);
}

inline double u01_from_bits(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

// Uniform in [0,1) addressed by (stream, site, lane, index).  Lane 0 carries
// the base Bernoulli cookie draws; lanes >= 1 carry per-stage coupling draws.
// Sites are bounded by the walk horizon, well inside 32 bits after zigzag.
inline double keyed_uniform(uint64_t stream_word, int64_t site, uint32_t lane,
                            uint64_t index) {
  const uint32_t ctr[4] = {static_cast<uint32_t>(index),
                           static_cast<uint32_t>(index >> 32),
                           static_cast<uint32_t>(zigzag64(site)), lane};
  const uint32_t key[2] = {static_cast<uint32_t>(stream_word),
                           static_cast<uint32_t>(stream_word >> 32)};
  const PhiloxBlock b = philox4x32(ctr, key);
  return u01_from_bits(static_cast<uint64_t>(b.v[0]) |
                       (static_cast<uint64_t>(b.v[1]) << 32));
}

inline double keyed_uniform(const SeedKey& key, int64_t site, uint32_t lane,
                            uint64_t index) {
  return keyed_uniform(key.stream_word(), site, lane, index);
}

// Sequential counter RNG for draws that are not tied to a site (bootstrap
// resampling, shuffles).  Deterministic given the seed.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) {
    const uint64_t w = splitmix64(seed);
    key_[0] = static_cast<uint32_t>(w);
    key_[1] = static_cast<uint32_t>(w >> 32);
  }

  uint64_t next_u64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const uint32_t ctr[4] = {static_cast<uint32_t>(counter_),
                             static_cast<uint32_t>(counter_ >> 32), 0,
                             0xB007B007u};
    ++counter_;
    const PhiloxBlock b = philox4x32(ctr, key_);
    spare_ = static_cast<uint64_t>(b.v[2]) | (static_cast<uint64_t>(b.v[3]) << 32);
    have_spare_ = true;
    return static_cast<uint64_t>(b.v[0]) | (static_cast<uint64_t>(b.v[1]) << 32);
  }

  double uniform() { return u01_from_bits(next_u64()); }

  // index in [0, n), n > 0
  uint64_t uniform_index(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  uint32_t key_[2];
  uint64_t counter_ = 0;
  uint64_t spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace erw
