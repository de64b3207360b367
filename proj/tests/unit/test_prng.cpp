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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "erw/prng.hpp"

using namespace erw;

TEST_CASE("philox4x32-10 matches the reference known-answer vectors") {
  {
    const uint32_t ctr[4] = {0, 0, 0, 0};
    const uint32_t key[2] = {0, 0};
    const PhiloxBlock b = philox4x32(ctr, key);
    CHECK(b.v[0] == 0x6627e8d5u);
    CHECK(b.v[1] == 0xe169c58du);
    CHECK(b.v[2] == 0xbc57ac4cu);
    CHECK(b.v[3] == 0x9b00dbd8u);
  }
  {
    const uint32_t ctr[4] = {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
    const uint32_t key[2] = {0xffffffffu, 0xffffffffu};
    const PhiloxBlock b = philox4x32(ctr, key);
    CHECK(b.v[0] == 0x408f276du);
    CHECK(b.v[1] == 0x41c83b0eu);
    CHECK(b.v[2] == 0xa20bc7c6u);
    CHECK(b.v[3] == 0x6d5451fdu);
  }
  {
    const uint32_t ctr[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u};
    const uint32_t key[2] = {0xa4093822u, 0x299f31d0u};
    const PhiloxBlock b = philox4x32(ctr, key);
    CHECK(b.v[0] == 0xd16cfe09u);
    CHECK(b.v[1] == 0x94fdccebu);
    CHECK(b.v[2] == 0x5001e420u);
    CHECK(b.v[3] == 0x24126ea1u);
  }
}

TEST_CASE("keyed uniforms are deterministic and order independent") {
  const SeedKey key{123, 7};
  const double a = keyed_uniform(key, -5, 2, 17);
  const double b = keyed_uniform(key, 8, 0, 1);
  CHECK(keyed_uniform(key, -5, 2, 17) == a);
  CHECK(keyed_uniform(key, 8, 0, 1) == b);
  CHECK(a != b);

  // distinct replicas decorrelate whole streams
  const SeedKey other{123, 8};
  CHECK(keyed_uniform(other, -5, 2, 17) != a);
}

TEST_CASE("keyed uniforms lie in [0,1) and look uniform") {
  const SeedKey key{2024, 0};
  double sum = 0.0;
  const int n = 100000;
  for (int i = 1; i <= n; ++i) {
    const double u = keyed_uniform(key, 0, 0, static_cast<uint64_t>(i));
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  const double mean = sum / n;
  // 5 sigma of a mean of n uniforms
  CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("counter rng is reproducible and index bounds hold") {
  CounterRng a(99), b(99);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  CounterRng c(1);
  std::set<uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t idx = c.uniform_index(7);
    CHECK(idx < 7);
    seen.insert(idx);
  }
  CHECK(seen.size() == 7);
}
