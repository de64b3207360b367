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

// Internal: O(1) site-indexed storage over Z, growing on demand.

#pragma once

#include <cstdint>
#include <vector>

namespace erw {

template <typename T>
class TwoSided {
 public:
  // Reference to the slot at site x, default-constructing missing slots.
  T& at(int64_t x) {
    if (x >= 0) {
      if (static_cast<size_t>(x) >= pos_.size()) pos_.resize(static_cast<size_t>(x) + 1);
      return pos_[static_cast<size_t>(x)];
    }
    const size_t idx = static_cast<size_t>(-x - 1);
    if (idx >= neg_.size()) neg_.resize(idx + 1);
    return neg_[idx];
  }

  // Value lookup without growth.
  T get(int64_t x) const {
    if (x >= 0) {
      return static_cast<size_t>(x) < pos_.size() ? pos_[static_cast<size_t>(x)] : T{};
    }
    const size_t idx = static_cast<size_t>(-x - 1);
    return idx < neg_.size() ? neg_[idx] : T{};
  }

  bool has(int64_t x) const {
    if (x >= 0) return static_cast<size_t>(x) < pos_.size();
    return static_cast<size_t>(-x - 1) < neg_.size();
  }

  // Pointer to the slot, or nullptr when it was never created.
  const T* ptr(int64_t x) const {
    if (x >= 0) {
      return static_cast<size_t>(x) < pos_.size() ? &pos_[static_cast<size_t>(x)]
                                                  : nullptr;
    }
    const size_t idx = static_cast<size_t>(-x - 1);
    return idx < neg_.size() ? &neg_[idx] : nullptr;
  }

  int64_t min_site() const { return -static_cast<int64_t>(neg_.size()); }
  int64_t max_site() const { return static_cast<int64_t>(pos_.size()) - 1; }

 private:
  std::vector<T> pos_;  // sites 0, 1, 2, ...
  std::vector<T> neg_;  // sites -1, -2, ...
};

}  // namespace erw
