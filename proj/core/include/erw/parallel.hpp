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
#include <functional>

namespace erw {

// Worker count: ERW_THREADS sets the pool size, default hardware concurrency.
int worker_count();

// Runs fn(replica) for replica in [0, count) over the worker pool.  Replicas
// draw from disjoint keyed streams and must write only to their own result
// slots; aggregation afterwards runs in replica-index order, so results do
// not depend on the thread count.  The first exception thrown by any replica
// is rethrown after the pool drains.
void parallel_replicas(int64_t count, const std::function<void(int64_t)>& fn);

}  // namespace erw
