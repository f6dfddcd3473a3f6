// Copyright 2026 The darksim Authors
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

#include <cstddef>
#include <functional>
#include <vector>

#include "darksim/numlin.hpp"

namespace darksim {

// Worker count: DARKSIM_THREADS if set to a positive integer, else hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n); each index runs exactly once. Exceptions are rethrown
// (the one from the lowest failing index).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Pairwise sum in index order; the result does not depend on scheduling.
Op pairwise_sum(const std::vector<Op>& terms);
double pairwise_sum(const std::vector<double>& terms);

}  // namespace darksim
