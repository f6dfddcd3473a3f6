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

#include <functional>
#include <vector>

namespace darksim::detail {

struct SimplexResult {
    std::vector<double> x;
    double value;
    int evaluations;
};

// Minimizes f with GSL's nmsimplex2 until the simplex size drops below size_tol or
// max_evals evaluations have been spent. on_eval sees every evaluated value in order.
SimplexResult simplex_minimize(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                               const std::vector<double>& step, int max_evals, double size_tol,
                               const std::function<void(double)>& on_eval = {});

}  // namespace darksim::detail
