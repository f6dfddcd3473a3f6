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

#include "simplex.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>

namespace darksim::detail {

namespace {

struct Ctx {
    const std::function<double(const std::vector<double>&)>* f = nullptr;
    const std::function<void(double)>* on_eval = nullptr;
    int budget = 0;
    int used = 0;
    std::vector<double> best_x;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> scratch;
};

double trampoline(const gsl_vector* v, void* params) {
    auto* c = static_cast<Ctx*>(params);
    if (c->used >= c->budget) return std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < v->size; ++i) c->scratch[i] = gsl_vector_get(v, i);
    const double val = (*c->f)(c->scratch);
    ++c->used;
    if (val < c->best) {
        c->best = val;
        c->best_x = c->scratch;
    }
    if (*c->on_eval) (*c->on_eval)(val);
    return val;
}

struct HandlerGuard {
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    ~HandlerGuard() { gsl_set_error_handler(old); }
};

}  // namespace

SimplexResult simplex_minimize(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                               const std::vector<double>& step, int max_evals, double size_tol,
                               const std::function<void(double)>& on_eval) {
    HandlerGuard guard;
    const std::size_t n = x0.size();
    Ctx ctx;
    ctx.f = &f;
    ctx.on_eval = &on_eval;
    ctx.budget = max_evals;
    ctx.scratch.resize(n);
    ctx.best_x = x0;

    gsl_multimin_function fn{&trampoline, n, &ctx};
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), &gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), &gsl_vector_free);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x.get(), i, x0[i]);
        gsl_vector_set(ss.get(), i, step[i]);
    }
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);

    if (max_evals > 0 && gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get()) == GSL_SUCCESS) {
        while (ctx.used < ctx.budget) {
            if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
            if (gsl_multimin_fminimizer_size(s.get()) < size_tol) break;
        }
    }
    return {ctx.best_x, ctx.best, ctx.used};
}

}  // namespace darksim::detail
