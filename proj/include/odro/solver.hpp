/*
 * Copyright 2026 The odro authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "odro/types.hpp"

namespace odro::solver {

/// Axis-aligned box {lo <= u <= hi}.
struct Box {
    Vector lo, hi;
    Box(Vector lo_, Vector hi_);
};

/// Probability simplex {u >= 0, sum u = 1}.
struct UnitSimplex {
    int dim{0};
};

using FeasibleSet = std::variant<Box, UnitSimplex>;

int dimension(const FeasibleSet& set);
bool contains(const FeasibleSet& set, const Vector& v, double tol = 0.0);

/// Euclidean projection; simplex case via sort-and-threshold.
Vector project(const FeasibleSet& set, const Vector& v);

/// Floor applied to Lipschitz estimates before inversion into a step size.
inline constexpr double kLipschitzFloor = 1e-6;

struct Momentum {
    double delta_next{0.0};
    double eta{0.0};
};

/**
 * One turn of the momentum recurrence: given (delta_{t-1}, delta_t) returns
 * delta_{t+1} = (1 + sqrt(1 + 4 delta_t^2))/2 and eta_t = (delta_{t-1}-1)/delta_t.
 * The schedule is seeded with delta_{-1} = 1, so the first eta is zero.
 */
Momentum momentum_next(double delta_prev, double delta);

/// delta_0 produced by the recurrence from the seed delta_{-1} = 1.
double initial_delta();

struct SolverState {
    Vector u; // current decision, feasible
    Vector y; // lookahead point (not projected)
    double delta_prev{1.0};
    double delta{0.0};
    std::int64_t t{0};

    static SolverState initial(const Vector& u0);
};

/**
 * One accelerated projected-gradient update:
 *   u+ = Pi(y - step * grad),  y+ = u+ + eta (u+ - u),
 * advancing the momentum pair. Only u is projected; y may leave the set.
 */
SolverState step(const SolverState& state, const Vector& grad_at_y, double step_size,
                 const FeasibleSet& set);

enum class StepRule {
    kInverseLipschitz, // step = 1 / max(lip, floor)
    kMonotone,         // step = min(previous step, mu / max(b, floor))
};

/// Per-step problem handed to the solver: smoothed gradient plus the two
/// constants the step rules need.
struct OnlineProblem {
    std::function<ValueGrad(const Vector&)> value_grad;
    double lip{0.0};      // gradient-Lipschitz estimate
    double smooth_b{0.0}; // smoothing constant b (step bound mu/b)
};

struct StepRecord {
    std::int64_t t{0};
    Vector u;
    double step_size{0.0};
    double eta{0.0};
    double objective{0.0};
};

using AssembleFn = std::function<OnlineProblem(std::int64_t t, const Vector& applied_u)>;
using StepObserver = std::function<void(const StepRecord&, const SolverState&)>;

/**
 * Online loop: for t = 1..horizon asks `assemble` for the current objective
 * (passing the decision applied so far), performs `inner_steps` solver
 * updates, and records the decision. Assembly errors are rethrown with the
 * step index attached. The momentum schedule is never reset.
 */
std::vector<StepRecord> run_online(const AssembleFn& assemble, const FeasibleSet& set,
                                   std::int64_t horizon, StepRule rule, double mu,
                                   const Vector& u0, int inner_steps = 1,
                                   const StepObserver& observer = {});

} // namespace odro::solver
