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

#include "odro/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace odro::solver {

Box::Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw InvalidInput("box: bound dimensions differ");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw InvalidInput("box: lo exceeds hi at component " +
                                              std::to_string(i));
}

int dimension(const FeasibleSet& set) {
    if (const auto* box = std::get_if<Box>(&set)) return static_cast<int>(box->lo.size());
    return std::get<UnitSimplex>(set).dim;
}

bool contains(const FeasibleSet& set, const Vector& v, double tol) {
    if (const auto* box = std::get_if<Box>(&set)) {
        if (v.size() != box->lo.size()) return false;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (v[i] < box->lo[i] - tol || v[i] > box->hi[i] + tol) return false;
        return true;
    }
    const auto& simplex = std::get<UnitSimplex>(set);
    if (v.size() != simplex.dim) return false;
    if (v.minCoeff() < -tol) return false;
    return std::abs(v.sum() - 1.0) <= std::max(tol, 1e-12);
}

Vector project(const FeasibleSet& set, const Vector& v) {
    if (const auto* box = std::get_if<Box>(&set)) {
        if (v.size() != box->lo.size()) throw InvalidInput("project: dimension mismatch");
        return v.cwiseMax(box->lo).cwiseMin(box->hi);
    }
    const auto& simplex = std::get<UnitSimplex>(set);
    if (v.size() != simplex.dim) throw InvalidInput("project: dimension mismatch");

    // sort-and-threshold: tau with sum(max(v - tau, 0)) = 1
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double running = 0.0;
    double tau = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        running += sorted[j];
        const double candidate = (running - 1.0) / static_cast<double>(j + 1);
        if (j + 1 == sorted.size() || sorted[j + 1] <= candidate) {
            tau = candidate;
            break;
        }
    }
    return (v.array() - tau).max(0.0).matrix();
}

Momentum momentum_next(double delta_prev, double delta) {
    if (!(delta >= 1.0)) throw InvalidInput("momentum_next: delta must be at least 1");
    Momentum out;
    out.delta_next = (1.0 + std::sqrt(1.0 + 4.0 * delta * delta)) / 2.0;
    out.eta = (delta_prev - 1.0) / delta;
    return out;
}

double initial_delta() { return (1.0 + std::sqrt(5.0)) / 2.0; }

SolverState SolverState::initial(const Vector& u0) {
    SolverState state;
    state.u = u0;
    state.y = u0;
    state.delta_prev = 1.0;
    state.delta = initial_delta();
    state.t = 0;
    return state;
}

SolverState step(const SolverState& state, const Vector& grad_at_y, double step_size,
                 const FeasibleSet& set) {
    if (!(step_size > 0.0)) throw InvalidInput("step: step size must be positive");
    if (!grad_at_y.allFinite()) throw InvalidInput("step: gradient is not finite");

    SolverState next;
    next.u = project(set, state.y - step_size * grad_at_y);
    const Momentum momentum = momentum_next(state.delta_prev, state.delta);
    next.y = next.u + momentum.eta * (next.u - state.u);
    next.delta_prev = state.delta;
    next.delta = momentum.delta_next;
    next.t = state.t + 1;
    return next;
}

std::vector<StepRecord> run_online(const AssembleFn& assemble, const FeasibleSet& set,
                                   std::int64_t horizon, StepRule rule, double mu,
                                   const Vector& u0, int inner_steps,
                                   const StepObserver& observer) {
    if (horizon < 0) throw InvalidInput("run_online: horizon must be nonnegative");
    if (inner_steps < 1) throw InvalidInput("run_online: inner_steps must be at least 1");

    SolverState state = SolverState::initial(project(set, u0));
    std::vector<StepRecord> records;
    records.reserve(static_cast<std::size_t>(horizon));

    double step_size = std::numeric_limits<double>::infinity();
    for (std::int64_t t = 1; t <= horizon; ++t) {
        OnlineProblem problem;
        try {
            problem = assemble(t, state.u);
        } catch (const std::exception& e) {
            throw InvalidInput("run_online: assembly failed at step " + std::to_string(t) +
                               ": " + e.what());
        }

        switch (rule) {
        case StepRule::kInverseLipschitz:
            step_size = 1.0 / std::max(problem.lip, kLipschitzFloor);
            break;
        case StepRule::kMonotone:
            step_size = std::min(step_size, mu / std::max(problem.smooth_b, kLipschitzFloor));
            break;
        }

        double eta = 0.0;
        for (int inner = 0; inner < inner_steps; ++inner) {
            eta = momentum_next(state.delta_prev, state.delta).eta;
            state = step(state, problem.value_grad(state.y).grad, step_size, set);
        }

        StepRecord record;
        record.t = t;
        record.u = state.u;
        record.step_size = step_size;
        record.eta = eta;
        record.objective = problem.value_grad(state.u).value;
        if (observer) observer(record, state);
        records.push_back(std::move(record));
    }
    return records;
}

} // namespace odro::solver
