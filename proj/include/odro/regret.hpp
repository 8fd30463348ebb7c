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

#include <deque>
#include <functional>
#include <optional>
#include <span>

#include "odro/solver.hpp"
#include "odro/types.hpp"

namespace odro::regret {

/**
 * Rank-one storage form V = || delta z1 + (1-delta) z2 + delta z3 ||^2 / (2 eps),
 * evaluated on the stacked error vector z = (z1; z2; z3) of three equal blocks
 * (decision error, previous decision error, optimal-point increment).
 */
double storage_value(const Vector& z, double delta_prev, double eps_prev);

/**
 * Regret-bound assembly 4 W_t/(t+2)^2 + T F_t + a mu + L(u*) eps_hat with
 * F_t = max_k |G*_{k+1} - G*_k| + L_bar taken over the supplied history of
 * optimal values (consecutive differences). Throws on an empty history.
 */
double regret_bound(std::span<const double> optimal_values, double w_t, double a_mu,
                    double l_ustar, double eps_hat, double l_bar, int T, std::int64_t t);

struct MonteCarlo {
    double estimate{0.0};
    double std_error{0.0};
};

/**
 * Paired-sample Monte-Carlo estimate of E[loss(u, x)] - E[loss(u_star, x)]
 * under the sampler's distribution; the same draws are used for both
 * decisions, so the estimate is exactly zero when u == u_star.
 */
MonteCarlo realized_regret(const Vector& u, const Vector& u_star,
                           const std::function<Vector()>& truth_sampler,
                           const std::function<double(const Vector&, const Vector&)>& loss,
                           int n_samples);

struct OracleResult {
    Vector u;
    bool converged{false};
    int iterations{0};
};

/**
 * Offline minimizer of a smooth convex objective over the feasible set:
 * accelerated projected gradient with step 1/lip, run until the fixed-point
 * residual ||u - Pi(u - grad)|| drops below tol. Returns the best iterate
 * with converged=false when the iteration cap is hit.
 */
OracleResult oracle_ustar(const std::function<ValueGrad(const Vector&)>& objective,
                          const solver::FeasibleSet& set, double lip, double tol,
                          int max_iters = 50000);

/// Per-step diagnostic row values produced by the run harness.
struct RegretReport {
    std::int64_t t{0};
    double bound{0.0};
    double rho{0.0};
    double realized{0.0};
    double std_error{0.0};
    double w_t{0.0};
    double f_t{0.0};
    double a_mu{0.0};
    double l_eps_hat{0.0};
};

/// Everything the tracker needs about one decision step.
struct DiagnosticsInput {
    std::int64_t t{0};
    Vector u;            // applied decision
    double eps{0.0};     // step size used by this update
    double delta{0.0};   // momentum scalar current during this update
    double lip{0.0};     // gradient-Lipschitz estimate (for the oracle step)
    double a_mu{0.0};    // smoothing gap a * mu
    double eps_hat{0.0}; // ambiguity radius at the applied decision
    double rho{0.0};
    double l_ustar_scale{1.0}; // L(u*) = scale, or scale * ||u*|| when norm based
    bool l_ustar_norm{false};
    std::function<ValueGrad(const Vector&)> value_grad;  // smoothed objective
    std::function<double(const Vector&)> exact_value;    // non-smooth objective
    std::function<Vector()> sampler;                     // truth distribution
    std::function<double(const Vector&, const Vector&)> loss;
};

/**
 * Accumulates the per-step history (decisions, offline optima, storage
 * values, optimal objective values) over the solver window and assembles the
 * regret bound and its Monte-Carlo counterpart each step. Reports start at
 * the second step; the first only seeds the history.
 */
class RegretTracker {
  public:
    /// t0 is the window horizon, u0 the decision applied before step one.
    RegretTracker(int t0, int n_samples, Vector u0);

    std::optional<RegretReport> update(const DiagnosticsInput& input,
                                       const solver::FeasibleSet& set);

  private:
    template <typename T>
    const T& value_at(const std::deque<T>& d, std::int64_t step) const {
        return d[static_cast<std::size_t>(step - first_step_)];
    }

    int t0_;
    int n_samples_;
    Vector u0_;
    std::int64_t first_step_{1};
    std::deque<Vector> u_, ustar_;
    std::deque<double> eps_, v_, gstar_, subopt_, lbar_;
    double prev_exact_at_decision_{0.0};
};

} // namespace odro::regret
