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

#include "odro/regret.hpp"

#include <algorithm>
#include <cmath>

namespace odro::regret {

double storage_value(const Vector& z, double delta_prev, double eps_prev) {
    if (!(eps_prev > 0.0)) throw InvalidInput("storage_value: step size must be positive");
    if (z.size() % 3 != 0) throw InvalidInput("storage_value: z must stack three equal blocks");
    const Eigen::Index m = z.size() / 3;
    const Vector combo = delta_prev * z.segment(0, m) + (1.0 - delta_prev) * z.segment(m, m) +
                         delta_prev * z.segment(2 * m, m);
    return combo.squaredNorm() / (2.0 * eps_prev);
}

double regret_bound(std::span<const double> optimal_values, double w_t, double a_mu,
                    double l_ustar, double eps_hat, double l_bar, int T, std::int64_t t) {
    if (optimal_values.empty()) throw InvalidInput("regret_bound: empty optimal-value history");
    double variation = 0.0;
    for (std::size_t k = 0; k + 1 < optimal_values.size(); ++k)
        variation = std::max(variation, std::abs(optimal_values[k + 1] - optimal_values[k]));
    const double f_t = variation + l_bar;
    const double horizon_scale = static_cast<double>(t + 2);
    return 4.0 * w_t / (horizon_scale * horizon_scale) + static_cast<double>(T) * f_t + a_mu +
           l_ustar * eps_hat;
}

MonteCarlo realized_regret(const Vector& u, const Vector& u_star,
                           const std::function<Vector()>& truth_sampler,
                           const std::function<double(const Vector&, const Vector&)>& loss,
                           int n_samples) {
    if (n_samples < 1) throw InvalidInput("realized_regret: n_samples must be positive");
    double mean = 0.0;
    double m2 = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        const Vector x = truth_sampler();
        const double diff = loss(u, x) - loss(u_star, x);
        const double delta = diff - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (diff - mean);
    }
    MonteCarlo out;
    out.estimate = mean;
    out.std_error = n_samples > 1
                        ? std::sqrt(m2 / (static_cast<double>(n_samples - 1) *
                                          static_cast<double>(n_samples)))
                        : 0.0;
    return out;
}

OracleResult oracle_ustar(const std::function<ValueGrad(const Vector&)>& objective,
                          const solver::FeasibleSet& set, double lip, double tol, int max_iters) {
    if (!(tol > 0.0)) throw InvalidInput("oracle_ustar: tol must be positive");
    const double step = 1.0 / std::max(lip, solver::kLipschitzFloor);

    Vector u = project(set, Vector::Zero(dimension(set)));
    Vector y = u;
    double delta_prev = 1.0;
    double delta = solver::initial_delta();
    double best_value = objective(u).value;
    Vector best_u = u;

    OracleResult out;
    for (int it = 0; it < max_iters; ++it) {
        const ValueGrad at_u = objective(u);
        if (at_u.value < best_value) {
            best_value = at_u.value;
            best_u = u;
        }
        const double residual = (u - project(set, u - at_u.grad)).norm();
        if (residual <= tol) {
            out.u = u;
            out.converged = true;
            out.iterations = it;
            return out;
        }

        const Vector u_next = project(set, y - step * objective(y).grad);
        const auto momentum = solver::momentum_next(delta_prev, delta);
        Vector y_next = u_next + momentum.eta * (u_next - u);
        // function-value restart keeps the offline oracle monotone enough
        if (objective(u_next).value > at_u.value) {
            y_next = u_next;
            delta_prev = 1.0;
            delta = solver::initial_delta();
        } else {
            delta_prev = delta;
            delta = momentum.delta_next;
        }
        u = u_next;
        y = y_next;
    }
    out.u = objective(u).value <= best_value ? u : best_u;
    out.converged = false;
    out.iterations = max_iters;
    return out;
}

RegretTracker::RegretTracker(int t0, int n_samples, Vector u0)
    : t0_(t0), n_samples_(n_samples), u0_(std::move(u0)) {}

std::optional<RegretReport> RegretTracker::update(const DiagnosticsInput& in,
                                                  const solver::FeasibleSet& set) {
    const auto oracle = oracle_ustar(in.value_grad, set, in.lip, 1e-7, 5000);
    const Vector& ustar = oracle.u;
    const double gmu_star = in.value_grad(ustar).value;
    const double gstar = in.exact_value(ustar);
    const double subopt = std::max(0.0, in.value_grad(in.u).value - gmu_star);

    // time-variation estimate: consecutive objectives at the same point
    double lbar = 0.0;
    if (!u_.empty()) lbar = std::abs(in.exact_value(u_.back()) - prev_exact_at_decision_);
    prev_exact_at_decision_ = in.exact_value(in.u);

    // storage value of this step, built from this update's (delta, eps);
    // before any history exists the previous optimum defaults to the current
    // one, which zeroes the optimal-increment block
    const Vector& u_prev = u_.empty() ? u0_ : u_.back();
    const Vector& ustar_prev = ustar_.empty() ? ustar : ustar_.back();
    Vector z(3 * in.u.size());
    z << in.u - ustar, u_prev - ustar_prev, ustar - ustar_prev;
    const double v_t = storage_value(z, in.delta, in.eps);

    std::optional<RegretReport> report;
    if (!u_.empty()) {
        const int window = static_cast<int>(std::min<std::int64_t>(in.t - 1, t0_));
        const std::int64_t kmin = in.t - window;
        if (kmin >= first_step_) {
            // accumulated storage: boundary terms plus the step-ratio sum,
            // each summand nonnegative under the monotone step rule
            double w_t = value_at(v_, kmin) - v_t;
            for (std::int64_t k = kmin; k <= in.t - 1; ++k) {
                const double eps_k = value_at(eps_, k);
                const double eps_next = k + 1 <= in.t - 1 ? value_at(eps_, k + 1) : in.eps;
                w_t -= (1.0 - eps_k / eps_next) * value_at(v_, k);
            }
            const double head =
                static_cast<double>(in.t - window - 1) + solver::initial_delta();
            w_t += head * head * value_at(subopt_, kmin);

            std::vector<double> gstar_span;
            double lbar_max = lbar;
            for (std::int64_t k = kmin; k <= in.t - 1; ++k) {
                gstar_span.push_back(value_at(gstar_, k));
                lbar_max = std::max(lbar_max, value_at(lbar_, k));
            }
            gstar_span.push_back(gstar);

            const double l_ustar = in.l_ustar_scale * (in.l_ustar_norm ? ustar.norm() : 1.0);
            RegretReport rep;
            rep.t = in.t;
            rep.w_t = w_t;
            rep.a_mu = in.a_mu;
            rep.l_eps_hat = l_ustar * in.eps_hat;
            rep.rho = in.rho;
            rep.bound = regret_bound(gstar_span, w_t, in.a_mu, l_ustar, in.eps_hat, lbar_max,
                                     window, in.t);
            double variation = 0.0;
            for (std::size_t k = 0; k + 1 < gstar_span.size(); ++k)
                variation = std::max(variation, std::abs(gstar_span[k + 1] - gstar_span[k]));
            rep.f_t = variation + lbar_max;
            const auto mc = realized_regret(in.u, ustar, in.sampler, in.loss, n_samples_);
            rep.realized = mc.estimate;
            rep.std_error = mc.std_error;
            report = rep;
        }
    }

    u_.push_back(in.u);
    ustar_.push_back(ustar);
    eps_.push_back(in.eps);
    v_.push_back(v_t);
    gstar_.push_back(gstar);
    subopt_.push_back(subopt);
    lbar_.push_back(lbar);
    if (static_cast<int>(u_.size()) > t0_ + 2) {
        u_.pop_front();
        ustar_.pop_front();
        eps_.pop_front();
        v_.pop_front();
        gstar_.pop_front();
        subopt_.pop_front();
        lbar_.pop_front();
        ++first_step_;
    }
    return report;
}

} // namespace odro::regret
