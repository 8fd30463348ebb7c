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

#include "odro/smoothing.hpp"

#include <algorithm>
#include <cmath>

namespace odro::smoothing {

namespace {

void require_positive_mu(double mu) {
    if (!(mu > 0.0)) throw InvalidInput("smoothing: mu must be positive");
}

} // namespace

RadialEnvelope moreau_l2_radial(double norm, double mu) {
    require_positive_mu(mu);
    if (norm <= mu) return {norm * norm / (2.0 * mu), 1.0 / mu};
    return {norm - mu / 2.0, 1.0 / norm};
}

ValueGrad moreau_l2(const Vector& x, double mu) {
    const auto radial = moreau_l2_radial(x.norm(), mu);
    return {radial.value, radial.slope * x};
}

ScalarValueGrad moreau_l2_scalar(double x, double mu) {
    require_positive_mu(mu);
    const double a = std::abs(x);
    if (a <= mu) return {x * x / (2.0 * mu), x / mu};
    return {a - mu / 2.0, x > 0.0 ? 1.0 : -1.0};
}

ValueGrad moreau_l1(const Vector& u, double mu) {
    require_positive_mu(mu);
    ValueGrad out;
    out.grad.resize(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const auto [v, g] = moreau_l2_scalar(u[i], mu);
        out.value += v;
        out.grad[i] = g;
    }
    return out;
}

ScalarValueGrad smoothed_hinge(double s, double mu) {
    require_positive_mu(mu);
    if (s >= 1.0) return {0.0, 0.0};
    // at the 1-mu boundary the quadratic branch is used; values and
    // derivatives of the two branches coincide there
    if (s >= 1.0 - mu) {
        const double r = 1.0 - s;
        return {r * r / (2.0 * mu), -r / mu};
    }
    return {1.0 - s - mu / 2.0, -1.0};
}

namespace {

// Golden-section refinement of a unimodal function on [lo, hi].
double golden_refine(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::min(fc, fd);
}

double line_oracle(const std::function<double(double)>& objective, double lo, double hi,
                   double grid_resolution) {
    const int coarse = 512;
    const double step = (hi - lo) / coarse;
    double best = objective(lo);
    double best_z = lo;
    for (int i = 1; i <= coarse; ++i) {
        const double z = lo + i * step;
        const double v = objective(z);
        if (v < best) {
            best = v;
            best_z = z;
        }
    }
    const double refined = golden_refine(objective, std::max(lo, best_z - step),
                                         std::min(hi, best_z + step), grid_resolution / 10.0);
    return std::min(best, refined);
}

} // namespace

double prox_oracle(const std::function<double(double)>& F, double x, double mu,
                   double grid_resolution) {
    require_positive_mu(mu);
    const auto objective = [&](double z) { return F(z) + (z - x) * (z - x) / (2.0 * mu); };
    return line_oracle(objective, x - 3.0 * mu, x + 3.0 * mu, grid_resolution);
}

double prox_oracle_radial(const std::function<double(const Vector&)>& F, const Vector& x,
                          double mu, double grid_resolution) {
    require_positive_mu(mu);
    const double norm = x.norm();
    if (norm == 0.0) {
        // minimizer of a radially symmetric convex function sits at the origin
        return F(x);
    }
    const Vector dir = x / norm;
    const auto objective = [&](double s) {
        const Vector z = s * dir;
        return F(z) + (z - x).squaredNorm() / (2.0 * mu);
    };
    const double span = 3.0 * mu * std::sqrt(static_cast<double>(x.size()));
    return line_oracle(objective, norm - span, norm + span, grid_resolution);
}

} // namespace odro::smoothing
