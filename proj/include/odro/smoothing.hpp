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

#include "odro/types.hpp"

namespace odro::smoothing {

/**
 * Smoothing constants (a, b) of a smoothed function F_mu: the approximation
 * gap is bounded by a*mu and the gradient of F_mu is (b/mu)-Lipschitz.
 */
struct SmoothingParams {
    double mu{0.0};
    double a{0.0};
    double b{0.0};
};

/**
 * Moreau envelope of the Euclidean norm:
 *   ||x||^2 / (2 mu)  when ||x|| <= mu,   ||x|| - mu/2  otherwise,
 * with gradient x/mu resp. x/||x||. Smoothing constants (1/2, 1).
 */
ValueGrad moreau_l2(const Vector& x, double mu);

/// Radial form of the same envelope: value at a given norm and the scalar
/// slope such that the gradient is slope * x. Lets window loops accumulate
/// without per-piece temporaries.
struct RadialEnvelope {
    double value{0.0};
    double slope{0.0};
};
RadialEnvelope moreau_l2_radial(double norm, double mu);

/// Scalar Huber envelope of |x|; building block of the l1 envelope.
ScalarValueGrad moreau_l2_scalar(double x, double mu);

/// Componentwise Huber envelope of the l1 norm. Smoothing constants (m/2, 1).
ValueGrad moreau_l1(const Vector& u, double mu);

/**
 * Envelope of the switch function max{0, 1-s}:
 *   1 - s - mu/2        when s <= 1 - mu,
 *   (1-s)^2 / (2 mu)    when 1 - mu <= s < 1,
 *   0                   when s >= 1.
 * Smoothing constants (1/2, 1).
 */
ScalarValueGrad smoothed_hinge(double s, double mu);

/**
 * Numerical envelope oracle for a scalar convex function: minimizes
 * F(z) + (z - x)^2 / (2 mu) over a grid spanning [x - 3 mu, x + 3 mu],
 * refined by golden-section search. Accuracy is on the order of the grid
 * resolution; intended as an independent check of the closed forms.
 */
double prox_oracle(const std::function<double(double)>& F, double x, double mu,
                   double grid_resolution);

/**
 * Envelope oracle for a radially symmetric convex function on R^n: searches
 * z = s * x/||x|| along the ray through the origin (where the minimizer of
 * F(z) + ||z - x||^2/(2 mu) lives for such F).
 */
double prox_oracle_radial(const std::function<double(const Vector&)>& F, const Vector& x,
                          double mu, double grid_resolution);

} // namespace odro::smoothing
