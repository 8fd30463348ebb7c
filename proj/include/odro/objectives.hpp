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

#include <optional>
#include <vector>

#include "odro/learning.hpp"
#include "odro/smoothing.hpp"
#include "odro/types.hpp"
#include "odro/window.hpp"

namespace odro::objectives {

/**
 * Affine data of the tracking-control objective
 *   G_mu(t, u) = 1/2 ||u||^2 + (1/T) sum_k F_mu(p_k + M u)
 *              + epsilon + (gamma/T) sum_{i,k} F_mu(h_{k,i} - B_i u),
 * where F_mu is the smoothed Euclidean norm, p_k + M u the predicted
 * tracking errors and h_{k,i} - B_i u the per-predictor drift residuals.
 */
struct Problem1Data {
    Matrix M;                  // n x m, sum_i alpha_i f2^(i)(t, x_t)
    Matrix p_const;            // n x T, one column per window slot
    std::vector<Matrix> H_const; // p entries, each n x T (column k)
    std::vector<Matrix> H_lin;   // p entries, f2^(i)(t, x_t)
    double epsilon{0.0};
    double gamma{0.0};
    double mu{0.0};
    double s0{0.0};          // sigma_max(M^T M)
    std::vector<double> s_i; // sigma_max(f2^(i)^T f2^(i))

    int length() const { return static_cast<int>(p_const.cols()); }
    int predictors() const { return static_cast<int>(H_lin.size()); }
    int control_dim() const { return static_cast<int>(M.cols()); }

    /// (a, b) = ((1 + p gamma)/2, mu + s0 + gamma sum_i s_i).
    smoothing::SmoothingParams smoothing_params() const;
};

/**
 * Builds Problem1Data from the learned window. The optional reference is the
 * next-step target folded into the constant part of each p_k. Only epsilon
 * and gamma of the ambiguity set enter; its support is induced by the same
 * affine data.
 */
Problem1Data assemble_problem1(const learning::WindowFeatures& features,
                               const PredictorBasis& basis, const Vector& alpha,
                               const learning::AmbiguitySet& ambiguity,
                               const std::optional<Vector>& reference, double mu);
Problem1Data assemble_problem1(const ObservationWindow& window, const PredictorBasis& basis,
                               const Vector& alpha, const learning::AmbiguitySet& ambiguity,
                               const std::optional<Vector>& reference, double mu,
                               double d = 1.0);

/// Smoothed objective value and its exact analytic gradient.
ValueGrad problem1_value_grad(const Problem1Data& data, const Vector& u);

/// Non-smooth counterpart with exact norms (for envelope-gap checks).
double problem1_exact_value(const Problem1Data& data, const Vector& u);

/**
 * Data of the allocation objective
 *   G_mu(t, u) = (1/T) sum_k S_mu(<u, p_k>/r0) + (q/r0) F_mu(u),
 * with S_mu the smoothed switch function. Points and q are stored unscaled;
 * the 1/r0 scaling is applied at evaluation, so r0 = 1 recovers the plain
 * form. q = epsilon + gamma * drift, hence q >= epsilon always.
 */
struct Problem2Data {
    std::vector<Vector> points; // T entries, p_{k,t}
    double q{0.0};
    double r0{1.0};
    double mu{0.0};
    double epsilon{0.0};

    int length() const { return static_cast<int>(points.size()); }

    /// (a, b) of the r0-scaled objective:
    /// ((1 + q/r0)/2, q/r0 + (1/(r0^2 T)) sum_k ||p_k||_inf^2).
    smoothing::SmoothingParams smoothing_params() const;
};

/// Requires a control-independent basis (every f2^(i) == 0).
Problem2Data assemble_problem2(const learning::WindowFeatures& features,
                               const PredictorBasis& basis, const Vector& alpha,
                               const learning::AmbiguitySet& ambiguity, double r0, double mu);
Problem2Data assemble_problem2(const ObservationWindow& window, const PredictorBasis& basis,
                               const Vector& alpha, const learning::AmbiguitySet& ambiguity,
                               double r0, double mu, double d = 1.0);

ValueGrad problem2_value_grad(const Problem2Data& data, const Vector& u);

double problem2_exact_value(const Problem2Data& data, const Vector& u);

/// Gradient-Lipschitz estimate used as 1/step by the solver:
/// (mu + s0 + gamma sum_i s_i) / mu.
double lipschitz_grad_constant(const Problem1Data& data);

/// q/r0 + (1/(r0^2 T)) sum_k ||p_k||_inf^2. Can be zero on degenerate data;
/// the step-size computation floors it before inverting.
double lipschitz_grad_constant(const Problem2Data& data);

} // namespace odro::objectives
