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

#include <vector>

#include "odro/types.hpp"
#include "odro/window.hpp"

namespace odro::learning {

/// Relative threshold deciding which singular values count as nonzero,
/// shared by the pseudo-inverse and the sigma_min used for c.
inline constexpr double kSvdRelativeCutoff = 1e-10;

/// Absolute tolerance below which sum(alpha) is treated as degenerate.
inline constexpr double kAlphaSumTolerance = 1e-12;

/**
 * Per-transition predictor data for one window: the evaluations
 * f_k^(i) = f^(i)(k, x_k, u_k), the scalar regularizer of each k, and the
 * observed next state. Precomputing these makes the closed-loop driver cheap
 * (each entry depends only on (k, x_k, u_k), so a ring buffer can reuse them
 * as the window slides) while the one-shot entry points below build them
 * from a raw window.
 */
struct WindowFeatures {
    std::int64_t t{0};
    Vector x_now;                    // x_t
    std::vector<Matrix> f;           // one n x p matrix per k; column i is f_k^(i)
    std::vector<double> regularizer; // scalar P_k
    std::vector<Vector> x_next;      // x_{k+1}

    int length() const { return static_cast<int>(f.size()); }
    int predictors() const { return f.empty() ? 0 : static_cast<int>(f.front().cols()); }
    int state_dim() const { return static_cast<int>(x_now.size()); }
};

/**
 * Evaluates all predictors over the window and picks the regularizer
 * P_k = min(1, d / max_i ||f_k^(i)||) * I, which meets the norm bound
 * ||P_k f_k^(i)|| <= d for every i, k.
 * Throws InvalidInput naming (i, k) if a predictor output is not finite.
 */
WindowFeatures compute_features(const ObservationWindow& window, const PredictorBasis& basis,
                                double d);

/// Appends the features of one observed transition (k, x_k, u_k) -> x_next.
/// compute_features and the closed-loop driver share this kernel, so sliding
/// windows reproduce the one-shot path bit for bit.
void append_transition(WindowFeatures& features, const PredictorBasis& basis, double d,
                       std::int64_t k, const Vector& x_k, const Vector& u_k,
                       const Vector& x_next);

/// Drops the oldest entries until at most `keep` transitions remain.
void trim_front(WindowFeatures& features, int keep);

struct GramSystem {
    Matrix A;                         // p x p
    Vector b;                         // p
    std::vector<double> regularizers; // chosen P_k scalars
};

/// Window-averaged Gram system A(i,j) = (1/T) sum_k <f_k^(j), P_k f_k^(i)>,
/// b(i) = (1/T) sum_k <x_{k+1}, P_k f_k^(i)>.
GramSystem build_gram(const WindowFeatures& features);
GramSystem build_gram(const ObservationWindow& window, const PredictorBasis& basis, double d);

struct AlphaEstimate {
    Vector alpha;
    double sigma_min{0.0}; // smallest nonzero singular value of A (0 if A == 0)
    double sigma_max{0.0};
    bool degenerate{false}; // true when A == 0
};

/// alpha = pinv(A) b via SVD with the shared relative cutoff.
AlphaEstimate estimate_alpha(const Matrix& A, const Vector& b);

/**
 * The T one-step predictions of x_{t+1}: for each window slot k,
 *   xi_k = sum_i alpha_i [ f^(i)(t, x_t, u) - f_k^(i) ] + x_{k+1},
 * which is the alpha-mix of the individual predictor corrections.
 * Throws InvalidInput when |sum(alpha)| <= kAlphaSumTolerance.
 */
std::vector<Vector> prediction_points(const WindowFeatures& features, const PredictorBasis& basis,
                                      const Vector& alpha, const Vector& u);
std::vector<Vector> prediction_points(const ObservationWindow& window,
                                      const PredictorBasis& basis, const Vector& alpha,
                                      const Vector& u);

/// Fitted environment model plus the constants derived from it.
struct LearnedModel {
    Matrix A;
    Vector b;
    Vector alpha;
    double sigma_min{0.0};
    double c{0.0};     // sigma e d sqrt(np) / sigma_min(A); NaN when undefined
    double gamma{0.0}; // n c + theta
    bool degenerate{false};
};

LearnedModel learn_model(const WindowFeatures& features, const LearningConfig& cfg);
LearnedModel learn_model(const ObservationWindow& window, const PredictorBasis& basis,
                         const LearningConfig& cfg);

/// Concentration radius sqrt(2 n sigma^2 ln(1/beta) / T) + a0 T^{-1/max(n,2)}.
double concentration_epsilon(int n, double sigma, int T, double beta, double a0);

/// Model drift H(t, T, u) = (1/T) sum_i sum_k ||f_k^(i) - f^(i)(t, x_t, u)||.
double drift_term(const WindowFeatures& features, const PredictorBasis& basis, const Vector& u);

/// Confidence rho = (1-beta)(1 - exp(-theta^2 T^2 / (2[(2T-1) c gamma + n c^2]))).
double confidence_rho(double theta, int T, double c, double gamma, double beta, int n);

/// Variant of rho with the exponent written through (n c - gamma)^2; equal to
/// confidence_rho since gamma = n c + theta.
double confidence_rho_alt(int T, double c, double gamma, double beta, int n);

/**
 * Ball of distributions around the empirical prediction distribution:
 * T uniformly weighted support points and the radius eps_hat = eps + gamma H.
 */
struct AmbiguitySet {
    std::vector<Vector> support;
    double mass{0.0};    // uniform weight 1/T
    double radius{0.0};  // eps_hat
    double epsilon{0.0}; // concentration part
    double drift{0.0};   // H(t, T, u)
    double gamma{0.0};   // drift weight the radius was built with
    double rho{0.0};
};

/// Throws InvalidInput when sigma_min(A) == 0 (c undefined).
AmbiguitySet build_ambiguity(const WindowFeatures& features, const PredictorBasis& basis,
                             const Vector& alpha, const LearnedModel& model,
                             const LearningConfig& cfg, const Vector& u);
AmbiguitySet build_ambiguity(const ObservationWindow& window, const PredictorBasis& basis,
                             const Vector& alpha, const LearnedModel& model,
                             const LearningConfig& cfg, const Vector& u);

} // namespace odro::learning
