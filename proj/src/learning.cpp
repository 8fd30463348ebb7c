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

#include "odro/learning.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace odro::learning {

namespace {

std::string index_pair(int i, int k) {
    return "(i=" + std::to_string(i) + ", k=" + std::to_string(k) + ")";
}

} // namespace

void append_transition(WindowFeatures& features, const PredictorBasis& basis, double d,
                       std::int64_t k, const Vector& x_k, const Vector& u_k,
                       const Vector& x_next) {
    const int p = basis.size();
    const int n = static_cast<int>(x_k.size());
    Matrix fk(n, p);
    double max_norm = 0.0;
    for (int i = 0; i < p; ++i) {
        fk.col(i) = basis.evaluate(i, k, x_k, u_k);
        if (!fk.col(i).allFinite())
            throw InvalidInput("features: non-finite predictor output at " +
                               index_pair(i + 1, static_cast<int>(k)));
        max_norm = std::max(max_norm, fk.col(i).norm());
    }
    const double reg = max_norm > 0.0 ? std::min(1.0, d / max_norm) : 1.0;
    features.f.push_back(std::move(fk));
    features.regularizer.push_back(reg);
    features.x_next.push_back(x_next);
}

void trim_front(WindowFeatures& features, int keep) {
    while (features.length() > keep) {
        features.f.erase(features.f.begin());
        features.regularizer.erase(features.regularizer.begin());
        features.x_next.erase(features.x_next.begin());
    }
}

WindowFeatures compute_features(const ObservationWindow& window, const PredictorBasis& basis,
                                double d) {
    window.validate();
    basis.validate();
    if (!(d > 0.0)) throw InvalidInput("compute_features: d must be positive");

    const int T = window.length();

    WindowFeatures features;
    features.t = window.t;
    features.x_now = window.states.back();
    features.f.reserve(static_cast<std::size_t>(T));
    features.regularizer.reserve(static_cast<std::size_t>(T));
    features.x_next.reserve(static_cast<std::size_t>(T));

    for (int k = 0; k < T; ++k) {
        append_transition(features, basis, d, window.t - T + k,
                          window.states[static_cast<std::size_t>(k)],
                          window.controls[static_cast<std::size_t>(k)],
                          window.states[static_cast<std::size_t>(k) + 1]);
    }
    return features;
}

GramSystem build_gram(const WindowFeatures& features) {
    const int T = features.length();
    const int p = features.predictors();
    GramSystem out;
    out.A = Matrix::Zero(p, p);
    out.b = Vector::Zero(p);
    out.regularizers = features.regularizer;
    for (int k = 0; k < T; ++k) {
        const Matrix& fk = features.f[static_cast<std::size_t>(k)];
        const double reg = features.regularizer[static_cast<std::size_t>(k)];
        out.A.noalias() += reg * (fk.transpose() * fk);
        out.b.noalias() += reg * (fk.transpose() * features.x_next[static_cast<std::size_t>(k)]);
    }
    out.A /= static_cast<double>(T);
    out.b /= static_cast<double>(T);
    return out;
}

GramSystem build_gram(const ObservationWindow& window, const PredictorBasis& basis, double d) {
    return build_gram(compute_features(window, basis, d));
}

AlphaEstimate estimate_alpha(const Matrix& A, const Vector& b) {
    if (!A.allFinite() || !b.allFinite())
        throw InvalidInput("estimate_alpha: A and b must be finite");

    AlphaEstimate out;
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    out.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    if (out.sigma_max == 0.0) {
        // pseudo-inverse of the zero matrix is zero
        out.alpha = Vector::Zero(b.size());
        out.sigma_min = 0.0;
        out.degenerate = true;
        return out;
    }
    const double cutoff = kSvdRelativeCutoff * out.sigma_max;
    Vector inv = Vector::Zero(sv.size());
    double smallest_kept = out.sigma_max;
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
        if (sv(j) > cutoff) {
            inv(j) = 1.0 / sv(j);
            smallest_kept = sv(j);
        }
    }
    out.sigma_min = smallest_kept;
    out.alpha = svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * b);
    return out;
}

std::vector<Vector> prediction_points(const WindowFeatures& features, const PredictorBasis& basis,
                                      const Vector& alpha, const Vector& u) {
    const double alpha_sum = alpha.sum();
    if (std::abs(alpha_sum) <= kAlphaSumTolerance)
        throw InvalidInput("prediction_points: degenerate alpha sum");

    const int T = features.length();
    const int p = features.predictors();

    // alpha-mix of the current-time predictor evaluations
    Vector current = Vector::Zero(features.state_dim());
    for (int i = 0; i < p; ++i)
        current.noalias() += alpha(i) * basis.evaluate(i, features.t, features.x_now, u);

    std::vector<Vector> points;
    points.reserve(static_cast<std::size_t>(T));
    for (int k = 0; k < T; ++k) {
        Vector xi = current + features.x_next[static_cast<std::size_t>(k)];
        xi.noalias() -= features.f[static_cast<std::size_t>(k)] * alpha;
        if (!xi.allFinite()) throw InvalidInput("prediction_points: non-finite support point");
        points.push_back(std::move(xi));
    }
    return points;
}

std::vector<Vector> prediction_points(const ObservationWindow& window,
                                      const PredictorBasis& basis, const Vector& alpha,
                                      const Vector& u) {
    // d does not affect the points; any positive value yields the same features
    return prediction_points(compute_features(window, basis, 1.0), basis, alpha, u);
}

LearnedModel learn_model(const WindowFeatures& features, const LearningConfig& cfg) {
    cfg.validate();
    GramSystem gram = build_gram(features);
    AlphaEstimate est = estimate_alpha(gram.A, gram.b);

    LearnedModel model;
    model.A = std::move(gram.A);
    model.b = std::move(gram.b);
    model.alpha = std::move(est.alpha);
    model.sigma_min = est.sigma_min;
    model.degenerate = est.degenerate;
    const int n = features.state_dim();
    const int p = features.predictors();
    if (est.sigma_min > 0.0) {
        model.c = cfg.sigma * std::numbers::e * cfg.d *
                  std::sqrt(static_cast<double>(n) * static_cast<double>(p)) / est.sigma_min;
        model.gamma = static_cast<double>(n) * model.c + cfg.theta;
    } else {
        model.c = std::numeric_limits<double>::quiet_NaN();
        model.gamma = std::numeric_limits<double>::quiet_NaN();
    }
    return model;
}

LearnedModel learn_model(const ObservationWindow& window, const PredictorBasis& basis,
                         const LearningConfig& cfg) {
    return learn_model(compute_features(window, basis, cfg.d), cfg);
}

double concentration_epsilon(int n, double sigma, int T, double beta, double a0) {
    if (T < 1) throw InvalidInput("concentration_epsilon: T must be at least 1");
    const double Td = static_cast<double>(T);
    const double tail = std::sqrt(2.0 * n * sigma * sigma / Td * std::log(1.0 / beta));
    const double rate = a0 * std::pow(Td, -1.0 / std::max(n, 2));
    return tail + rate;
}

double drift_term(const WindowFeatures& features, const PredictorBasis& basis, const Vector& u) {
    const int T = features.length();
    const int p = features.predictors();
    double sum = 0.0;
    for (int i = 0; i < p; ++i) {
        const Vector current = basis.evaluate(i, features.t, features.x_now, u);
        for (int k = 0; k < T; ++k)
            sum += (features.f[static_cast<std::size_t>(k)].col(i) - current).norm();
    }
    return sum / static_cast<double>(T);
}

double confidence_rho(double theta, int T, double c, double gamma, double beta, int n) {
    const double Td = static_cast<double>(T);
    const double denom = 2.0 * ((2.0 * Td - 1.0) * c * gamma + n * c * c);
    if (!(denom > 0.0)) return 0.0;
    const double exponent = theta * theta * Td * Td / denom;
    return (1.0 - beta) * (1.0 - std::exp(-exponent));
}

double confidence_rho_alt(int T, double c, double gamma, double beta, int n) {
    const double Td = static_cast<double>(T);
    const double denom = 2.0 * ((2.0 * Td - 1.0) * c * gamma + n * c * c);
    if (!(denom > 0.0)) return 0.0;
    const double diff = n * c - gamma;
    const double exponent = diff * diff * Td * Td / denom;
    return (1.0 - beta) * (1.0 - std::exp(-exponent));
}

AmbiguitySet build_ambiguity(const WindowFeatures& features, const PredictorBasis& basis,
                             const Vector& alpha, const LearnedModel& model,
                             const LearningConfig& cfg, const Vector& u) {
    cfg.validate();
    if (!(model.sigma_min > 0.0))
        throw InvalidInput("build_ambiguity: rank-deficient Gram: c undefined");

    const int T = features.length();
    const int n = features.state_dim();

    AmbiguitySet out;
    out.support = prediction_points(features, basis, alpha, u);
    out.mass = 1.0 / static_cast<double>(T);
    out.epsilon = concentration_epsilon(n, cfg.sigma, T, cfg.beta, cfg.a0);
    out.drift = drift_term(features, basis, u);
    out.gamma = model.gamma;
    out.radius = out.epsilon + model.gamma * out.drift;
    out.rho = confidence_rho(cfg.theta, T, model.c, model.gamma, cfg.beta, n);
    return out;
}

AmbiguitySet build_ambiguity(const ObservationWindow& window, const PredictorBasis& basis,
                             const Vector& alpha, const LearnedModel& model,
                             const LearningConfig& cfg, const Vector& u) {
    return build_ambiguity(compute_features(window, basis, cfg.d), basis, alpha, model, cfg, u);
}

} // namespace odro::learning
