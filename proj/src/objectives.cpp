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

#include "odro/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace odro::objectives {

namespace {

double largest_singular_value(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

} // namespace

smoothing::SmoothingParams Problem1Data::smoothing_params() const {
    const double p = static_cast<double>(predictors());
    const double si_sum = std::accumulate(s_i.begin(), s_i.end(), 0.0);
    return {mu, (1.0 + p * gamma) / 2.0, mu + s0 + gamma * si_sum};
}

Problem1Data assemble_problem1(const learning::WindowFeatures& features,
                               const PredictorBasis& basis, const Vector& alpha,
                               const learning::AmbiguitySet& ambiguity,
                               const std::optional<Vector>& reference, double mu) {
    if (!(mu > 0.0)) throw InvalidInput("assemble_problem1: mu must be positive");
    const int T = features.length();
    const int p = features.predictors();
    const int n = features.state_dim();
    if (alpha.size() != p) throw InvalidInput("assemble_problem1: alpha size mismatch");
    if (reference && reference->size() != n)
        throw InvalidInput("assemble_problem1: reference dimension mismatch");

    Problem1Data data;
    data.epsilon = ambiguity.epsilon;
    data.gamma = ambiguity.gamma;
    data.mu = mu;

    // current-time drift and gain of each predictor
    std::vector<Vector> f1_now(static_cast<std::size_t>(p));
    data.H_lin.resize(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        f1_now[static_cast<std::size_t>(i)] = basis.f1[static_cast<std::size_t>(i)](features.t,
                                                                                    features.x_now);
        data.H_lin[static_cast<std::size_t>(i)] =
            basis.f2[static_cast<std::size_t>(i)](features.t, features.x_now);
        if (data.H_lin[static_cast<std::size_t>(i)].rows() != n)
            throw InvalidInput("assemble_problem1: f2 row dimension mismatch");
    }
    const int m = static_cast<int>(data.H_lin.front().cols());

    data.M = Matrix::Zero(n, m);
    Vector alpha_f1 = Vector::Zero(n);
    for (int i = 0; i < p; ++i) {
        data.M.noalias() += alpha(i) * data.H_lin[static_cast<std::size_t>(i)];
        alpha_f1.noalias() += alpha(i) * f1_now[static_cast<std::size_t>(i)];
    }
    if (reference) alpha_f1 -= *reference;

    data.p_const.resize(n, T);
    for (int i = 0; i < p; ++i) data.H_const.emplace_back(n, T);
    for (int k = 0; k < T; ++k) {
        const Matrix& fk = features.f[static_cast<std::size_t>(k)];
        data.p_const.col(k) = alpha_f1 - fk * alpha + features.x_next[static_cast<std::size_t>(k)];
        for (int i = 0; i < p; ++i)
            data.H_const[static_cast<std::size_t>(i)].col(k) =
                fk.col(i) - f1_now[static_cast<std::size_t>(i)];
    }

    const double sM = largest_singular_value(data.M);
    data.s0 = sM * sM;
    data.s_i.reserve(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        const double s = largest_singular_value(data.H_lin[static_cast<std::size_t>(i)]);
        data.s_i.push_back(s * s);
    }
    return data;
}

Problem1Data assemble_problem1(const ObservationWindow& window, const PredictorBasis& basis,
                               const Vector& alpha, const learning::AmbiguitySet& ambiguity,
                               const std::optional<Vector>& reference, double mu, double d) {
    return assemble_problem1(learning::compute_features(window, basis, d), basis, alpha,
                             ambiguity, reference, mu);
}

ValueGrad problem1_value_grad(const Problem1Data& data, const Vector& u) {
    const int T = data.length();
    const int p = data.predictors();
    const double Td = static_cast<double>(T);
    const int n = static_cast<int>(data.M.rows());

    ValueGrad out;
    out.value = 0.5 * u.squaredNorm() + data.epsilon;
    out.grad = u;

    // tracking pieces share the chain-rule factor M^T, hoisted out of the sum
    Vector piece(n);
    Vector acc = Vector::Zero(n);
    const Vector gain_u = data.M * u;
    double tracking_value = 0.0;
    for (int k = 0; k < T; ++k) {
        piece = data.p_const.col(k) + gain_u;
        const auto env = smoothing::moreau_l2_radial(piece.norm(), data.mu);
        tracking_value += env.value;
        acc.noalias() += env.slope * piece;
    }
    out.value += tracking_value / Td;
    out.grad.noalias() += data.M.transpose() * (acc / Td);

    // drift pieces share -f2^T per predictor
    double drift_value = 0.0;
    for (int i = 0; i < p; ++i) {
        const Matrix& lin = data.H_lin[static_cast<std::size_t>(i)];
        const Matrix& h_const = data.H_const[static_cast<std::size_t>(i)];
        const Vector lin_u = lin * u;
        acc.setZero();
        for (int k = 0; k < T; ++k) {
            piece = h_const.col(k) - lin_u;
            const auto env = smoothing::moreau_l2_radial(piece.norm(), data.mu);
            drift_value += env.value;
            acc.noalias() += env.slope * piece;
        }
        out.grad.noalias() -= lin.transpose() * (data.gamma / Td * acc);
    }
    out.value += data.gamma * drift_value / Td;
    return out;
}

double problem1_exact_value(const Problem1Data& data, const Vector& u) {
    const int T = data.length();
    const int p = data.predictors();
    const double Td = static_cast<double>(T);

    double value = 0.5 * u.squaredNorm() + data.epsilon;
    const Vector gain_u = data.M * u;
    for (int k = 0; k < T; ++k) value += (data.p_const.col(k) + gain_u).norm() / Td;
    double drift = 0.0;
    for (int i = 0; i < p; ++i) {
        const Vector lin_u = data.H_lin[static_cast<std::size_t>(i)] * u;
        for (int k = 0; k < T; ++k)
            drift += (data.H_const[static_cast<std::size_t>(i)].col(k) - lin_u).norm();
    }
    return value + data.gamma * drift / Td;
}

smoothing::SmoothingParams Problem2Data::smoothing_params() const {
    const double Td = static_cast<double>(length());
    double inf_sum = 0.0;
    for (const auto& pt : points) {
        const double ninf = pt.lpNorm<Eigen::Infinity>();
        inf_sum += ninf * ninf;
    }
    const double scaled_q = q / r0;
    return {mu, (1.0 + scaled_q) / 2.0, scaled_q + inf_sum / (r0 * r0 * Td)};
}

Problem2Data assemble_problem2(const learning::WindowFeatures& features,
                               const PredictorBasis& basis, const Vector& alpha,
                               const learning::AmbiguitySet& ambiguity, double r0, double mu) {
    if (!(mu > 0.0)) throw InvalidInput("assemble_problem2: mu must be positive");
    if (!(r0 > 0.0)) throw InvalidInput("assemble_problem2: r0 must be positive");
    const int p = features.predictors();
    if (alpha.size() != p) throw InvalidInput("assemble_problem2: alpha size mismatch");

    int m = 0;
    for (int i = 0; i < p; ++i) {
        const Matrix gain = basis.f2[static_cast<std::size_t>(i)](features.t, features.x_now);
        if (gain.size() != 0 && gain.cwiseAbs().maxCoeff() != 0.0)
            throw InvalidInput(
                "assemble_problem2: basis must be control-independent (f2 == 0), predictor " +
                std::to_string(i + 1) + " is not");
        m = std::max(m, static_cast<int>(gain.cols()));
    }

    Problem2Data data;
    data.r0 = r0;
    data.mu = mu;
    data.epsilon = ambiguity.epsilon;
    // with f2 == 0 both the points and the drift are decision-independent, so
    // these reproduce the ambiguity support and radius built from the same
    // alpha exactly
    const Vector placeholder = Vector::Zero(m);
    data.points = learning::prediction_points(features, basis, alpha, placeholder);
    data.q = ambiguity.epsilon +
             ambiguity.gamma * learning::drift_term(features, basis, placeholder);
    return data;
}

Problem2Data assemble_problem2(const ObservationWindow& window, const PredictorBasis& basis,
                               const Vector& alpha, const learning::AmbiguitySet& ambiguity,
                               double r0, double mu, double d) {
    return assemble_problem2(learning::compute_features(window, basis, d), basis, alpha,
                             ambiguity, r0, mu);
}

ValueGrad problem2_value_grad(const Problem2Data& data, const Vector& u) {
    const int T = data.length();
    const double Td = static_cast<double>(T);

    ValueGrad out;
    out.grad = Vector::Zero(u.size());
    for (int k = 0; k < T; ++k) {
        const Vector& pt = data.points[static_cast<std::size_t>(k)];
        const auto sw = smoothing::smoothed_hinge(u.dot(pt) / data.r0, data.mu);
        out.value += sw.value / Td;
        out.grad.noalias() += (sw.derivative / (Td * data.r0)) * pt;
    }
    const auto norm_env = smoothing::moreau_l2(u, data.mu);
    out.value += data.q / data.r0 * norm_env.value;
    out.grad += data.q / data.r0 * norm_env.grad;
    return out;
}

double problem2_exact_value(const Problem2Data& data, const Vector& u) {
    const int T = data.length();
    const double Td = static_cast<double>(T);
    double value = 0.0;
    for (int k = 0; k < T; ++k)
        value += std::max(0.0, 1.0 - u.dot(data.points[static_cast<std::size_t>(k)]) / data.r0) /
                 Td;
    return value + data.q / data.r0 * u.norm();
}

double lipschitz_grad_constant(const Problem1Data& data) {
    return data.smoothing_params().b / data.mu;
}

double lipschitz_grad_constant(const Problem2Data& data) {
    const double Td = static_cast<double>(data.length());
    double inf_sum = 0.0;
    for (const auto& pt : data.points) {
        const double ninf = pt.lpNorm<Eigen::Infinity>();
        inf_sum += ninf * ninf;
    }
    return data.q / data.r0 + inf_sum / (data.r0 * data.r0 * Td);
}

} // namespace odro::objectives
