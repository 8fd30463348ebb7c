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

#include "odro/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace odro::sim {

namespace {

Matrix oscillator_system_matrix(const Vector& x, double rate, double a0, double h) {
    const double diag = 1.0 + a0 * h * (1.0 - x.squaredNorm());
    Matrix A(2, 2);
    A << diag, rate * h, -rate * h, diag;
    return A;
}

} // namespace

Vector oscillator_step(const Vector& x, const Vector& u, const Vector& w,
                       const OscillatorParams& params) {
    if (x.size() != 2 || u.size() != 2 || w.size() != 2)
        throw InvalidInput("oscillator_step: state, control and noise must be 2-dimensional");
    return oscillator_system_matrix(x, params.b0, params.a0, params.h) * x + params.h * u +
           params.h * w;
}

Vector oscillator_reference_step(const Vector& xbar, const OscillatorParams& params) {
    if (xbar.size() != 2) throw InvalidInput("oscillator_reference_step: state must be 2-dim");
    return oscillator_system_matrix(xbar, 1.0, params.a0, params.h) * xbar;
}

PredictorBasis oscillator_basis(const OscillatorParams& params) {
    PredictorBasis basis;
    const double a0 = params.a0;
    const double h = params.h;
    for (const double rate : {0.0, 1.0}) {
        basis.f1.push_back([a0, h, rate](std::int64_t, const Vector& x) -> Vector {
            return oscillator_system_matrix(x, rate, a0, h) * x;
        });
        basis.f2.push_back(
            [h](std::int64_t, const Vector&) -> Matrix { return h * Matrix::Identity(2, 2); });
    }
    return basis;
}

const Vector& DriftSignal::at(std::int64_t t) const {
    if (breakpoints.empty()) throw InvalidInput("drift signal: empty schedule");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const auto idx = static_cast<std::size_t>(std::distance(breakpoints.begin(), it)) - 1;
    return values[std::min(idx, values.size() - 1)];
}

DriftSignal DriftSignal::piecewise_random(std::uint64_t seed, std::int64_t horizon,
                                          std::int64_t switch_interval, double lo, double hi) {
    if (switch_interval < 1) throw InvalidInput("drift signal: switch interval must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(lo, hi);
    DriftSignal signal;
    for (std::int64_t start = 0; start <= horizon; start += switch_interval) {
        Vector a(3);
        a << uniform(rng), uniform(rng), 0.0;
        signal.breakpoints.push_back(start);
        signal.values.push_back(std::move(a));
    }
    return signal;
}

Vector allocation_step(const Vector& x, const Vector& w, std::int64_t t,
                       const DriftSignal& drift, const AllocationParams& params) {
    if (x.size() != 3 || w.size() != 3)
        throw InvalidInput("allocation_step: state and noise must be 3-dimensional");
    const Vector& a = drift.at(t);
    if (a[2] != 0.0 || w[2] != 0.0)
        throw InvalidInput("allocation_step: third drift and noise components must be zero");
    Vector next = x + params.h * a + params.h * w;
    next[2] = x[2]; // value-preserved asset
    return next;
}

PredictorBasis allocation_basis(const AllocationParams& params) {
    PredictorBasis basis;
    const double h = params.h;
    for (int which = 0; which < 3; ++which) {
        basis.f1.push_back([h, which](std::int64_t, const Vector& x) -> Vector {
            Vector value = x;
            if (which > 0) value[which - 1] += 0.1 * h;
            return value;
        });
        basis.f2.push_back(
            [](std::int64_t, const Vector&) -> Matrix { return Matrix::Zero(3, 3); });
    }
    return basis;
}

Vector sample_noise(std::mt19937_64& rng, double sigma, int n,
                    const std::vector<bool>* zero_mask) {
    if (sigma < 0.0) throw InvalidInput("sample_noise: sigma must be nonnegative");
    Vector w = Vector::Zero(n);
    if (sigma == 0.0) return w;
    std::normal_distribution<double> normal(0.0, sigma);
    for (int i = 0; i < n; ++i) {
        if (zero_mask && (*zero_mask)[static_cast<std::size_t>(i)]) continue;
        w[i] = normal(rng);
    }
    return w;
}

} // namespace odro::sim
