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

#include <cstdint>
#include <random>
#include <vector>

#include "odro/types.hpp"
#include "odro/window.hpp"

namespace odro::sim {

/**
 * Planar system with a stable limit cycle:
 *   x+ = A(x) x + h u + h w,
 *   A(x) = [ 1 + a0 h (1 - x'x),  b0 h ; -b0 h,  1 + a0 h (1 - x'x) ],
 * converging to the unit circle at rotation rate b0.
 */
struct OscillatorParams {
    double a0{0.1};
    double b0{1.5707963267948966}; // pi/2
    double h{1e-3};
    double sigma{1.0};
    Vector x0{(Eigen::Vector2d() << 1.0, 0.0).finished()};
    double u_lo{-0.6};
    double u_hi{0.6};
};

Vector oscillator_step(const Vector& x, const Vector& u, const Vector& w,
                       const OscillatorParams& params);

/// Reference system: same structure with unit rotation rate, no control or noise.
Vector oscillator_reference_step(const Vector& xbar, const OscillatorParams& params);

/**
 * Two predictors sharing the known a0 term and differing in the rotation
 * rate (0 and 1); both have input gain h*I, so the true system is their
 * combination with weights (1 - b0, b0).
 */
PredictorBasis oscillator_basis(const OscillatorParams& params);

/// Piecewise-constant drift schedule A(t) with the third component zero.
struct DriftSignal {
    std::vector<std::int64_t> breakpoints; // segment start times, ascending, first == 0
    std::vector<Vector> values;

    const Vector& at(std::int64_t t) const;

    static DriftSignal piecewise_random(std::uint64_t seed, std::int64_t horizon,
                                        std::int64_t switch_interval, double lo, double hi);
};

/**
 * Return-rate system x+ = x + h A(t) + h w in R^3, with the third asset value
 * preserved: A_3 = w_3 = 0 and x_3 == 1 throughout.
 */
struct AllocationParams {
    double h{1e-3};
    double sigma{0.1};
    double r0{1.3};
    Vector x0{(Eigen::Vector3d() << 1.6, 1.4, 1.0).finished()};
    std::int64_t switch_interval{20000};
    double drift_lo{0.0};
    double drift_hi{0.08};
};

Vector allocation_step(const Vector& x, const Vector& w, std::int64_t t,
                       const DriftSignal& drift, const AllocationParams& params);

/// Three control-independent predictors: identity drift and two with small
/// constant offsets along e1 and e2.
PredictorBasis allocation_basis(const AllocationParams& params);

/**
 * Zero-mean Gaussian draw with scale sigma per component, the canonical
 * sigma-sub-Gaussian source. Masked components are exactly zero and consume
 * no randomness.
 */
Vector sample_noise(std::mt19937_64& rng, double sigma, int n,
                    const std::vector<bool>* zero_mask = nullptr);

} // namespace odro::sim
