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
#include <functional>
#include <vector>

#include "odro/types.hpp"

namespace odro {

/**
 * Moving window of past observations: states x_{t-T} .. x_t and the controls
 * u_{t-T} .. u_{t-1} that produced each transition. The window length T is
 * min(t, T0) for the configured horizon T0, so `states` always has exactly
 * one more entry than `controls`.
 */
struct ObservationWindow {
    std::int64_t t{0};
    std::vector<Vector> states;
    std::vector<Vector> controls;

    int length() const { return static_cast<int>(controls.size()); }
    int state_dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    int control_dim() const {
        return controls.empty() ? 0 : static_cast<int>(controls.front().size());
    }

    /// Throws InvalidInput if the shape invariants do not hold.
    void validate() const;
};

/**
 * A family of p control-affine candidate environments
 *   f^(i)(t, x, u) = f1^(i)(t, x) + f2^(i)(t, x) u.
 * The drift part maps to R^n, the input gain to R^{n x m}.
 */
struct PredictorBasis {
    using DriftFn = std::function<Vector(std::int64_t, const Vector&)>;
    using GainFn = std::function<Matrix(std::int64_t, const Vector&)>;

    std::vector<DriftFn> f1;
    std::vector<GainFn> f2;

    int size() const { return static_cast<int>(f1.size()); }

    /// Full predictor value f1^(i)(t,x) + f2^(i)(t,x) u.
    Vector evaluate(int i, std::int64_t t, const Vector& x, const Vector& u) const;

    void validate() const;
};

/// Parameters of the data-driven ambiguity construction.
struct LearningConfig {
    double beta{0.05};  // confidence level, in (0,1)
    double theta{0.0};  // slack parameter, >= 0
    double sigma{1.0};  // sub-Gaussian noise scale, > 0
    double d{1.0};      // regularization norm bound, > 0
    double a0{1.0};     // concentration constant, > 0
    int t0{500};        // window horizon T0, >= 1

    void validate() const;
};

} // namespace odro
