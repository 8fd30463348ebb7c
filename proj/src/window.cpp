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

#include "odro/window.hpp"

#include <string>

namespace odro {

void ObservationWindow::validate() const {
    if (t < 0) throw InvalidInput("window: time index must be nonnegative");
    if (controls.empty()) throw InvalidInput("window: needs at least one transition (T >= 1)");
    if (static_cast<std::int64_t>(controls.size()) > t)
        throw InvalidInput("window: more transitions than elapsed time (T must be <= t)");
    if (states.size() != controls.size() + 1)
        throw InvalidInput("window: states must have exactly one more entry than controls");
    const auto n = states.front().size();
    const auto m = controls.front().size();
    for (const auto& x : states)
        if (x.size() != n) throw InvalidInput("window: inconsistent state dimension");
    for (const auto& u : controls)
        if (u.size() != m) throw InvalidInput("window: inconsistent control dimension");
}

Vector PredictorBasis::evaluate(int i, std::int64_t t, const Vector& x, const Vector& u) const {
    return f1[static_cast<std::size_t>(i)](t, x) + f2[static_cast<std::size_t>(i)](t, x) * u;
}

void PredictorBasis::validate() const {
    if (f1.empty()) throw InvalidInput("basis: needs at least one predictor");
    if (f1.size() != f2.size())
        throw InvalidInput("basis: f1 and f2 lists must have the same length");
}

void LearningConfig::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidInput("config: beta must lie in (0,1)");
    if (theta < 0.0) throw InvalidInput("config: theta must be nonnegative");
    if (!(sigma > 0.0)) throw InvalidInput("config: sigma must be positive");
    if (!(d > 0.0)) throw InvalidInput("config: d must be positive");
    if (!(a0 > 0.0)) throw InvalidInput("config: a0 must be positive");
    if (t0 < 1) throw InvalidInput("config: t0 must be at least 1");
}

} // namespace odro
