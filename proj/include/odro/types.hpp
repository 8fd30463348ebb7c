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

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace odro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Value of a scalar function together with its gradient at the same point.
struct ValueGrad {
    double value{0.0};
    Vector grad;
};

/// Scalar specialization used by the one-dimensional envelopes.
struct ScalarValueGrad {
    double value{0.0};
    double derivative{0.0};
};

/// Raised when an operation receives data that violates its preconditions.
class InvalidInput : public std::invalid_argument {
  public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace odro
