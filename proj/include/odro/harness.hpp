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

#include <string>
#include <vector>

#include "odro/scenarios.hpp"
#include "odro/solver.hpp"
#include "odro/trajectory.hpp"
#include "odro/types.hpp"
#include "odro/window.hpp"

namespace odro::harness {

/**
 * Full configuration of a closed-loop experiment. The learning sigma doubles
 * as the scenario noise scale, so the decision maker always assumes the true
 * noise level.
 */
struct RunConfig {
    std::string scenario{"oscillator"}; // "oscillator" | "allocation"
    std::int64_t horizon{1000};
    std::uint64_t seed{1};
    LearningConfig learning;
    double mu{0.1};
    solver::StepRule step_rule{solver::StepRule::kInverseLipschitz};
    int inner_steps{1};
    std::string out;           // empty: derived from ODRO_OUT_DIR (or cwd)
    std::string format{"csv"};
    bool regret{false};
    int regret_samples{200};
    int replications{1};
    sim::OscillatorParams oscillator;
    sim::AllocationParams allocation;
};

/// Paper-style defaults per scenario (oscillator: mu=0.1, sigma=1, T0=500;
/// allocation: mu=0.01, sigma=0.1, T0=500).
RunConfig default_config(const std::string& scenario);

/// Returns human-readable violations; empty means the config is runnable.
std::vector<std::string> validate(const RunConfig& cfg);

/// Applies one `key = value` assignment; throws InvalidInput on unknown keys
/// or unparseable values. Shared by the config file reader and CLI flags.
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text file; the scenario key must come before keys whose
/// defaults depend on it. '#' starts a comment.
RunConfig load_config_file(const std::string& path);

struct RunSummary {
    std::string scenario;
    std::int64_t horizon{0};
    std::uint64_t seed{0};
    Vector final_alpha;
    double mean_eps_hat{0.0};
    double mean_rho{0.0};
    double min_rho{0.0};
    // oscillator: mean squared tracking error over the final fifth of the run
    double tracking_mse{std::numeric_limits<double>::quiet_NaN()};
    double tracking_mse_uncontrolled{std::numeric_limits<double>::quiet_NaN()};
    // allocation: instantaneous profit statistics
    double mean_profit{std::numeric_limits<double>::quiet_NaN()};
    double final_profit{std::numeric_limits<double>::quiet_NaN()};
};

std::string summary_to_json(const RunSummary& summary);

struct RunResult {
    TrajectoryRecord record;
    RunSummary summary;
};

/// Thrown when a module error interrupts a run; carries the rows produced so
/// far so the caller can flush them with a truncation marker.
class RunError : public std::runtime_error {
  public:
    RunError(const std::string& what, std::int64_t step, TrajectoryRecord partial)
        : std::runtime_error(what), step_(step), partial_(std::move(partial)) {}
    std::int64_t step() const { return step_; }
    const TrajectoryRecord& partial() const { return partial_; }

  private:
    std::int64_t step_;
    TrajectoryRecord partial_;
};

/// Runs one seeded closed-loop experiment in memory.
RunResult run(const RunConfig& cfg);

/// Fans out `replications` runs with seeds seed, seed+1, ... in parallel and
/// returns their summaries ordered by replication index. When `results` is
/// non-null the full records are stored there in the same order.
std::vector<RunSummary> run_replications(const RunConfig& cfg,
                                         std::vector<RunResult>* results = nullptr);

/// Default output path: $ODRO_OUT_DIR (or ".") / <scenario>_seed<seed>.<fmt>.
std::string default_out_path(const RunConfig& cfg);

} // namespace odro::harness
