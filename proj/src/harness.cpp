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

#include "odro/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <future>
#include <thread>
#include <sstream>

#include <json.hpp>

#include "odro/learning.hpp"
#include "odro/objectives.hpp"
#include "odro/regret.hpp"

namespace odro::harness {

namespace {

using nlohmann::json;

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw InvalidInput("config: cannot parse value '" + value + "' for key '" + key + "'");
    }
}

std::int64_t parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long parsed = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw InvalidInput("config: cannot parse integer '" + value + "' for key '" + key + "'");
    }
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw InvalidInput("config: cannot parse boolean '" + value + "' for key '" + key + "'");
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace

RunConfig default_config(const std::string& scenario) {
    RunConfig cfg;
    cfg.scenario = scenario;
    if (scenario == "oscillator") {
        cfg.mu = 0.1;
        cfg.learning.sigma = 1.0;
        cfg.learning.t0 = 500;
        cfg.horizon = 50000;
    } else if (scenario == "allocation") {
        cfg.mu = 0.01;
        cfg.learning.sigma = 0.1;
        cfg.learning.t0 = 500;
        cfg.horizon = 100000;
    } else {
        throw InvalidInput("config: unknown scenario '" + scenario + "'");
    }
    return cfg;
}

std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> violations;
    if (cfg.scenario != "oscillator" && cfg.scenario != "allocation")
        violations.push_back("scenario: must be 'oscillator' or 'allocation'");
    if (cfg.horizon < 1) violations.push_back("horizon: must be at least 1");
    if (!(cfg.learning.beta > 0.0 && cfg.learning.beta < 1.0))
        violations.push_back("beta: must lie in (0,1)");
    if (cfg.learning.theta < 0.0) violations.push_back("theta: must be nonnegative");
    if (!(cfg.learning.sigma > 0.0)) violations.push_back("sigma: must be positive");
    if (!(cfg.learning.d > 0.0)) violations.push_back("d: must be positive");
    if (!(cfg.learning.a0 > 0.0)) violations.push_back("a0_const: must be positive");
    if (cfg.learning.t0 < 1) violations.push_back("t0: must be at least 1");
    if (!(cfg.mu > 0.0)) violations.push_back("mu: must be positive");
    if (cfg.inner_steps < 1) violations.push_back("inner_steps: must be at least 1");
    if (cfg.format != "csv" && cfg.format != "json")
        violations.push_back("format: must be 'csv' or 'json'");
    if (cfg.regret && cfg.regret_samples < 100)
        violations.push_back("regret_samples: must be at least 100");
    if (cfg.replications < 1) violations.push_back("replications: must be at least 1");
    if (cfg.allocation.switch_interval < 1)
        violations.push_back("switch_interval: must be at least 1");
    if (cfg.allocation.drift_lo > cfg.allocation.drift_hi)
        violations.push_back("drift_lo: must not exceed drift_hi");
    if (!(cfg.allocation.r0 > 0.0)) violations.push_back("r0: must be positive");
    return violations;
}

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "scenario") {
        cfg = default_config(value);
    } else if (key == "horizon") {
        cfg.horizon = parse_integer(key, value);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "beta") {
        cfg.learning.beta = parse_number(key, value);
    } else if (key == "theta") {
        cfg.learning.theta = parse_number(key, value);
    } else if (key == "sigma") {
        cfg.learning.sigma = parse_number(key, value);
    } else if (key == "d") {
        cfg.learning.d = parse_number(key, value);
    } else if (key == "a0_const") {
        cfg.learning.a0 = parse_number(key, value);
    } else if (key == "t0") {
        cfg.learning.t0 = static_cast<int>(parse_integer(key, value));
    } else if (key == "mu") {
        cfg.mu = parse_number(key, value);
    } else if (key == "step_rule") {
        if (value == "inverse-lipschitz")
            cfg.step_rule = solver::StepRule::kInverseLipschitz;
        else if (value == "monotone")
            cfg.step_rule = solver::StepRule::kMonotone;
        else
            throw InvalidInput("config: unknown step_rule '" + value + "'");
    } else if (key == "inner_steps") {
        cfg.inner_steps = static_cast<int>(parse_integer(key, value));
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "format") {
        cfg.format = value;
    } else if (key == "regret") {
        cfg.regret = parse_flag(key, value);
    } else if (key == "regret_samples") {
        cfg.regret_samples = static_cast<int>(parse_integer(key, value));
    } else if (key == "replications") {
        cfg.replications = static_cast<int>(parse_integer(key, value));
    } else if (key == "switch_interval") {
        cfg.allocation.switch_interval = parse_integer(key, value);
    } else if (key == "drift_lo") {
        cfg.allocation.drift_lo = parse_number(key, value);
    } else if (key == "drift_hi") {
        cfg.allocation.drift_hi = parse_number(key, value);
    } else if (key == "r0") {
        cfg.allocation.r0 = parse_number(key, value);
    } else {
        throw InvalidInput("config: unknown key '" + key + "'");
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open '" + path + "'");
    RunConfig cfg = default_config("oscillator");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config: line " + std::to_string(line_no) +
                               " is not a key = value pair");
        apply_key_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string default_out_path(const RunConfig& cfg) {
    if (!cfg.out.empty()) return cfg.out;
    const char* dir = std::getenv("ODRO_OUT_DIR");
    const std::string base = dir && *dir ? dir : ".";
    return base + "/" + cfg.scenario + "_seed" + std::to_string(cfg.seed) + "." + cfg.format;
}

std::string summary_to_json(const RunSummary& s) {
    json j;
    j["scenario"] = s.scenario;
    j["horizon"] = s.horizon;
    j["seed"] = s.seed;
    json alpha = json::array();
    for (Eigen::Index i = 0; i < s.final_alpha.size(); ++i) alpha.push_back(s.final_alpha[i]);
    j["final_alpha"] = alpha;
    j["mean_eps_hat"] = s.mean_eps_hat;
    j["mean_rho"] = s.mean_rho;
    j["min_rho"] = s.min_rho;
    if (std::isfinite(s.tracking_mse)) {
        j["tracking_mse"] = s.tracking_mse;
        j["tracking_mse_uncontrolled"] = s.tracking_mse_uncontrolled;
    }
    if (std::isfinite(s.mean_profit)) {
        j["mean_profit"] = s.mean_profit;
        j["final_profit"] = s.final_profit;
    }
    return j.dump(2);
}

namespace {

// ---------------------------------------------------------------------------
// Scenario drivers
// ---------------------------------------------------------------------------

using regret::DiagnosticsInput;
using regret::RegretTracker;

struct LoopShared {
    TrajectoryRecord record;
    double eps_hat_sum{0.0};
    double rho_sum{0.0};
    double rho_min{std::numeric_limits<double>::infinity()};
};

RunResult run_oscillator(const RunConfig& cfg) {
    sim::OscillatorParams params = cfg.oscillator;
    params.sigma = cfg.learning.sigma;
    const PredictorBasis basis = sim::oscillator_basis(params);
    const Vector lo = Vector::Constant(2, params.u_lo);
    const Vector hi = Vector::Constant(2, params.u_hi);
    const solver::FeasibleSet set{solver::Box(lo, hi)};
    const Vector u0 = Vector::Zero(2);

    std::mt19937_64 rng(cfg.seed);
    std::mt19937_64 mc_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    Vector x = params.x0;
    Vector xbar = params.x0;
    learning::WindowFeatures feats;

    // apply the fixed initial decision once so the first window exists
    {
        const Vector w = sim::sample_noise(rng, params.sigma, 2);
        const Vector x1 = sim::oscillator_step(x, u0, w, params);
        learning::append_transition(feats, basis, cfg.learning.d, 0, x, u0, x1);
        x = x1;
        xbar = sim::oscillator_reference_step(xbar, params);
    }

    LoopShared shared;
    shared.record.n = 2;
    shared.record.m = 2;
    shared.record.p = 2;
    shared.record.has_regret = cfg.regret;
    RegretTracker tracker(cfg.learning.t0, cfg.regret_samples, u0);

    learning::LearnedModel model;
    learning::AmbiguitySet ambiguity;
    Vector xbar_next;
    auto current = std::make_shared<objectives::Problem1Data>();

    const auto assemble = [&](std::int64_t t, const Vector& applied) -> solver::OnlineProblem {
        if (t > 1) {
            const Vector w = sim::sample_noise(rng, params.sigma, 2);
            const Vector x_next = sim::oscillator_step(x, applied, w, params);
            learning::append_transition(feats, basis, cfg.learning.d, t - 1, x, applied, x_next);
            learning::trim_front(feats, cfg.learning.t0);
            x = x_next;
            xbar = xbar_next;
        }
        feats.t = t;
        feats.x_now = x;
        model = learning::learn_model(feats, cfg.learning);
        ambiguity = learning::build_ambiguity(feats, basis, model.alpha, model, cfg.learning,
                                              applied);
        xbar_next = sim::oscillator_reference_step(xbar, params);
        *current = objectives::assemble_problem1(feats, basis, model.alpha, ambiguity,
                                                 xbar_next, cfg.mu);
        solver::OnlineProblem problem;
        problem.value_grad = [current](const Vector& v) {
            return objectives::problem1_value_grad(*current, v);
        };
        problem.lip = objectives::lipschitz_grad_constant(*current);
        problem.smooth_b = current->smoothing_params().b;
        return problem;
    };

    const auto observer = [&](const solver::StepRecord& rec, const solver::SolverState& state) {
        TrajectoryRow row;
        row.t = rec.t;
        row.x = x;
        row.u = rec.u;
        row.alpha = model.alpha;
        row.gamma = model.gamma;
        row.eps_hat =
            ambiguity.epsilon + model.gamma * learning::drift_term(feats, basis, rec.u);
        row.rho = ambiguity.rho;
        row.objective = rec.objective;

        if (cfg.regret) {
            DiagnosticsInput in;
            in.t = rec.t;
            in.u = rec.u;
            in.eps = rec.step_size;
            in.delta = state.delta_prev;
            in.lip = objectives::lipschitz_grad_constant(*current);
            in.a_mu = current->smoothing_params().a * cfg.mu;
            in.eps_hat = row.eps_hat;
            in.rho = row.rho;
            in.l_ustar_scale = 1.0; // state cost has unit Lipschitz constant
            in.l_ustar_norm = false;
            in.value_grad = [current](const Vector& v) {
                return objectives::problem1_value_grad(*current, v);
            };
            in.exact_value = [current](const Vector& v) {
                return objectives::problem1_exact_value(*current, v);
            };
            const Vector x_here = x;
            const Vector target = xbar_next;
            const Vector u_here = rec.u;
            in.sampler = [&mc_rng, x_here, u_here, params]() {
                const Vector w = sim::sample_noise(mc_rng, params.sigma, 2);
                return sim::oscillator_step(x_here, u_here, w, params);
            };
            const double mu = cfg.mu;
            in.loss = [target, mu](const Vector& u, const Vector& xs) {
                return 0.5 * u.squaredNorm() + smoothing::moreau_l2(xs - target, mu).value;
            };
            row.regret = tracker.update(in, set);
            row.rho_alt = learning::confidence_rho_alt(feats.length(), model.c, model.gamma,
                                                       cfg.learning.beta, 2);
        }

        shared.eps_hat_sum += row.eps_hat;
        shared.rho_sum += row.rho;
        shared.rho_min = std::min(shared.rho_min, row.rho);
        shared.record.rows.push_back(std::move(row));
    };

    try {
        solver::run_online(assemble, set, cfg.horizon, cfg.step_rule, cfg.mu, u0,
                           cfg.inner_steps, observer);
    } catch (const std::exception& e) {
        TrajectoryRecord partial = shared.record;
        partial.truncation = e.what();
        throw RunError(e.what(), static_cast<std::int64_t>(shared.record.rows.size()) + 1,
                       std::move(partial));
    }

    RunSummary summary;
    summary.scenario = cfg.scenario;
    summary.horizon = cfg.horizon;
    summary.seed = cfg.seed;
    const auto rows = static_cast<double>(shared.record.rows.size());
    summary.final_alpha = shared.record.rows.back().alpha;
    summary.mean_eps_hat = shared.eps_hat_sum / rows;
    summary.mean_rho = shared.rho_sum / rows;
    summary.min_rho = shared.rho_min;

    // controlled tracking error over the final fifth, against the reference
    const std::int64_t tail_start = cfg.horizon - cfg.horizon / 5 + 1;
    {
        double mse = 0.0;
        std::int64_t count = 0;
        Vector ref = params.x0;
        for (const auto& row : shared.record.rows) {
            ref = row.t == 1 ? sim::oscillator_reference_step(params.x0, params)
                             : sim::oscillator_reference_step(ref, params);
            if (row.t >= tail_start) {
                mse += (row.x - ref).squaredNorm();
                ++count;
            }
        }
        summary.tracking_mse = mse / static_cast<double>(count);
    }

    // uncontrolled baseline with the identical noise stream
    {
        std::mt19937_64 base_rng(cfg.seed);
        Vector xb = params.x0;
        Vector refb = params.x0;
        const Vector zero = Vector::Zero(2);
        double mse = 0.0;
        std::int64_t count = 0;
        for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
            const Vector w = sim::sample_noise(base_rng, params.sigma, 2);
            xb = sim::oscillator_step(xb, zero, w, params);
            refb = sim::oscillator_reference_step(refb, params);
            if (t >= tail_start) {
                mse += (xb - refb).squaredNorm();
                ++count;
            }
        }
        summary.tracking_mse_uncontrolled = mse / static_cast<double>(count);
    }

    return {std::move(shared.record), std::move(summary)};
}

RunResult run_allocation(const RunConfig& cfg) {
    sim::AllocationParams params = cfg.allocation;
    params.sigma = cfg.learning.sigma;
    const PredictorBasis basis = sim::allocation_basis(params);
    const solver::FeasibleSet set{solver::UnitSimplex{3}};
    const Vector u0 = Vector::Constant(3, 1.0 / 3.0);
    const std::vector<bool> noise_mask{false, false, true};

    std::mt19937_64 rng(cfg.seed);
    std::mt19937_64 mc_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    const sim::DriftSignal drift = sim::DriftSignal::piecewise_random(
        cfg.seed * 0x2545f4914f6cdd1dull + 1, cfg.horizon, params.switch_interval,
        params.drift_lo, params.drift_hi);

    Vector x = params.x0;
    learning::WindowFeatures feats;
    {
        const Vector w = sim::sample_noise(rng, params.sigma, 3, &noise_mask);
        const Vector x1 = sim::allocation_step(x, w, 0, drift, params);
        learning::append_transition(feats, basis, cfg.learning.d, 0, x, u0, x1);
        x = x1;
    }

    LoopShared shared;
    shared.record.n = 3;
    shared.record.m = 3;
    shared.record.p = 3;
    shared.record.has_regret = cfg.regret;
    RegretTracker tracker(cfg.learning.t0, cfg.regret_samples, u0);

    learning::LearnedModel model;
    learning::AmbiguitySet ambiguity;
    auto current = std::make_shared<objectives::Problem2Data>();
    double profit_sum = 0.0;

    const auto assemble = [&](std::int64_t t, const Vector& applied) -> solver::OnlineProblem {
        if (t > 1) {
            const Vector w = sim::sample_noise(rng, params.sigma, 3, &noise_mask);
            const Vector x_next = sim::allocation_step(x, w, t - 1, drift, params);
            learning::append_transition(feats, basis, cfg.learning.d, t - 1, x, applied, x_next);
            learning::trim_front(feats, cfg.learning.t0);
            x = x_next;
        }
        feats.t = t;
        feats.x_now = x;
        model = learning::learn_model(feats, cfg.learning);
        ambiguity = learning::build_ambiguity(feats, basis, model.alpha, model, cfg.learning,
                                              applied);
        *current = objectives::assemble_problem2(feats, basis, model.alpha, ambiguity,
                                                 params.r0, cfg.mu);
        solver::OnlineProblem problem;
        problem.value_grad = [current](const Vector& v) {
            return objectives::problem2_value_grad(*current, v);
        };
        problem.lip = objectives::lipschitz_grad_constant(*current);
        problem.smooth_b = current->smoothing_params().b;
        return problem;
    };

    const auto observer = [&](const solver::StepRecord& rec, const solver::SolverState& state) {
        TrajectoryRow row;
        row.t = rec.t;
        row.x = x;
        row.u = rec.u;
        row.alpha = model.alpha;
        row.gamma = model.gamma;
        row.eps_hat = ambiguity.radius; // control-independent drift for this basis
        row.rho = ambiguity.rho;
        row.objective = rec.objective;
        profit_sum += rec.u.dot(x);

        if (cfg.regret) {
            // exact curvature bound for the offline oracle: Euclidean point
            // norms and the envelope scale (the reported display constant
            // understates both)
            double two_norm_sum = 0.0;
            for (const auto& pt : current->points) two_norm_sum += pt.squaredNorm();
            const double oracle_lip =
                (current->q / params.r0 +
                 two_norm_sum / (params.r0 * params.r0 * current->length())) /
                cfg.mu;

            DiagnosticsInput in;
            in.t = rec.t;
            in.u = rec.u;
            in.eps = rec.step_size;
            in.delta = state.delta_prev;
            in.lip = oracle_lip;
            in.a_mu = current->smoothing_params().a * cfg.mu;
            in.eps_hat = row.eps_hat;
            in.rho = row.rho;
            in.l_ustar_scale = 1.0 / params.r0; // L(u) = ||u|| / r0
            in.l_ustar_norm = true;
            in.value_grad = [current](const Vector& v) {
                return objectives::problem2_value_grad(*current, v);
            };
            in.exact_value = [current](const Vector& v) {
                return objectives::problem2_exact_value(*current, v);
            };
            const Vector x_here = x;
            const std::int64_t t_here = rec.t;
            in.sampler = [&mc_rng, x_here, t_here, &drift, params, &noise_mask]() {
                const Vector w = sim::sample_noise(mc_rng, params.sigma, 3, &noise_mask);
                return sim::allocation_step(x_here, w, t_here, drift, params);
            };
            const double r0 = params.r0;
            in.loss = [r0](const Vector& u, const Vector& xs) {
                return std::max(0.0, 1.0 - u.dot(xs) / r0);
            };
            row.regret = tracker.update(in, set);
            row.rho_alt = learning::confidence_rho_alt(feats.length(), model.c, model.gamma,
                                                       cfg.learning.beta, 3);
        }

        shared.eps_hat_sum += row.eps_hat;
        shared.rho_sum += row.rho;
        shared.rho_min = std::min(shared.rho_min, row.rho);
        shared.record.rows.push_back(std::move(row));
    };

    try {
        solver::run_online(assemble, set, cfg.horizon, cfg.step_rule, cfg.mu, u0,
                           cfg.inner_steps, observer);
    } catch (const std::exception& e) {
        TrajectoryRecord partial = shared.record;
        partial.truncation = e.what();
        throw RunError(e.what(), static_cast<std::int64_t>(shared.record.rows.size()) + 1,
                       std::move(partial));
    }

    RunSummary summary;
    summary.scenario = cfg.scenario;
    summary.horizon = cfg.horizon;
    summary.seed = cfg.seed;
    const auto rows = static_cast<double>(shared.record.rows.size());
    summary.final_alpha = shared.record.rows.back().alpha;
    summary.mean_eps_hat = shared.eps_hat_sum / rows;
    summary.mean_rho = shared.rho_sum / rows;
    summary.min_rho = shared.rho_min;
    summary.mean_profit = profit_sum / rows;
    const auto& last = shared.record.rows.back();
    summary.final_profit = last.u.dot(last.x);
    return {std::move(shared.record), std::move(summary)};
}

} // namespace

RunResult run(const RunConfig& cfg) {
    const auto violations = validate(cfg);
    if (!violations.empty()) {
        std::string all;
        for (const auto& v : violations) all += (all.empty() ? "" : "; ") + v;
        throw InvalidInput("config: " + all);
    }
    if (cfg.scenario == "oscillator") return run_oscillator(cfg);
    return run_allocation(cfg);
}

std::vector<RunSummary> run_replications(const RunConfig& cfg,
                                         std::vector<RunResult>* results) {
    const int workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(),
                              static_cast<unsigned>(cfg.replications)));
    std::vector<RunSummary> summaries;
    summaries.reserve(static_cast<std::size_t>(cfg.replications));
    for (int base = 0; base < cfg.replications; base += workers) {
        std::vector<std::future<RunResult>> batch;
        for (int i = base; i < std::min(cfg.replications, base + workers); ++i) {
            RunConfig rep = cfg;
            rep.seed = cfg.seed + static_cast<std::uint64_t>(i);
            rep.replications = 1;
            batch.push_back(std::async(std::launch::async, [rep]() { return run(rep); }));
        }
        for (auto& f : batch) {
            RunResult result = f.get();
            summaries.push_back(result.summary);
            if (results) results->push_back(std::move(result));
        }
    }
    return summaries;
}

} // namespace odro::harness
