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

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "odro/harness.hpp"

namespace {

using nlohmann::json;
using odro::harness::RunConfig;

// option order matters: scenario resets defaults, so it is applied first
struct PendingOptions {
    std::vector<std::pair<std::string, std::string>> assignments;

    void add(CLI::App* app, const std::string& flag, const std::string& key,
             const std::string& description) {
        app->add_option_function<std::string>(
               flag,
               [this, key](const std::string& value) { assignments.emplace_back(key, value); },
               description)
            ->type_name("VALUE");
    }
};

std::string insert_replication_suffix(const std::string& path, int index) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return path + "_rep" + std::to_string(index);
    return path.substr(0, dot) + "_rep" + std::to_string(index) + path.substr(dot);
}

json summary_json(const odro::harness::RunSummary& summary, const std::string& out_path) {
    json j = json::parse(odro::harness::summary_to_json(summary));
    j["out"] = out_path;
    return j;
}

int do_run(RunConfig cfg) {
    const auto violations = odro::harness::validate(cfg);
    if (!violations.empty()) {
        std::cout << json{{"error", "invalid configuration"}, {"violations", violations}}.dump(2)
                  << "\n";
        return 2;
    }

    if (cfg.replications == 1) {
        const std::string out_path = odro::harness::default_out_path(cfg);
        try {
            odro::harness::RunResult result = odro::harness::run(cfg);
            odro::export_record(result.record, cfg.format, out_path);
            std::cout << summary_json(result.summary, out_path).dump(2) << "\n";
            return 0;
        } catch (const odro::harness::RunError& e) {
            json err{{"error", e.what()}, {"step", e.step()}};
            if (!e.partial().rows.empty()) {
                odro::export_record(e.partial(), cfg.format, out_path);
                err["partial_output"] = out_path;
            }
            std::cout << err.dump(2) << "\n";
            return 1;
        }
    }

    try {
        std::vector<odro::harness::RunResult> results;
        const auto summaries = odro::harness::run_replications(cfg, &results);
        json merged = json::array();
        const std::string base_path = odro::harness::default_out_path(cfg);
        for (std::size_t i = 0; i < summaries.size(); ++i) {
            const std::string rep_path = insert_replication_suffix(base_path,
                                                                   static_cast<int>(i));
            odro::export_record(results[i].record, cfg.format, rep_path);
            merged.push_back(summary_json(summaries[i], rep_path));
        }
        std::cout << json{{"replications", merged}}.dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump(2) << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online distributionally robust optimization simulator"};
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "Run a seeded closed-loop experiment");
    std::string config_path;
    run_cmd->add_option("--config", config_path, "Flat key = value configuration file");
    PendingOptions pending;
    pending.add(run_cmd, "--scenario", "scenario", "oscillator | allocation");
    pending.add(run_cmd, "--horizon", "horizon", "Number of decision steps");
    pending.add(run_cmd, "--seed", "seed", "Random seed");
    pending.add(run_cmd, "--beta", "beta", "Confidence level in (0,1)");
    pending.add(run_cmd, "--theta", "theta", "Slack parameter >= 0");
    pending.add(run_cmd, "--sigma", "sigma", "Noise scale (assumed and simulated)");
    pending.add(run_cmd, "--d", "d", "Regularization norm bound");
    pending.add(run_cmd, "--a0-const", "a0_const", "Concentration constant");
    pending.add(run_cmd, "--t0", "t0", "Window horizon T0");
    pending.add(run_cmd, "--mu", "mu", "Smoothing scale");
    pending.add(run_cmd, "--step-rule", "step_rule", "inverse-lipschitz | monotone");
    pending.add(run_cmd, "--inner-steps", "inner_steps", "Solver updates per decision");
    pending.add(run_cmd, "--out", "out", "Output path");
    pending.add(run_cmd, "--format", "format", "csv | json");
    pending.add(run_cmd, "--regret", "regret", "Enable regret diagnostics (true/false)");
    pending.add(run_cmd, "--regret-samples", "regret_samples", "Monte-Carlo samples per step");
    pending.add(run_cmd, "--replications", "replications", "Independent seeded runs");
    pending.add(run_cmd, "--switch-interval", "switch_interval", "Drift switch period");
    pending.add(run_cmd, "--drift-lo", "drift_lo", "Lower drift bound");
    pending.add(run_cmd, "--drift-hi", "drift_hi", "Upper drift bound");
    pending.add(run_cmd, "--r0", "r0", "Target profit");

    // --- validate ------------------------------------------------------------
    auto* validate_cmd = app.add_subcommand("validate", "Check a configuration file");
    std::string validate_path;
    validate_cmd->add_option("config", validate_path, "Configuration file")->required();

    // --- export --------------------------------------------------------------
    auto* export_cmd = app.add_subcommand("export", "Convert a trajectory file");
    std::string export_in, export_format{"csv"}, export_out;
    export_cmd->add_option("input", export_in, "Trajectory file (csv or json)")->required();
    export_cmd->add_option("--format", export_format, "csv | json");
    export_cmd->add_option("--out", export_out, "Output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            RunConfig cfg = config_path.empty() ? odro::harness::default_config("oscillator")
                                                : odro::harness::load_config_file(config_path);
            // scenario switch first: it resets the scenario defaults
            for (const auto& [key, value] : pending.assignments)
                if (key == "scenario") odro::harness::apply_key_value(cfg, key, value);
            for (const auto& [key, value] : pending.assignments)
                if (key != "scenario") odro::harness::apply_key_value(cfg, key, value);
            return do_run(std::move(cfg));
        }
        if (validate_cmd->parsed()) {
            const RunConfig cfg = odro::harness::load_config_file(validate_path);
            const auto violations = odro::harness::validate(cfg);
            std::cout << json{{"violations", violations}}.dump(2) << "\n";
            return violations.empty() ? 0 : 2;
        }
        if (export_cmd->parsed()) {
            const auto record = odro::import_record(export_in);
            odro::export_record(record, export_format, export_out);
            std::cout << json{{"out", export_out}, {"rows", record.rows.size()}}.dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump(2) << "\n";
        return 1;
    }
    return 0;
}
