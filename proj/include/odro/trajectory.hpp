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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "odro/regret.hpp"
#include "odro/types.hpp"

namespace odro {

/// One decision step of a closed-loop run.
struct TrajectoryRow {
    std::int64_t t{0};
    Vector x;
    Vector u;
    Vector alpha;
    double gamma{0.0};
    double eps_hat{0.0};
    double rho{0.0};
    double objective{0.0};
    std::optional<regret::RegretReport> regret;
    double rho_alt{0.0}; // alternate confidence form, emitted with regret columns
};

/**
 * Column order of the CSV schema (JSON mirrors the field names):
 *   t, x0..x{n-1}, u0..u{m-1}, alpha0..alpha{p-1}, gamma, eps_hat, rho,
 *   objective, and with regret diagnostics enabled additionally
 *   regret_bound, regret_realized, regret_stderr, w_term, f_term, a_mu,
 *   l_eps_hat, rho_alt.
 * Floating-point values are serialized with 17 significant digits so files
 * round-trip bit-exactly.
 */
struct TrajectoryRecord {
    int n{0};
    int m{0};
    int p{0};
    bool has_regret{false};
    std::vector<TrajectoryRow> rows;
    std::string truncation; // non-empty when a run ended early; carries the reason
};

std::vector<std::string> csv_header(const TrajectoryRecord& record);

void write_csv(const TrajectoryRecord& record, std::ostream& out);
void write_json(const TrajectoryRecord& record, std::ostream& out);

TrajectoryRecord read_csv(std::istream& in);
TrajectoryRecord read_json(std::istream& in);

/// Writes the record to `path` as "csv" or "json". Throws on an empty
/// record, unknown format, or unwritable path.
void export_record(const TrajectoryRecord& record, const std::string& format,
                   const std::string& path);

TrajectoryRecord import_record(const std::string& path);

/// 17-significant-digit representation used across all text output.
std::string format_double(double value);

} // namespace odro
