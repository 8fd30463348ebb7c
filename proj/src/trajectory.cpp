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

#include "odro/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace odro {

namespace {

using nlohmann::json;

constexpr const char* kRegretColumns[] = {"regret_bound", "regret_realized", "regret_stderr",
                                          "w_term",       "f_term",          "a_mu",
                                          "l_eps_hat",    "rho_alt"};

double parse_double(const std::string& field) {
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    return std::stod(field);
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vector_from_json(const json& arr) {
    Vector v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i];
    return v;
}

} // namespace

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::vector<std::string> csv_header(const TrajectoryRecord& record) {
    std::vector<std::string> header;
    header.emplace_back("t");
    for (int i = 0; i < record.n; ++i) header.push_back("x" + std::to_string(i));
    for (int i = 0; i < record.m; ++i) header.push_back("u" + std::to_string(i));
    for (int i = 0; i < record.p; ++i) header.push_back("alpha" + std::to_string(i));
    header.emplace_back("gamma");
    header.emplace_back("eps_hat");
    header.emplace_back("rho");
    header.emplace_back("objective");
    if (record.has_regret)
        for (const char* name : kRegretColumns) header.emplace_back(name);
    return header;
}

void write_csv(const TrajectoryRecord& record, std::ostream& out) {
    if (record.rows.empty()) throw InvalidInput("write_csv: empty record");
    const auto header = csv_header(record);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i == 0 ? "" : ",") << header[i];
    out << "\n";

    for (const auto& row : record.rows) {
        out << row.t;
        for (int i = 0; i < record.n; ++i) out << "," << format_double(row.x[i]);
        for (int i = 0; i < record.m; ++i) out << "," << format_double(row.u[i]);
        for (int i = 0; i < record.p; ++i) out << "," << format_double(row.alpha[i]);
        out << "," << format_double(row.gamma) << "," << format_double(row.eps_hat) << ","
            << format_double(row.rho) << "," << format_double(row.objective);
        if (record.has_regret) {
            const auto nan = std::numeric_limits<double>::quiet_NaN();
            const regret::RegretReport r =
                row.regret ? *row.regret : regret::RegretReport{row.t, nan, nan, nan, nan,
                                                                nan,   nan, nan, nan};
            out << "," << format_double(r.bound) << "," << format_double(r.realized) << ","
                << format_double(r.std_error) << "," << format_double(r.w_t) << ","
                << format_double(r.f_t) << "," << format_double(r.a_mu) << ","
                << format_double(r.l_eps_hat) << "," << format_double(row.rho_alt);
        }
        out << "\n";
    }
    if (!record.truncation.empty()) out << "# truncated: " << record.truncation << "\n";
}

void write_json(const TrajectoryRecord& record, std::ostream& out) {
    if (record.rows.empty()) throw InvalidInput("write_json: empty record");
    json root;
    root["schema"] = {{"n", record.n},
                      {"m", record.m},
                      {"p", record.p},
                      {"has_regret", record.has_regret}};
    if (!record.truncation.empty()) root["truncated"] = record.truncation;
    json rows = json::array();
    for (const auto& row : record.rows) {
        json jr;
        jr["t"] = row.t;
        jr["x"] = vector_to_json(row.x);
        jr["u"] = vector_to_json(row.u);
        jr["alpha"] = vector_to_json(row.alpha);
        jr["gamma"] = row.gamma;
        jr["eps_hat"] = row.eps_hat;
        jr["rho"] = row.rho;
        jr["objective"] = row.objective;
        if (record.has_regret) {
            jr["rho_alt"] = row.rho_alt;
            if (row.regret) {
                const auto& r = *row.regret;
                jr["regret"] = {{"regret_bound", r.bound},
                                {"regret_realized", r.realized},
                                {"regret_stderr", r.std_error},
                                {"w_term", r.w_t},
                                {"f_term", r.f_t},
                                {"a_mu", r.a_mu},
                                {"l_eps_hat", r.l_eps_hat}};
            } else {
                jr["regret"] = nullptr;
            }
        }
        rows.push_back(std::move(jr));
    }
    root["rows"] = std::move(rows);
    out << root.dump(2) << "\n";
}

TrajectoryRecord read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("read_csv: missing header");

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) header.push_back(field);
    }

    TrajectoryRecord record;
    for (const auto& name : header) {
        if (name.rfind('x', 0) == 0 && name != "x") record.n++;
        if (name.rfind('u', 0) == 0) record.m++;
        if (name.rfind("alpha", 0) == 0) record.p++;
        if (name == "regret_bound") record.has_regret = true;
    }

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# truncated:", 0) == 0) {
            record.truncation = line.size() > 13 ? line.substr(13) : "";
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != header.size()) throw InvalidInput("read_csv: ragged row");

        TrajectoryRow row;
        std::size_t at = 0;
        row.t = std::stoll(fields[at++]);
        row.x.resize(record.n);
        for (int i = 0; i < record.n; ++i) row.x[i] = parse_double(fields[at++]);
        row.u.resize(record.m);
        for (int i = 0; i < record.m; ++i) row.u[i] = parse_double(fields[at++]);
        row.alpha.resize(record.p);
        for (int i = 0; i < record.p; ++i) row.alpha[i] = parse_double(fields[at++]);
        row.gamma = parse_double(fields[at++]);
        row.eps_hat = parse_double(fields[at++]);
        row.rho = parse_double(fields[at++]);
        row.objective = parse_double(fields[at++]);
        if (record.has_regret) {
            regret::RegretReport r;
            r.t = row.t;
            r.bound = parse_double(fields[at++]);
            r.realized = parse_double(fields[at++]);
            r.std_error = parse_double(fields[at++]);
            r.w_t = parse_double(fields[at++]);
            r.f_t = parse_double(fields[at++]);
            r.a_mu = parse_double(fields[at++]);
            r.l_eps_hat = parse_double(fields[at++]);
            row.rho_alt = parse_double(fields[at++]);
            // an all-nan block marks a step before diagnostics start
            if (!std::isnan(r.bound) || !std::isnan(r.realized) || !std::isnan(r.w_t))
                row.regret = r;
        }
        record.rows.push_back(std::move(row));
    }
    return record;
}

TrajectoryRecord read_json(std::istream& in) {
    json root = json::parse(in);
    TrajectoryRecord record;
    record.n = root["schema"]["n"];
    record.m = root["schema"]["m"];
    record.p = root["schema"]["p"];
    record.has_regret = root["schema"]["has_regret"];
    if (root.contains("truncated")) record.truncation = root["truncated"];
    for (const auto& jr : root["rows"]) {
        TrajectoryRow row;
        row.t = jr["t"];
        row.x = vector_from_json(jr["x"]);
        row.u = vector_from_json(jr["u"]);
        row.alpha = vector_from_json(jr["alpha"]);
        row.gamma = jr["gamma"].is_null() ? std::numeric_limits<double>::quiet_NaN()
                                          : jr["gamma"].get<double>();
        row.eps_hat = jr["eps_hat"];
        row.rho = jr["rho"];
        row.objective = jr["objective"];
        if (record.has_regret) {
            if (jr.contains("rho_alt")) row.rho_alt = jr["rho_alt"];
            if (jr.contains("regret") && !jr["regret"].is_null()) {
                const auto& r = jr["regret"];
                regret::RegretReport report;
                report.t = row.t;
                report.bound = r["regret_bound"];
                report.realized = r["regret_realized"];
                report.std_error = r["regret_stderr"];
                report.w_t = r["w_term"];
                report.f_t = r["f_term"];
                report.a_mu = r["a_mu"];
                report.l_eps_hat = r["l_eps_hat"];
                row.regret = report;
            }
        }
        record.rows.push_back(std::move(row));
    }
    return record;
}

void export_record(const TrajectoryRecord& record, const std::string& format,
                   const std::string& path) {
    if (record.rows.empty()) throw InvalidInput("export: empty record");
    if (format != "csv" && format != "json")
        throw InvalidInput("export: unknown format '" + format + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("export: cannot open '" + path + "' for writing");
    if (format == "csv")
        write_csv(record, out);
    else
        write_json(record, out);
    out.flush();
    if (!out) throw InvalidInput("export: write to '" + path + "' failed");
}

TrajectoryRecord import_record(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("import: cannot open '" + path + "'");
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return read_json(in);
    return read_csv(in);
}

} // namespace odro
