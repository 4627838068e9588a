/*
   Copyright 2026 The dpre Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "dpre/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace dpre {

namespace {

using nlohmann::ordered_json;

ordered_json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"std_err", e.std_err}}; }

ordered_json analytic_json(const AnalyticSolution<double>& s)
{
    auto finite_or_null = [](double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); };
    return {{"beta", s.beta},
            {"a", finite_or_null(s.a)},
            {"alpha_minus", s.alpha_minus},
            {"alpha_plus", finite_or_null(s.alpha_plus)},
            {"free_energy", s.free_energy},
            {"rate_lambda", s.rate_lambda},
            {"is_limit", s.is_limit}};
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    return out;
}

double parse_double(const std::string& s, std::size_t line_no)
{
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw std::runtime_error("curve csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return x;
}

} // namespace

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_curve_csv(std::ostream& os, const EnsembleCurve& curve)
{
    os << kCurveHeader << '\n';
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
        os << format_double(curve.times[k]) << ',' << format_double(curve.overlap.mean[k]) << ','
           << format_double(curve.overlap.std_err[k]) << ',' << format_double(curve.z.mean[k]) << ','
           << format_double(curve.z.std_err[k]) << ',' << format_double(curve.log_z.mean[k]) << ','
           << format_double(curve.log_z.std_err[k]) << ',' << format_double(curve.n.mean[k]) << ','
           << format_double(curve.z2.mean[k]) << '\n';
    }
}

std::string curve_csv(const EnsembleCurve& curve)
{
    std::ostringstream os;
    write_curve_csv(os, curve);
    return os.str();
}

EnsembleCurve read_curve_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kCurveHeader) {
        throw std::runtime_error("curve csv: missing or unexpected header");
    }
    EnsembleCurve curve;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = split_fields(line);
        if (f.size() != 9) {
            throw std::runtime_error("curve csv line " + std::to_string(line_no) + ": expected 9 fields");
        }
        curve.times.push_back(parse_double(f[0], line_no));
        curve.overlap.mean.push_back(parse_double(f[1], line_no));
        curve.overlap.std_err.push_back(parse_double(f[2], line_no));
        curve.z.mean.push_back(parse_double(f[3], line_no));
        curve.z.std_err.push_back(parse_double(f[4], line_no));
        curve.log_z.mean.push_back(parse_double(f[5], line_no));
        curve.log_z.std_err.push_back(parse_double(f[6], line_no));
        curve.n.mean.push_back(parse_double(f[7], line_no));
        curve.z2.mean.push_back(parse_double(f[8], line_no));
    }
    // Not part of the file format.
    curve.n.std_err.assign(curve.times.size(), 0.0);
    curve.z2.std_err.assign(curve.times.size(), 0.0);
    return curve;
}

std::string report_json(const ModelParams& params, const EnsembleCurve& curve, const ConvergenceReport& report)
{
    ordered_json j;
    j["params"] = {{"beta", params.beta.value()},
                   {"dt", params.dt},
                   {"horizon", params.horizon},
                   {"paths", params.n_paths},
                   {"scheme", std::string(to_string(params.scheme))},
                   {"stride", params.output_stride},
                   {"seed", params.master_seed}};
    j["analytic"] = analytic_json(solve_alpha(params.beta));
    j["convergence"] = {
        {"overlap_limit_hat", report.overlap_limit_hat},
        {"overlap_limit_se", report.overlap_limit_se},
        {"alpha_minus_ref", report.alpha_minus_ref},
        {"abs_error", report.abs_error},
        {"rate_hat", report.rate_hat ? ordered_json(*report.rate_hat) : ordered_json(nullptr)},
        {"rate_window", report.rate_window},
        {"rate_ref", report.rate_ref},
        {"lower_bound_margin", report.lower_bound_margin},
        {"envelope_margin", report.envelope_margin},
    };
    j["free_energy"] = {{"direct", estimate_json(report.free_energy.direct)},
                        {"via_overlap", estimate_json(report.free_energy.via_overlap)},
                        {"extrapolated", estimate_json(report.free_energy.extrapolated)},
                        {"reference", report.fe_ref}};
    j["run"] = {{"n_paths", curve.n_paths}, {"clamp_events", curve.clamp_events}};
    return j.dump(2) + "\n";
}

std::string analytic_table_csv(const std::vector<AnalyticSolution<double>>& rows)
{
    std::ostringstream os;
    os << "beta,a,alpha_minus,alpha_plus,free_energy,rate_lambda,is_limit\n";
    for (const auto& r : rows) {
        os << format_double(r.beta) << ',' << format_double(r.a) << ',' << format_double(r.alpha_minus) << ','
           << format_double(r.alpha_plus) << ',' << format_double(r.free_energy) << ','
           << format_double(r.rate_lambda) << ',' << (r.is_limit ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string analytic_table_json(const std::vector<AnalyticSolution<double>>& rows)
{
    ordered_json j = ordered_json::array();
    for (const auto& r : rows) {
        j.push_back(analytic_json(r));
    }
    return j.dump(2) + "\n";
}

void write_files_atomically(const std::vector<std::pair<std::filesystem::path, std::string>>& files)
{
    namespace fs = std::filesystem;
    std::vector<fs::path> staged;
    auto discard = [&] {
        std::error_code ec;
        for (const auto& p : staged) {
            fs::remove(p, ec);
        }
    };
    for (const auto& [path, contents] : files) {
        const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
        if (!fs::is_directory(dir)) {
            discard();
            throw std::runtime_error("output directory does not exist: " + dir.string());
        }
        fs::path tmp = path;
        tmp += ".partial";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (out) {
            staged.push_back(tmp);
            out << contents;
            out.close();
        }
        if (!out) {
            discard();
            throw std::runtime_error("cannot write " + path.string());
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::error_code ec;
        fs::rename(staged[i], files[i].first, ec);
        if (ec) {
            discard();
            throw std::runtime_error("cannot move " + staged[i].string() + " into place: " + ec.message());
        }
    }
}

} // namespace dpre
