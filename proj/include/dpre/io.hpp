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

#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dpre/analytic.hpp"
#include "dpre/ensemble.hpp"
#include "dpre/params.hpp"

namespace dpre {

/// Header of the curve CSV, one row per output time.
inline constexpr const char* kCurveHeader =
    "t,mean_overlap,se_overlap,mean_z,se_z,mean_log_z,se_log_z,mean_n,mean_z2";

/// Doubles are written with 17 significant digits so that reading back
/// reproduces them exactly.
std::string format_double(double x);

void write_curve_csv(std::ostream& os, const EnsembleCurve& curve);
std::string curve_csv(const EnsembleCurve& curve);

/// Parses a curve written by write_curve_csv. Only the CSV columns are
/// restored (no path summaries, n_paths = 0). Throws std::runtime_error on
/// malformed input.
EnsembleCurve read_curve_csv(std::istream& is);

/// Run report: parameters, convergence report and run metadata as JSON.
std::string report_json(const ModelParams& params, const EnsembleCurve& curve, const ConvergenceReport& report);

/// One row per beta: a, alpha_-, alpha_+, p(beta), lambda, limit flag.
std::string analytic_table_csv(const std::vector<AnalyticSolution<double>>& rows);
std::string analytic_table_json(const std::vector<AnalyticSolution<double>>& rows);

/// Writes every (path, contents) pair or none of them: contents go to
/// temporary siblings first and are renamed into place only when all writes
/// succeeded. Throws std::runtime_error on failure.
void write_files_atomically(const std::vector<std::pair<std::filesystem::path, std::string>>& files);

} // namespace dpre
