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

// The acceptance suite: ten numbered criteria checked against closed forms,
// the moment oracle and the path-sampling oracle.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dpre {

enum class VerifyLevel { quick, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::full;
    unsigned workers = 0;
    std::uint64_t master_seed = 42;
    /// Criterion ids to run; empty runs all of them.
    std::vector<int> only;
    /// Progress messages, if set.
    std::ostream* log = nullptr;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

std::vector<CriterionResult> run_verification(const VerifyOptions& options);

/// One line per criterion: PASS/FAIL, id, name, measured vs tolerance, detail.
void print_table(std::ostream& os, const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

/// Smallest root of 3 b^2 x^2 - (5 b^2 + 4) x + 2 (1 + b^2) on [0, 1] by
/// bisection on the expanded polynomial. Independent of solve_alpha.
double bisect_alpha_minus(double beta, double tol = 1e-15);

/// Least-squares slope of log(error) against log(dt).
double log_log_slope(const std::vector<double>& dt, const std::vector<double>& error);

} // namespace dpre
