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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dpre/analytic.hpp"
#include "dpre/params.hpp"
#include "dpre/stats.hpp"

namespace dpre {

/// Per-time ensemble mean and its standard error.
struct Series {
    std::vector<double> mean;
    std::vector<double> std_err;
};

/// Path-level functionals whose standard errors cannot be rebuilt from the
/// per-time series (they are correlated across times). Only available for
/// curves produced by run_ensemble, not for curves read back from CSV.
struct PathSummaries {
    std::size_t tail_begin = 0;          ///< first index of the final-20% window
    std::size_t mid_index = 0;           ///< index of the output time nearest T/2
    Estimate overlap_time_average;       ///< (1/T) int_0^T I_t dt, trapezoid rule
    Estimate overlap_tail_average;       ///< mean of I over the tail window
    Estimate log_z_late_slope;           ///< (log Z_T - log Z_mid) / (T - t_mid)
};

struct EnsembleCurve {
    std::vector<double> times;
    Series overlap;  ///< estimates u(t) = E[I_t]
    Series z;
    Series log_z;
    Series n;
    Series z2;
    std::size_t n_paths = 0;
    std::uint64_t clamp_events = 0;
    std::optional<PathSummaries> summaries;
};

/// Paths per reduction block. Fixed, so partial sums never depend on the
/// number of workers.
inline constexpr std::size_t kPathsPerBlock = 256;

/// Simulates params.n_paths independent paths and averages Z, log Z, N, Z^2
/// and the overlap at every output time. Bit-identical for any worker count.
/// Throws PathError for the lowest-indexed failing path.
EnsembleCurve run_ensemble(const ModelParams& params, unsigned workers = 0);

/// First index of the tail window (times >= 80% of the horizon).
std::size_t tail_window_begin(const std::vector<double>& times);

struct FreeEnergyEstimates {
    Estimate direct;        ///< E[log Z_T] / T
    Estimate via_overlap;   ///< -(b^2/2) (1/T) int_0^T u(t) dt
    Estimate extrapolated;  ///< (E[log Z_T] - E[log Z_{T/2}]) / (T/2)
};

/// Requires a curve starting at t = 0 with at least 10 output times.
FreeEnergyEstimates free_energy_estimators(const EnsembleCurve& curve, const Beta& beta);

struct ConvergenceReport {
    double beta = 0.0;
    double overlap_limit_hat = 0.0;  ///< mean of u over the final 20% of times
    double overlap_limit_se = 0.0;
    double alpha_minus_ref = 0.0;
    double abs_error = 0.0;          ///< |overlap_limit_hat - alpha_minus_ref|
    std::optional<double> rate_hat;  ///< fitted decay exponent of u - alpha_-
    std::size_t rate_window = 0;     ///< points used in the rate fit
    double rate_ref = 0.0;           ///< lambda
    FreeEnergyEstimates free_energy;
    double fe_ref = 0.0;
    /// min_t (u - alpha_- + 3 SE); >= 0 iff u(t) >= alpha_- - 3 SE everywhere.
    double lower_bound_margin = 0.0;
    /// min_t ((1 - alpha_-) e^{-lambda t} + 3 SE - (u - alpha_-)); >= 0 iff
    /// the exponential envelope holds everywhere.
    double envelope_margin = 0.0;

    bool lower_bound_holds() const { return lower_bound_margin >= 0.0; }
    bool envelope_holds() const { return envelope_margin >= 0.0; }
};

/// Compares an ensemble curve with the closed-form solution. The rate is fitted
/// by least squares on log(u - alpha_-) over the leading window where the
/// excess exceeds 5 standard errors; it is absent when that window has fewer
/// than 3 points.
ConvergenceReport fit_convergence(const EnsembleCurve& curve, const AnalyticSolution<double>& analytic);

} // namespace dpre
