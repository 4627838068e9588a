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

#include "dpre/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpre/parallel.hpp"
#include "dpre/simulate.hpp"

namespace dpre {

namespace {

enum SeriesIndex : std::size_t { kOverlap, kZ, kLogZ, kN, kZ2, kSeriesCount };

struct BlockResult {
    std::vector<RunningStats> series;  // [time * kSeriesCount + series]
    RunningStats time_average;
    RunningStats tail_average;
    RunningStats late_slope;
    std::uint64_t clamps = 0;
};

double trapezoid(const std::vector<double>& t, const std::vector<double>& y)
{
    double acc = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        acc += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
    }
    return acc;
}

Series collect(const std::vector<RunningStats>& merged, std::size_t n_out, SeriesIndex which)
{
    Series s;
    s.mean.resize(n_out);
    s.std_err.resize(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const RunningStats& r = merged[k * kSeriesCount + which];
        s.mean[k] = r.mean();
        s.std_err[k] = r.std_error();
    }
    return s;
}

} // namespace

std::size_t tail_window_begin(const std::vector<double>& times)
{
    if (times.empty()) {
        return 0;
    }
    const double cut = times.front() + 0.8 * (times.back() - times.front());
    const auto it = std::lower_bound(times.begin(), times.end(), cut - 1e-12 * std::abs(times.back()));
    return static_cast<std::size_t>(it - times.begin());
}

EnsembleCurve run_ensemble(const ModelParams& params, unsigned workers)
{
    params.validate();
    const std::size_t n_out = params.output_intervals() + 1;

    EnsembleCurve curve;
    curve.times.resize(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        curve.times[k] = params.output_time(k);
    }
    const std::size_t tail_begin = tail_window_begin(curve.times);
    const std::size_t mid = params.output_intervals() / 2;
    const double horizon = curve.times.back();
    const double late_span = horizon - curve.times[mid];

    const std::size_t n_blocks = (params.n_paths + kPathsPerBlock - 1) / kPathsPerBlock;
    std::vector<BlockResult> blocks(n_blocks);

    run_indexed(n_blocks, workers, [&](std::size_t b) {
        BlockResult& out = blocks[b];
        out.series.assign(n_out * kSeriesCount, RunningStats{});
        const std::size_t first = b * kPathsPerBlock;
        const std::size_t last = std::min(params.n_paths, first + kPathsPerBlock);
        for (std::size_t p = first; p < last; ++p) {
            double integral = 0.0;
            double previous_overlap = 0.0;
            double tail_sum = 0.0;
            double log_z_mid = 0.0;
            double log_z_end = 0.0;
            out.clamps += visit_path(params, p, [&](std::size_t k, const PolymerState<double>& state) {
                Observables<double> obs;
                try {
                    obs = derive_observables(state);
                } catch (const std::domain_error& e) {
                    throw PathError(p, state.t, e.what());
                }
                RunningStats* slot = &out.series[k * kSeriesCount];
                slot[kOverlap].push(obs.overlap);
                slot[kZ].push(obs.z);
                slot[kLogZ].push(obs.log_z);
                slot[kN].push(obs.n);
                slot[kZ2].push(obs.z * obs.z);
                if (k > 0) {
                    integral += 0.5 * (curve.times[k] - curve.times[k - 1]) * (obs.overlap + previous_overlap);
                }
                previous_overlap = obs.overlap;
                if (k >= tail_begin) {
                    tail_sum += obs.overlap;
                }
                if (k == mid) {
                    log_z_mid = obs.log_z;
                }
                log_z_end = obs.log_z;
            });
            out.time_average.push(integral / horizon);
            out.tail_average.push(tail_sum / static_cast<double>(n_out - tail_begin));
            if (late_span > 0.0) {
                out.late_slope.push((log_z_end - log_z_mid) / late_span);
            }
        }
    });

    // Pairwise merge over blocks, in block order, for every accumulator.
    std::vector<RunningStats> merged(n_out * kSeriesCount);
    std::vector<RunningStats> column(n_blocks);
    for (std::size_t slot = 0; slot < merged.size(); ++slot) {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            column[b] = blocks[b].series[slot];
        }
        merged[slot] = pairwise_merge(column);
    }
    auto merge_field = [&](RunningStats BlockResult::*field) {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            column[b] = blocks[b].*field;
        }
        return to_estimate(pairwise_merge(column));
    };

    curve.overlap = collect(merged, n_out, kOverlap);
    curve.z = collect(merged, n_out, kZ);
    curve.log_z = collect(merged, n_out, kLogZ);
    curve.n = collect(merged, n_out, kN);
    curve.z2 = collect(merged, n_out, kZ2);
    curve.n_paths = params.n_paths;
    for (const auto& b : blocks) {
        curve.clamp_events += b.clamps;
    }

    PathSummaries summaries;
    summaries.tail_begin = tail_begin;
    summaries.mid_index = mid;
    summaries.overlap_time_average = merge_field(&BlockResult::time_average);
    summaries.overlap_tail_average = merge_field(&BlockResult::tail_average);
    summaries.log_z_late_slope = merge_field(&BlockResult::late_slope);
    curve.summaries = summaries;
    return curve;
}

FreeEnergyEstimates free_energy_estimators(const EnsembleCurve& curve, const Beta& beta)
{
    const std::size_t n_out = curve.times.size();
    if (n_out < 10) {
        throw std::invalid_argument("free energy estimators need at least 10 output times");
    }
    if (curve.times.front() != 0.0) {
        throw std::invalid_argument("free energy estimators need a curve starting at t = 0");
    }
    const double horizon = curve.times.back();
    const double half_b2 = beta.squared() / 2.0;
    const std::size_t mid = curve.summaries ? curve.summaries->mid_index : (n_out - 1) / 2;
    const double late_span = horizon - curve.times[mid];

    FreeEnergyEstimates fe;
    fe.direct = {curve.log_z.mean.back() / horizon, curve.log_z.std_err.back() / horizon};
    fe.via_overlap.mean = -half_b2 * trapezoid(curve.times, curve.overlap.mean) / horizon;
    fe.extrapolated.mean = (curve.log_z.mean.back() - curve.log_z.mean[mid]) / late_span;
    if (curve.summaries) {
        fe.via_overlap.std_err = half_b2 * curve.summaries->overlap_time_average.std_err;
        fe.extrapolated.std_err = curve.summaries->log_z_late_slope.std_err;
    } else {
        // Conservative: ignores the (positive) correlation across times.
        fe.via_overlap.std_err = half_b2 * trapezoid(curve.times, curve.overlap.std_err) / horizon;
        fe.extrapolated.std_err = std::hypot(curve.log_z.std_err.back(), curve.log_z.std_err[mid]) / late_span;
    }
    return fe;
}

ConvergenceReport fit_convergence(const EnsembleCurve& curve, const AnalyticSolution<double>& analytic)
{
    const std::size_t n_out = curve.times.size();
    if (n_out < 10) {
        throw std::invalid_argument("convergence fit needs at least 10 output times");
    }
    const auto& u = curve.overlap.mean;
    const auto& se = curve.overlap.std_err;
    const double alpha = analytic.alpha_minus;

    ConvergenceReport rep;
    rep.beta = analytic.beta;
    rep.alpha_minus_ref = alpha;
    rep.rate_ref = analytic.rate_lambda;
    rep.fe_ref = analytic.free_energy;

    const std::size_t tail = curve.summaries ? curve.summaries->tail_begin : tail_window_begin(curve.times);
    double tail_mean = 0.0;
    double tail_se = 0.0;
    for (std::size_t k = tail; k < n_out; ++k) {
        tail_mean += u[k];
        tail_se += se[k];
    }
    const double tail_len = static_cast<double>(n_out - tail);
    rep.overlap_limit_hat = tail_mean / tail_len;
    rep.overlap_limit_se = curve.summaries ? curve.summaries->overlap_tail_average.std_err : tail_se / tail_len;
    rep.abs_error = std::abs(rep.overlap_limit_hat - alpha);

    // Noise-gated least squares on log(u - alpha).
    std::size_t window = 0;
    while (window < n_out && u[window] - alpha > 5.0 * se[window]) {
        ++window;
    }
    rep.rate_window = window;
    if (window >= 3) {
        double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
        for (std::size_t k = 0; k < window; ++k) {
            const double t = curve.times[k];
            const double y = std::log(u[k] - alpha);
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        const double m = static_cast<double>(window);
        const double slope = (m * sty - st * sy) / (m * stt - st * st);
        rep.rate_hat = -slope;
    }

    rep.lower_bound_margin = std::numeric_limits<double>::infinity();
    rep.envelope_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_out; ++k) {
        const double excess = u[k] - alpha;
        const double envelope = (1.0 - alpha) * std::exp(-analytic.rate_lambda * curve.times[k]);
        rep.lower_bound_margin = std::min(rep.lower_bound_margin, excess + 3.0 * se[k]);
        rep.envelope_margin = std::min(rep.envelope_margin, envelope + 3.0 * se[k] - excess);
    }

    rep.free_energy = free_energy_estimators(curve, Beta(analytic.beta));
    return rep;
}

} // namespace dpre
