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

#include "dpre/path_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpre/stats.hpp"

namespace dpre {

namespace {

constexpr std::uint64_t kReplicasPerEnvironment = 1024;

std::size_t whole_cells(double horizon, double dt_env)
{
    const double r = horizon / dt_env;
    const double k = std::round(r);
    if (k < 1.0 || std::abs(r - k) > 1e-9 * k) {
        throw std::invalid_argument("horizon must be a whole number of environment cells");
    }
    return static_cast<std::size_t>(k);
}

// Reads B_1, B_2 at increasing times, sampling bridges between knots and any
// point already sampled inside the same knot interval.
class BridgeReader {
public:
    BridgeReader(const EnvironmentGrid& env, Variates& rng) : env_(env), rng_(rng), h_(env.dt_env() / 2.0) {}

    Pair<double> at(double s)
    {
        const auto& knots = env_.knots();
        const auto last_interval = static_cast<std::size_t>(knots.rows() - 2);
        const auto j = std::min(static_cast<std::size_t>(s / h_), last_interval);
        const double t_left = static_cast<double>(j) * h_;
        if (s == t_left) {
            return knots.row(static_cast<Eigen::Index>(j)).transpose();
        }
        const double t_right = static_cast<double>(j + 1) * h_;
        const Pair<double> right = knots.row(static_cast<Eigen::Index>(j + 1)).transpose();
        if (!have_point_ || interval_ != j) {
            point_t_ = t_left;
            point_ = knots.row(static_cast<Eigen::Index>(j)).transpose();
        }
        const double w = (s - point_t_) / (t_right - point_t_);
        const double sd = std::sqrt((s - point_t_) * (t_right - s) / (t_right - point_t_));
        point_ = point_ + w * (right - point_) + sd * Pair<double>(rng_.normal(), rng_.normal());
        point_t_ = s;
        interval_ = j;
        have_point_ = true;
        return point_;
    }

private:
    const EnvironmentGrid& env_;
    Variates& rng_;
    double h_;
    bool have_point_ = false;
    std::size_t interval_ = 0;
    double point_t_ = 0.0;
    Pair<double> point_ = Pair<double>::Zero();
};

double hamiltonian_bridge(const ChainPath& path, const EnvironmentGrid& env, Variates& rng)
{
    BridgeReader reader(env, rng);
    Pair<double> previous = Pair<double>::Zero();
    double h = 0.0;
    int site = path.start - 1;
    auto charge = [&](double s) {
        const Pair<double> now = reader.at(s);
        h += now[site] - previous[site];
        previous = now;
    };
    for (double s : path.jump_times) {
        if (s >= path.horizon) {
            break;
        }
        charge(s);
        site = 1 - site;
    }
    charge(path.horizon);
    return h;
}

double hamiltonian_midpoint(const ChainPath& path, const EnvironmentGrid& env)
{
    const auto& knots = env.knots();
    const double h_knot = env.dt_env() / 2.0;
    const auto n_intervals = static_cast<double>(knots.rows() - 1);
    // Knot intervals with midpoint in [s, ...) start at this index.
    auto first_interval = [&](double s) {
        return static_cast<Eigen::Index>(std::clamp(std::ceil(s / h_knot - 0.5), 0.0, n_intervals));
    };
    double h = 0.0;
    double seg_start = 0.0;
    int site = path.start - 1;
    auto charge = [&](double seg_end) {
        const auto a = first_interval(seg_start);
        const auto b = first_interval(seg_end);
        h += knots(b, site) - knots(a, site);
    };
    for (double s : path.jump_times) {
        if (s >= path.horizon) {
            break;
        }
        charge(s);
        seg_start = s;
        site = 1 - site;
    }
    charge(path.horizon);
    return h;
}

} // namespace

int ChainPath::state_at(double t) const
{
    const auto jumps = std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin();
    return state_after(static_cast<std::size_t>(jumps));
}

double ChainPath::occupation_of_first() const
{
    double total = 0.0;
    double from = 0.0;
    for (std::size_t k = 0; k <= jump_times.size(); ++k) {
        const double to = k < jump_times.size() ? std::min(jump_times[k], horizon) : horizon;
        if (state_after(k) == 1) {
            total += to - from;
        }
        from = to;
    }
    return total;
}

ChainPath sample_chain(double horizon, Variates& rng)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("sample_chain: horizon must be positive and finite");
    }
    ChainPath path;
    path.horizon = horizon;
    double t = rng.exponential();
    while (t <= horizon) {
        path.jump_times.push_back(t);
        t += rng.exponential();
    }
    return path;
}

ChainPath sample_chain(double horizon, std::uint64_t master_seed, std::uint64_t stream)
{
    Variates rng(master_seed, StreamDomain::chains, stream);
    return sample_chain(horizon, rng);
}

EnvironmentGrid EnvironmentGrid::generate(double horizon, double dt_env, std::uint64_t master_seed,
                                          std::uint64_t env_index)
{
    if (!(dt_env > 0.0) || !std::isfinite(dt_env)) {
        throw std::invalid_argument("environment cell width must be positive and finite");
    }
    const std::size_t n = whole_cells(horizon, dt_env);
    Eigen::ArrayX2d knots(static_cast<Eigen::Index>(2 * n + 1), 2);
    const double sd_cell = std::sqrt(dt_env);
    for (int site = 0; site < 2; ++site) {
        Variates rng(master_seed, StreamDomain::environment, 2 * env_index + static_cast<std::uint64_t>(site));
        knots(0, site) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto left = static_cast<Eigen::Index>(2 * k);
            const double db = sd_cell * rng.normal();
            const double mid_dev = 0.5 * sd_cell * rng.normal();  // bridge sd at the midpoint
            knots(left + 1, site) = knots(left, site) + 0.5 * db + mid_dev;
            knots(left + 2, site) = knots(left, site) + db;
        }
    }
    return EnvironmentGrid(dt_env, std::move(knots), env_index);
}

EnvironmentGrid EnvironmentGrid::from_knots(double dt_env, Eigen::ArrayX2d knots, std::uint64_t env_index)
{
    if (!(dt_env > 0.0) || knots.rows() < 3 || knots.rows() % 2 == 0) {
        throw std::invalid_argument("environment needs dt_env > 0 and 2n+1 knot rows, n >= 1");
    }
    if (knots(0, 0) != 0.0 || knots(0, 1) != 0.0) {
        throw std::invalid_argument("Brownian motions must start at 0");
    }
    return EnvironmentGrid(dt_env, std::move(knots), env_index);
}

EnvironmentGrid EnvironmentGrid::coarsened() const
{
    if (cells() % 2 != 0) {
        throw std::invalid_argument("coarsening needs an even number of cells");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(cells() + 1);
    Eigen::ArrayX2d coarse(rows, 2);
    for (Eigen::Index r = 0; r < rows; ++r) {
        coarse.row(r) = knots_.row(2 * r);
    }
    return EnvironmentGrid(2.0 * dt_env_, std::move(coarse), index_);
}

double EnvironmentGrid::increment(int site, std::size_t cell) const
{
    const auto k = static_cast<Eigen::Index>(2 * cell);
    return knots_(k + 2, site - 1) - knots_(k, site - 1);
}

NoiseIncrement<double> EnvironmentGrid::cell_noise(std::size_t cell) const
{
    const auto k = static_cast<Eigen::Index>(2 * cell);
    NoiseIncrement<double> inc;
    inc.first_half = (knots_.row(k + 1) - knots_.row(k)).transpose();
    inc.second_half = (knots_.row(k + 2) - knots_.row(k + 1)).transpose();
    return inc;
}

double hamiltonian(const ChainPath& path, const EnvironmentGrid& env, JumpCellRule rule, Variates& bridge_rng)
{
    if (path.horizon > env.horizon() * (1.0 + 1e-12)) {
        throw std::invalid_argument("hamiltonian: path extends beyond the environment");
    }
    return rule == JumpCellRule::bridge ? hamiltonian_bridge(path, env, bridge_rng)
                                        : hamiltonian_midpoint(path, env);
}

PartitionEstimate estimate_partition(const ModelParams& params, std::size_t n_chains, const EnvironmentGrid& env,
                                     PartitionOptions options)
{
    if (n_chains < 2) {
        throw std::invalid_argument("estimate_partition needs at least 2 chains");
    }
    if (options.replica >= kReplicasPerEnvironment) {
        throw std::invalid_argument("replica index out of range");
    }
    const std::uint64_t stream = env.index() * kReplicasPerEnvironment + options.replica;
    Variates chains(params.master_seed, StreamDomain::chains, stream);
    Variates bridges(params.master_seed, StreamDomain::bridge, stream);
    const double b = params.beta.value();
    const double ito = 0.5 * params.beta.squared() * params.horizon;

    RunningStats total;
    std::array<RunningStats, 2> to;
    std::array<CompensatedSum, 2> sums;
    for (std::size_t i = 0; i < n_chains; ++i) {
        const ChainPath path = sample_chain(params.horizon, chains);
        const double w = std::exp(b * hamiltonian(path, env, options.rule, bridges) - ito);
        const int end = path.final_state();
        total.push(w);
        to[0].push(end == 1 ? w : 0.0);
        to[1].push(end == 2 ? w : 0.0);
        sums[static_cast<std::size_t>(end - 1)].add(w);
    }

    PartitionEstimate est;
    const double n = static_cast<double>(n_chains);
    est.z_to = {sums[0].value() / n, sums[1].value() / n};
    est.z_to_std_err = {to[0].std_error(), to[1].std_error()};
    est.z_total = est.z_to[0] + est.z_to[1];
    est.std_err = total.std_error();
    est.n_paths = n_chains;
    est.degenerate = total.variance() == 0.0;
    return est;
}

PolymerState<double> solve_in_environment(const Beta& beta, const EnvironmentGrid& env, StepScheme scheme,
                                          double horizon)
{
    const std::size_t n = whole_cells(horizon, env.dt_env());
    if (n > env.cells()) {
        throw std::invalid_argument("solve_in_environment: horizon exceeds the environment");
    }
    const Stepper<double> stepper(beta, env.dt_env(), scheme);
    PolymerState<double> state;
    for (std::size_t k = 0; k < n; ++k) {
        stepper.advance(state, env.cell_noise(k));
    }
    return state;
}

} // namespace dpre
