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

// Feynman-Kac estimates of Z_t and Z_t(1, y): average the weight
// exp(b H_t(w) - t b^2 / 2) over rate-1 two-state chain paths w, where
// H_t(w) = int_0^t dB_{w(s)}(s) is read off a fixed sampled environment.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dpre/params.hpp"
#include "dpre/rng.hpp"
#include "dpre/sde.hpp"

namespace dpre {

/// Piecewise-constant path on {1, 2}: starts at `start` and flips at each
/// jump time.
struct ChainPath {
    int start = 1;
    double horizon = 0.0;
    std::vector<double> jump_times;  ///< strictly increasing, in (0, horizon]

    int state_after(std::size_t jumps) const { return (jumps % 2 == 0) ? start : 3 - start; }
    int final_state() const { return state_after(jump_times.size()); }
    int state_at(double t) const;
    /// Time spent in state 1 on [0, horizon].
    double occupation_of_first() const;
};

/// Chain from state 1 with i.i.d. Exp(1) holding times, cut at the horizon.
ChainPath sample_chain(double horizon, Variates& rng);
ChainPath sample_chain(double horizon, std::uint64_t master_seed, std::uint64_t stream);

/// Two independent Brownian motions known at every half cell: knot j sits at
/// time j * dt_env / 2. A cell increment is the difference of knots 2k+2 and
/// 2k; the middle knot splits it into the two half-step increments the
/// splitting scheme consumes.
class EnvironmentGrid {
public:
    /// Samples a fresh environment on [0, horizon]; site i uses the stream
    /// 2 * env_index + i of the environment domain.
    static EnvironmentGrid generate(double horizon, double dt_env, std::uint64_t master_seed,
                                    std::uint64_t env_index);
    /// Builds from explicit knot values (rows 2n+1, first row zero).
    static EnvironmentGrid from_knots(double dt_env, Eigen::ArrayX2d knots, std::uint64_t env_index = 0);

    /// The same Brownian paths seen at twice the cell width.
    EnvironmentGrid coarsened() const;

    double dt_env() const { return dt_env_; }
    std::size_t cells() const { return static_cast<std::size_t>(knots_.rows() - 1) / 2; }
    double horizon() const { return dt_env_ * static_cast<double>(cells()); }
    std::uint64_t index() const { return index_; }
    const Eigen::ArrayX2d& knots() const { return knots_; }

    /// Increment of B_site over cell k, site in {1, 2}.
    double increment(int site, std::size_t cell) const;
    NoiseIncrement<double> cell_noise(std::size_t cell) const;

private:
    EnvironmentGrid(double dt_env, Eigen::ArrayX2d knots, std::uint64_t index)
        : dt_env_(dt_env), knots_(std::move(knots)), index_(index)
    {
    }

    double dt_env_;
    Eigen::ArrayX2d knots_;
    std::uint64_t index_;
};

/// How the part of the environment between knots is read when a path jumps.
enum class JumpCellRule {
    /// Sample the Brownian values at jump times from the bridge between the
    /// surrounding known points. Exact in law given the knots.
    bridge,
    /// Charge every knot interval to the state occupied at its midpoint.
    /// O(dt_env) bias; no extra randomness.
    midpoint,
};

/// H_T(path) for T = path.horizon. Throws std::invalid_argument if the path
/// outlives the environment. `bridge_rng` is only used by the bridge rule.
double hamiltonian(const ChainPath& path, const EnvironmentGrid& env, JumpCellRule rule, Variates& bridge_rng);

struct PartitionEstimate {
    double z_total = 0.0;                ///< z_to[0] + z_to[1]
    std::array<double, 2> z_to{};        ///< Z_T(1, 1), Z_T(1, 2)
    std::array<double, 2> z_to_std_err{};
    double std_err = 0.0;                ///< of z_total
    std::size_t n_paths = 0;
    bool degenerate = false;             ///< all weights identical (e.g. b = 0)
};

struct PartitionOptions {
    JumpCellRule rule = JumpCellRule::bridge;
    /// Selects an independent set of chains for the same environment.
    /// Chains use stream env_index * 1024 + replica.
    std::uint32_t replica = 0;
};

/// Monte Carlo Feynman-Kac estimate on [0, params.horizon] with fresh chains
/// drawn for this environment from params.master_seed.
PartitionEstimate estimate_partition(const ModelParams& params, std::size_t n_chains, const EnvironmentGrid& env,
                                     PartitionOptions options = {});

/// Integrates the SDE with step dt_env driven by the environment's own
/// increments, up to `horizon` (a whole number of cells).
PolymerState<double> solve_in_environment(const Beta& beta, const EnvironmentGrid& env, StepScheme scheme,
                                          double horizon);

} // namespace dpre
