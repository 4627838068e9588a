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

#include <cmath>

#include <gtest/gtest.h>

#include "dpre/path_sampler.hpp"
#include "dpre/stats.hpp"

using dpre::Beta;
using dpre::ChainPath;
using dpre::EnvironmentGrid;
using dpre::JumpCellRule;

namespace {

ChainPath fixed_path(double horizon, std::vector<double> jumps)
{
    ChainPath p;
    p.horizon = horizon;
    p.jump_times = std::move(jumps);
    return p;
}

dpre::Variates bridge_rng(std::uint64_t stream = 0)
{
    return dpre::Variates(1, dpre::StreamDomain::bridge, stream);
}

dpre::ModelParams params(double beta, double horizon)
{
    dpre::ModelParams p;
    p.beta = Beta(beta);
    p.horizon = horizon;
    p.master_seed = 5;
    return p;
}

} // namespace

TEST(Chain, PathStructure)
{
    const ChainPath p = dpre::sample_chain(20.0, 1, 0);
    ASSERT_FALSE(p.jump_times.empty());
    EXPECT_EQ(p.start, 1);
    double prev = 0.0;
    for (double t : p.jump_times) {
        EXPECT_GT(t, prev);
        EXPECT_LE(t, 20.0);
        prev = t;
    }
    EXPECT_EQ(p.state_at(0.0), 1);
    EXPECT_EQ(p.state_at(p.jump_times[0]), 2);
    EXPECT_EQ(p.final_state(), p.jump_times.size() % 2 == 0 ? 1 : 2);
    EXPECT_EQ(p.state_after(3), 2);
}

TEST(Chain, RejectsBadHorizon)
{
    dpre::Variates v(1, dpre::StreamDomain::chains, 0);
    EXPECT_THROW(dpre::sample_chain(0.0, v), std::invalid_argument);
    EXPECT_THROW(dpre::sample_chain(-1.0, v), std::invalid_argument);
}

TEST(Chain, MeanJumpCountEqualsHorizon)
{
    dpre::Variates v(2, dpre::StreamDomain::chains, 0);
    dpre::RunningStats jumps;
    for (int i = 0; i < 100000; ++i) {
        jumps.push(static_cast<double>(dpre::sample_chain(10.0, v).jump_times.size()));
    }
    EXPECT_LT(std::abs(jumps.mean() - 10.0), 3.0 * jumps.std_error());
}

TEST(Chain, NoJumpProbability)
{
    dpre::Variates v(3, dpre::StreamDomain::chains, 0);
    dpre::RunningStats none;
    for (int i = 0; i < 100000; ++i) {
        none.push(dpre::sample_chain(1.0, v).jump_times.empty() ? 1.0 : 0.0);
    }
    EXPECT_LT(std::abs(none.mean() - std::exp(-1.0)), 3.0 * none.std_error());
}

TEST(Chain, OccupationTendsToOneHalf)
{
    dpre::Variates v(4, dpre::StreamDomain::chains, 0);
    dpre::RunningStats occ;
    for (int i = 0; i < 10000; ++i) {
        occ.push(dpre::sample_chain(50.0, v).occupation_of_first() / 50.0);
    }
    // Start in state 1 biases the fraction by (1 - e^{-2T}) / (4T).
    EXPECT_NEAR(occ.mean(), 0.5 + 1.0 / 200.0, 4.0 * occ.std_error());
    EXPECT_NEAR(fixed_path(2.0, {0.5, 1.5}).occupation_of_first(), 1.0, 1e-15);
}

TEST(Environment, ReproducibleAndIndependent)
{
    const auto a = EnvironmentGrid::generate(1.0, 0.01, 9, 3);
    const auto b = EnvironmentGrid::generate(1.0, 0.01, 9, 3);
    const auto c = EnvironmentGrid::generate(1.0, 0.01, 9, 4);
    EXPECT_EQ(a.cells(), 100u);
    EXPECT_NEAR(a.horizon(), 1.0, 1e-12);
    EXPECT_TRUE((a.knots() == b.knots()).all());
    EXPECT_FALSE((a.knots() == c.knots()).all());
    EXPECT_NE(a.increment(1, 0), a.increment(2, 0));
    EXPECT_THROW(EnvironmentGrid::generate(1.0, 0.3, 9, 0), std::invalid_argument);
}

TEST(Environment, IncrementStatistics)
{
    const auto env = EnvironmentGrid::generate(100.0, 0.01, 2, 0);
    dpre::RunningStats inc;
    for (std::size_t k = 0; k < env.cells(); ++k) {
        inc.push(env.increment(1, k) / 0.1);
        inc.push(env.increment(2, k) / 0.1);
    }
    EXPECT_NEAR(inc.mean(), 0.0, 4.0 * inc.std_error());
    EXPECT_NEAR(inc.variance(), 1.0, 0.03);
}

TEST(Environment, HalvesSumToCellIncrement)
{
    const auto env = EnvironmentGrid::generate(0.5, 0.05, 2, 1);
    for (std::size_t k = 0; k < env.cells(); ++k) {
        const auto n = env.cell_noise(k);
        EXPECT_NEAR(n.total()[0], env.increment(1, k), 1e-15);
        EXPECT_NEAR(n.total()[1], env.increment(2, k), 1e-15);
    }
}

TEST(Environment, CoarseningKeepsThePaths)
{
    const auto fine = EnvironmentGrid::generate(1.0, 0.1, 3, 2);
    const auto coarse = fine.coarsened();
    EXPECT_EQ(coarse.cells(), 5u);
    EXPECT_DOUBLE_EQ(coarse.dt_env(), 0.2);
    EXPECT_EQ(coarse.index(), 2u);
    for (std::size_t k = 0; k < coarse.cells(); ++k) {
        EXPECT_NEAR(coarse.increment(1, k), fine.increment(1, 2 * k) + fine.increment(1, 2 * k + 1), 1e-14);
        EXPECT_EQ(coarse.cell_noise(k).first_half[1], fine.increment(2, 2 * k));
    }
    EXPECT_THROW(coarse.coarsened(), std::invalid_argument);
}

TEST(Environment, FromKnotsValidation)
{
    EXPECT_THROW(EnvironmentGrid::from_knots(0.1, Eigen::ArrayX2d::Zero(2, 2)), std::invalid_argument);
    Eigen::ArrayX2d k = Eigen::ArrayX2d::Ones(3, 2);
    EXPECT_THROW(EnvironmentGrid::from_knots(0.1, k), std::invalid_argument);
}

TEST(Hamiltonian, NoJumpReadsSiteOne)
{
    const auto env = EnvironmentGrid::generate(2.0, 0.01, 7, 0);
    auto rng = bridge_rng();
    const auto path = fixed_path(2.0, {});
    double s = 0.0;
    for (std::size_t k = 0; k < env.cells(); ++k) {
        s += env.increment(1, k);
    }
    EXPECT_NEAR(dpre::hamiltonian(path, env, JumpCellRule::bridge, rng), s, 1e-12);
    EXPECT_NEAR(dpre::hamiltonian(path, env, JumpCellRule::midpoint, rng), s, 1e-12);
}

TEST(Hamiltonian, ZeroEnvironmentGivesZero)
{
    const auto env = EnvironmentGrid::from_knots(0.1, Eigen::ArrayX2d::Zero(21, 2));
    auto rng = bridge_rng();
    const auto path = fixed_path(1.0, {0.123, 0.5, 0.77});
    // The bridge still fluctuates between zero knots; the midpoint rule does not.
    EXPECT_EQ(dpre::hamiltonian(path, env, JumpCellRule::midpoint, rng), 0.0);
    EXPECT_NEAR(dpre::hamiltonian(path, env, JumpCellRule::bridge, rng), 0.0, 0.5);
}

TEST(Hamiltonian, JumpsOnKnotsNeedNoBridge)
{
    // Knots every 1/16; all times below are exact multiples.
    const auto env = EnvironmentGrid::generate(1.0, 0.125, 7, 1);
    auto rng = bridge_rng();
    const auto path = fixed_path(1.0, {0.25, 0.375, 0.8125});
    const auto& k = env.knots();
    const double expected = k(4, 0) + (k(6, 1) - k(4, 1)) + (k(13, 0) - k(6, 0)) + (k(16, 1) - k(13, 1));
    EXPECT_NEAR(dpre::hamiltonian(path, env, JumpCellRule::bridge, rng), expected, 1e-14);
    EXPECT_NEAR(dpre::hamiltonian(path, env, JumpCellRule::midpoint, rng), expected, 1e-14);
}

TEST(Hamiltonian, RejectsPathBeyondEnvironment)
{
    const auto env = EnvironmentGrid::generate(1.0, 0.1, 7, 1);
    auto rng = bridge_rng();
    EXPECT_THROW(dpre::hamiltonian(fixed_path(1.5, {}), env, JumpCellRule::bridge, rng), std::invalid_argument);
}

TEST(Hamiltonian, GaussianWithVarianceT)
{
    // Fixed path with jumps inside cells; over environments H ~ N(0, T).
    const auto path = fixed_path(1.0, {0.137, 0.512, 0.803});
    auto rng = bridge_rng(3);
    dpre::RunningStats h;
    dpre::RunningStats h2;
    for (std::uint64_t e = 0; e < 40000; ++e) {
        const auto env = EnvironmentGrid::generate(1.0, 0.1, 11, e);
        const double x = dpre::hamiltonian(path, env, JumpCellRule::bridge, rng);
        h.push(x);
        h2.push(x * x);
    }
    EXPECT_LT(std::abs(h.mean()), 4.0 * h.std_error());
    EXPECT_LT(std::abs(h2.mean() - 1.0), 4.0 * h2.std_error());
}

TEST(Partition, ZeroBetaIsExact)
{
    const double T = 0.7;
    const auto env = EnvironmentGrid::generate(T, 0.01, 5, 0);
    const auto est = dpre::estimate_partition(params(0.0, T), 100000, env);
    EXPECT_EQ(est.z_total, 1.0);
    EXPECT_TRUE(est.degenerate);
    EXPECT_EQ(est.std_err, 0.0);
    EXPECT_NEAR(est.z_to[0], 0.5 * (1.0 + std::exp(-2.0 * T)), 3.0 * est.z_to_std_err[0]);
    EXPECT_NEAR(est.z_to[1], 0.5 * (1.0 - std::exp(-2.0 * T)), 3.0 * est.z_to_std_err[1]);
}

TEST(Partition, DecompositionAndErrors)
{
    const auto env = EnvironmentGrid::generate(1.0, 0.01, 5, 2);
    const auto est = dpre::estimate_partition(params(1.0, 1.0), 1000, env);
    EXPECT_EQ(est.z_total, est.z_to[0] + est.z_to[1]);
    EXPECT_EQ(est.n_paths, 1000u);
    EXPECT_FALSE(est.degenerate);
    EXPECT_GT(est.std_err, 0.0);
    EXPECT_THROW(dpre::estimate_partition(params(1.0, 1.0), 1, env), std::invalid_argument);
    EXPECT_THROW(dpre::estimate_partition(params(1.0, 2.0), 100, env), std::invalid_argument);
}

TEST(Partition, ReplicasAreIndependent)
{
    const auto env = EnvironmentGrid::generate(1.0, 0.01, 5, 2);
    const auto a = dpre::estimate_partition(params(1.0, 1.0), 500, env, {JumpCellRule::bridge, 0});
    const auto b = dpre::estimate_partition(params(1.0, 1.0), 500, env, {JumpCellRule::bridge, 1});
    const auto c = dpre::estimate_partition(params(1.0, 1.0), 500, env, {JumpCellRule::bridge, 0});
    EXPECT_NE(a.z_total, b.z_total);
    EXPECT_EQ(a.z_total, c.z_total);
}

TEST(Partition, UnbiasedOverEnvironments)
{
    dpre::RunningStats z;
    for (std::uint64_t e = 0; e < 400; ++e) {
        const auto env = EnvironmentGrid::generate(1.0, 0.01, 8, e);
        z.push(dpre::estimate_partition(params(1.0, 1.0), 500, env).z_total);
    }
    EXPECT_LT(std::abs(z.mean() - 1.0), 3.5 * z.std_error());
}

TEST(Partition, AgreesWithSdeInTheSameEnvironment)
{
    const double T = 2.0;
    const auto p = params(0.5, T);
    for (std::uint64_t e = 0; e < 3; ++e) {
        const auto env = EnvironmentGrid::generate(T, 1e-3, 6, e);
        const auto est = dpre::estimate_partition(p, 50000, env);
        const auto x = dpre::solve_in_environment(p.beta, env, dpre::StepScheme::splitting, T).x;
        for (int i = 0; i < 2; ++i) {
            EXPECT_LT(std::abs(est.z_to[i] - x[i]) / x[i], 0.05) << e << ' ' << i;
            EXPECT_LT(std::abs(est.z_to[i] - x[i]), 5.0 * est.z_to_std_err[i] + 0.01 * x[i]) << e << ' ' << i;
        }
    }
}

TEST(Partition, SolveInEnvironmentAtZeroBeta)
{
    const auto env = EnvironmentGrid::generate(1.0, 0.01, 2, 0);
    const auto s = dpre::solve_in_environment(Beta(0.0), env, dpre::StepScheme::splitting, 1.0);
    EXPECT_NEAR(s.x[0] - s.x[1], std::exp(-2.0), 1e-13);
    EXPECT_THROW(dpre::solve_in_environment(Beta(0.0), env, dpre::StepScheme::splitting, 1.5), std::invalid_argument);
}
