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

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "dpre/parallel.hpp"
#include "dpre/rng.hpp"
#include "dpre/stats.hpp"

namespace {

std::vector<double> sample(std::size_t n)
{
    dpre::Variates v(3, dpre::StreamDomain::chains, 9);
    std::vector<double> xs(n);
    for (auto& x : xs) {
        x = 5.0 + 2.0 * v.normal();
    }
    return xs;
}

} // namespace

TEST(RunningStats, MatchesTwoPass)
{
    const auto xs = sample(1000);
    dpre::RunningStats s;
    for (double x : xs) {
        s.push(x);
    }
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    EXPECT_EQ(s.count(), 1000u);
    EXPECT_NEAR(s.mean(), mean, 1e-12);
    EXPECT_NEAR(s.variance(), ss / 999.0, 1e-10);
    EXPECT_NEAR(s.std_error(), std::sqrt(ss / 999.0 / 1000.0), 1e-12);
}

TEST(RunningStats, EmptyAndSingle)
{
    dpre::RunningStats s;
    EXPECT_EQ(s.std_error(), 0.0);
    s.push(4.0);
    EXPECT_EQ(s.mean(), 4.0);
    EXPECT_EQ(s.variance(), 0.0);
    dpre::RunningStats empty;
    s.merge(empty);
    EXPECT_EQ(s.count(), 1u);
    empty.merge(s);
    EXPECT_EQ(empty.mean(), 4.0);
}

TEST(RunningStats, MergeMatchesSequential)
{
    const auto xs = sample(777);
    dpre::RunningStats all;
    std::vector<dpre::RunningStats> parts(10);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        all.push(xs[i]);
        parts[i * parts.size() / xs.size()].push(xs[i]);
    }
    const auto merged = dpre::pairwise_merge(parts);
    EXPECT_EQ(merged.count(), all.count());
    EXPECT_NEAR(merged.mean(), all.mean(), 1e-12);
    EXPECT_NEAR(merged.variance(), all.variance(), 1e-10);
    const auto again = dpre::pairwise_merge(parts);
    EXPECT_EQ(again.mean(), merged.mean());
    EXPECT_EQ(again.variance(), merged.variance());
}

TEST(RunIndexed, RunsEveryTaskOnce)
{
    for (unsigned workers : {1u, 2u, 5u}) {
        std::vector<std::atomic<int>> hits(100);
        dpre::run_indexed(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
        for (const auto& h : hits) {
            EXPECT_EQ(h.load(), 1);
        }
    }
}

TEST(RunIndexed, RethrowsLowestFailingIndex)
{
    for (unsigned workers : {1u, 4u}) {
        try {
            dpre::run_indexed(50, workers, [](std::size_t i) {
                if (i == 7 || i == 30) {
                    throw std::runtime_error("task " + std::to_string(i));
                }
            });
            FAIL() << "expected an exception";
        } catch (const std::runtime_error& e) {
            EXPECT_STREQ(e.what(), "task 7");
        }
    }
}

TEST(RunIndexed, ZeroTasks)
{
    EXPECT_NO_THROW(dpre::run_indexed(0, 3, [](std::size_t) { FAIL(); }));
}
