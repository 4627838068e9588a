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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dpre/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args)
{
    const std::string cmd = std::string(DPRE_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.out.append(buf, n);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("dpre_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) {
            fields.push_back(f);
        }
        rows.push_back(fields);
    }
    return rows;
}

} // namespace

TEST(Cli, AnalyticZeroBeta)
{
    const auto r = run("analytic --beta 0");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][2], "0.5");
    EXPECT_EQ(rows[1][4], "0");
    EXPECT_EQ(rows[1][6], "1");
}

TEST(Cli, AnalyticBetaOne)
{
    const auto r = run("analytic --beta 1");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv_rows(r.out);
    EXPECT_NEAR(std::stod(rows[1][2]), 0.542573, 1e-6);
    EXPECT_NEAR(std::stod(rows[1][4]), -0.271287, 1e-6);
    EXPECT_NEAR(std::stod(rows[1][5]), 4.372, 1e-3);
}

TEST(Cli, AnalyticGridIsIncreasing)
{
    const auto r = run("analytic --beta 1 2 4");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_LT(std::stod(rows[1][2]), std::stod(rows[2][2]));
    EXPECT_LT(std::stod(rows[2][2]), std::stod(rows[3][2]));
}

TEST(Cli, AnalyticJson)
{
    const auto r = run("analytic --beta 0.5 --format json");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\"alpha_minus\""), std::string::npos);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run("analytic --beta -1").code, 2);
    EXPECT_EQ(run("analytic").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("simulate --scheme rk4").code, 2);
    EXPECT_EQ(run("simulate --dt 0.01 --stride 0.015").code, 2);
    EXPECT_EQ(run("simulate --horizon 0.5 --stride 0.1").code, 2);
    EXPECT_EQ(run("simulate --paths 0").code, 2);
    EXPECT_EQ(run("simulate --beta nan").code, 2);
    EXPECT_EQ(run("sweep").code, 2);
    EXPECT_EQ(run("sweep --beta").code, 2);
    EXPECT_EQ(run("verify --level medium").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, SimulateIsDeterministic)
{
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    const std::string args = "simulate --beta 1 --paths 10000 --horizon 5 --seed 42 --out ";
    ASSERT_EQ(run(args + a.string() + " --workers 1").code, 0);
    ASSERT_EQ(run(args + b.string() + " --workers 3").code, 0);
    EXPECT_EQ(slurp(a / "curve.csv"), slurp(b / "curve.csv"));
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_FALSE(slurp(a / "curve.csv").empty());
}

TEST(Cli, SimulateSummaryLine)
{
    const auto r = run("simulate --beta 1 --paths 200 --horizon 1");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("beta=1 alpha_hat=", 0), 0u);
    EXPECT_NE(r.out.find(" p="), std::string::npos);
}

TEST(Cli, SimulateZeroBeta)
{
    const fs::path d = fresh_dir("zero");
    ASSERT_EQ(run("simulate --beta 0 --paths 4 --horizon 5 --out " + d.string()).code, 0);
    std::ifstream in(d / "curve.csv");
    const auto c = dpre::read_curve_csv(in);
    ASSERT_EQ(c.times.size(), 51u);
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        EXPECT_NEAR(c.overlap.mean[k], 0.5 * (1.0 + std::exp(-4.0 * c.times[k])), 1e-6);
    }
}

TEST(Cli, MissingOutputDirectory)
{
    const fs::path d = fresh_dir("missing");
    const fs::path target = d / "absent";
    EXPECT_EQ(run("simulate --paths 10 --horizon 1 --out " + target.string()).code, 1);
    EXPECT_FALSE(fs::exists(target));
    EXPECT_TRUE(fs::is_empty(d));
}

TEST(Cli, ConfigFile)
{
    const fs::path d = fresh_dir("config");
    {
        std::ofstream cfg(d / "good.toml");
        cfg << "[simulate]\nbeta = 0.5\npaths = 50\nhorizon = 1.0\n";
    }
    {
        std::ofstream cfg(d / "bad.toml");
        cfg << "[simulate]\nbeta = 0.5\ntemperature = 3\n";
    }
    const auto good = run("--config " + (d / "good.toml").string() + " simulate");
    EXPECT_EQ(good.code, 0);
    EXPECT_EQ(good.out.rfind("beta=0.5 ", 0), 0u);
    EXPECT_EQ(run("--config " + (d / "bad.toml").string() + " simulate").code, 2);
}

TEST(Cli, SweepTable)
{
    const fs::path d = fresh_dir("sweep");
    ASSERT_EQ(run("sweep --beta 0.25 0.5 1 2 --paths 100 --horizon 1 --out " + d.string()).code, 0);
    const auto rows = csv_rows(slurp(d / "sweep.csv"));
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0][0], "beta");
    for (std::size_t i = 2; i < rows.size(); ++i) {
        EXPECT_LT(std::stod(rows[i][9]), std::stod(rows[i - 1][9]));
    }
    for (const char* b : {"beta_0.25", "beta_0.5", "beta_1", "beta_2"}) {
        EXPECT_TRUE(fs::exists(d / b / "curve.csv")) << b;
        EXPECT_TRUE(fs::exists(d / b / "report.json")) << b;
    }
}

TEST(Cli, SweepOfOneMatchesSimulate)
{
    const fs::path s = fresh_dir("one_sim");
    const fs::path w = fresh_dir("one_sweep");
    const std::string common = " --beta 1 --paths 300 --horizon 2 --out ";
    ASSERT_EQ(run("simulate" + common + s.string()).code, 0);
    ASSERT_EQ(run("sweep" + common + w.string()).code, 0);
    EXPECT_EQ(slurp(s / "curve.csv"), slurp(w / "beta_1" / "curve.csv"));
    EXPECT_EQ(slurp(s / "report.json"), slurp(w / "beta_1" / "report.json"));
}

TEST(Cli, VerifySelectedCriteria)
{
    const auto r = run("verify --criterion 1 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("PASS   1"), std::string::npos);
    EXPECT_NE(r.out.find("PASS   2"), std::string::npos);
}
