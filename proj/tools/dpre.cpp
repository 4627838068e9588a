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

// dpre: closed-form tables, ensemble runs, sweeps and the acceptance suite.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dpre/analytic.hpp"
#include "dpre/ensemble.hpp"
#include "dpre/io.hpp"
#include "dpre/simulate.hpp"
#include "dpre/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a run needs; mirrors ModelParams plus output controls.
struct RunConfig {
    std::vector<double> betas{1.0};
    double dt = 1e-3;
    double horizon = 10.0;
    std::size_t paths = 10000;
    std::string scheme = "splitting";
    std::uint64_t seed = 42;
    double stride = 0.1;
    std::string out;
    std::string format = "csv";
    unsigned workers = 0;
    bool verbose = false;

    dpre::ModelParams params(double beta) const
    {
        dpre::ModelParams p;
        p.beta = dpre::Beta(beta);
        p.dt = dt;
        p.horizon = horizon;
        p.n_paths = paths;
        const auto s = dpre::parse_scheme(scheme);
        if (!s) {
            throw UsageError("unknown scheme '" + scheme + "'");
        }
        p.scheme = *s;
        p.output_stride = stride;
        p.master_seed = seed;
        return p;
    }

    // Checks every beta before anything runs.
    std::vector<dpre::ModelParams> validated() const
    {
        if (betas.empty()) {
            throw UsageError("at least one beta is required");
        }
        std::vector<dpre::ModelParams> all;
        for (double b : betas) {
            dpre::ModelParams p;
            try {
                p = params(b);
                p.validate();
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            if (p.output_intervals() + 1 < 10) {
                throw UsageError("horizon / stride must give at least 10 output times");
            }
            all.push_back(p);
        }
        return all;
    }
};

void add_model_options(CLI::App& cmd, RunConfig& cfg, bool many_betas)
{
    if (many_betas) {
        cmd.add_option("--beta", cfg.betas, "Inverse temperature grid")->required()->expected(1, -1);
    } else {
        cmd.add_option("--beta", cfg.betas, "Inverse temperature")->expected(1)->capture_default_str();
    }
    cmd.add_option("--dt", cfg.dt, "Time step")->capture_default_str();
    cmd.add_option("--horizon", cfg.horizon, "Final time T")->capture_default_str();
    cmd.add_option("--paths", cfg.paths, "Number of paths")->capture_default_str();
    cmd.add_option("--scheme", cfg.scheme, "Step scheme")
        ->check(CLI::IsMember({"euler", "milstein", "splitting"}))
        ->capture_default_str();
    cmd.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    cmd.add_option("--stride", cfg.stride, "Output stride")->capture_default_str();
    cmd.add_option("--out", cfg.out, "Output directory (must exist)");
    cmd.add_option("--workers", cfg.workers, "Worker threads, 0 = all cores")->capture_default_str();
    cmd.add_flag("-v,--verbose", cfg.verbose, "Progress on stderr");
}

std::string summary_line(const dpre::ConvergenceReport& r)
{
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "beta=%g alpha_hat=%.6f alpha_minus=%.6f error=%.3g p_hat=%.6f p=%.6f", r.beta,
                  r.overlap_limit_hat, r.alpha_minus_ref, r.abs_error, r.free_energy.extrapolated.mean, r.fe_ref);
    return buf;
}

struct RunOutput {
    std::string csv;
    std::string json;
    dpre::ConvergenceReport report;
};

RunOutput run_one(const dpre::ModelParams& p, const RunConfig& cfg)
{
    if (cfg.verbose) {
        std::cerr << "running beta=" << p.beta.value() << " paths=" << p.n_paths << " T=" << p.horizon << std::endl;
    }
    const dpre::EnsembleCurve curve = dpre::run_ensemble(p, cfg.workers);
    RunOutput o;
    o.report = dpre::fit_convergence(curve, dpre::solve_alpha(p.beta));
    o.csv = dpre::curve_csv(curve);
    o.json = dpre::report_json(p, curve, o.report);
    return o;
}

void require_directory(const std::string& dir)
{
    if (!dir.empty() && !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("output directory does not exist: " + dir);
    }
}

int cmd_analytic(const RunConfig& cfg)
{
    std::vector<dpre::AnalyticSolution<double>> rows;
    for (double b : cfg.betas) {
        try {
            rows.push_back(dpre::solve_alpha(dpre::Beta(b)));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    const std::string text = cfg.format == "json" ? dpre::analytic_table_json(rows) : dpre::analytic_table_csv(rows);
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        require_directory(cfg.out);
        const std::string name = cfg.format == "json" ? "analytic.json" : "analytic.csv";
        dpre::write_files_atomically({{std::filesystem::path(cfg.out) / name, text}});
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg)
{
    if (cfg.betas.size() != 1) {
        throw UsageError("simulate takes exactly one beta");
    }
    const dpre::ModelParams p = cfg.validated().front();
    require_directory(cfg.out);
    const RunOutput o = run_one(p, cfg);
    if (!cfg.out.empty()) {
        const std::filesystem::path dir(cfg.out);
        dpre::write_files_atomically({{dir / "curve.csv", o.csv}, {dir / "report.json", o.json}});
    }
    std::cout << summary_line(o.report) << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg)
{
    const auto all = cfg.validated();
    require_directory(cfg.out);
    std::ostringstream table;
    table << "beta,overlap_limit_hat,overlap_limit_se,alpha_minus,abs_error,fe_direct,fe_via_overlap,"
             "fe_extrapolated,fe_extrapolated_se,fe_ref,rate_lambda\n";
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    for (const auto& p : all) {
        const RunOutput o = run_one(p, cfg);
        const auto& r = o.report;
        const auto& fe = r.free_energy;
        table << dpre::format_double(r.beta) << ',' << dpre::format_double(r.overlap_limit_hat) << ','
              << dpre::format_double(r.overlap_limit_se) << ',' << dpre::format_double(r.alpha_minus_ref) << ','
              << dpre::format_double(r.abs_error) << ',' << dpre::format_double(fe.direct.mean) << ','
              << dpre::format_double(fe.via_overlap.mean) << ',' << dpre::format_double(fe.extrapolated.mean) << ','
              << dpre::format_double(fe.extrapolated.std_err) << ',' << dpre::format_double(r.fe_ref) << ','
              << dpre::format_double(r.rate_ref) << '\n';
        std::cout << summary_line(r) << "\n";
        if (!cfg.out.empty()) {
            std::ostringstream name;
            name << "beta_" << r.beta;
            const auto dir = std::filesystem::path(cfg.out) / name.str();
            std::filesystem::create_directories(dir);
            files.emplace_back(dir / "curve.csv", o.csv);
            files.emplace_back(dir / "report.json", o.json);
        }
    }
    if (cfg.out.empty()) {
        std::cout << table.str();
    } else {
        files.emplace_back(std::filesystem::path(cfg.out) / "sweep.csv", table.str());
        dpre::write_files_atomically(files);
    }
    return kExitOk;
}

int cmd_verify(const std::string& level, unsigned workers, const std::vector<int>& only, bool verbose)
{
    dpre::VerifyOptions opts;
    opts.level = level == "full" ? dpre::VerifyLevel::full : dpre::VerifyLevel::quick;
    opts.workers = workers;
    opts.only = only;
    opts.log = verbose ? &std::cerr : nullptr;
    const auto results = dpre::run_verification(opts);
    dpre::print_table(std::cout, results);
    return dpre::all_passed(results) ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-site directed polymer in a Brownian environment"};
    app.set_config("--config", "", "TOML config file; keys go under [analytic], [simulate] or [sweep]");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    RunConfig analytic_cfg;
    auto* analytic = app.add_subcommand("analytic", "Closed-form roots, free energy and rate per beta");
    analytic->add_option("--beta", analytic_cfg.betas, "Inverse temperatures")->required()->expected(1, -1);
    analytic->add_option("--format", analytic_cfg.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    analytic->add_option("--out", analytic_cfg.out, "Output directory (must exist)");

    RunConfig simulate_cfg;
    auto* simulate = app.add_subcommand("simulate", "Run one ensemble and write curve.csv and report.json");
    add_model_options(*simulate, simulate_cfg, false);

    RunConfig sweep_cfg;
    auto* sweep = app.add_subcommand("sweep", "Run one ensemble per beta and tabulate the estimates");
    add_model_options(*sweep, sweep_cfg, true);

    std::string level = "quick";
    unsigned verify_workers = 0;
    std::vector<int> criteria;
    bool verify_verbose = false;
    auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
    verify->add_option("--level", level, "Scale of the Monte Carlo criteria")
        ->check(CLI::IsMember({"quick", "full"}))
        ->capture_default_str();
    verify->add_option("--workers", verify_workers, "Worker threads, 0 = all cores");
    verify->add_option("--criterion", criteria, "Run only these criteria")->check(CLI::Range(1, dpre::kCriterionCount));
    verify->add_flag("-v,--verbose", verify_verbose, "Progress on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*analytic) {
            return cmd_analytic(analytic_cfg);
        }
        if (*simulate) {
            return cmd_simulate(simulate_cfg);
        }
        if (*sweep) {
            return cmd_sweep(sweep_cfg);
        }
        return cmd_verify(level, verify_workers, criteria, verify_verbose);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
