// Command-line harness for the adversarial lower-bound library.
//
// Subcommands:
//   bound       evaluate one of the three task lower bounds from flags
//   budget      calibrate a noise magnitude c for a target product-TV level
//   divergence  KL/TV between specified clean / noise-injected models
//   simulate    run one scenario and print its risk report
//   report      run the full scenario matrix and persist CSV + JSON
//   verify      run the cross-module oracle suite
//
// Exit codes: 0 success, 1 invariant/check failure, 2 invalid configuration.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lecam/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitBadConfig = 2;

struct CommonOpts {
    std::string config_path;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string out_dir;
    double t = -1.0;
    std::vector<std::size_t> n_list;
    long long replicates = -1;
    std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "base seed")->each([&](const std::string&) {
        opts.has_seed = true;
    });
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--t", opts.t, "target product-TV level in [0,1]");
    cmd->add_option("--n", opts.n_list, "sample sizes")->delimiter(',');
    cmd->add_option("--replicates", opts.replicates, "replicates per cell");
    cmd->add_option("--jobs", opts.jobs, "worker threads");
}

lecam::ExperimentConfig resolve_config(const CommonOpts& opts) {
    lecam::ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = lecam::load_config(opts.config_path);
    if (opts.has_seed) cfg.seed = opts.seed;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.t >= 0.0) cfg.target_tv = opts.t;
    if (!opts.n_list.empty()) cfg.n_grid = opts.n_list;
    if (opts.replicates >= 0) cfg.replicates = static_cast<std::size_t>(opts.replicates);
    lecam::validate_config(cfg);
    return cfg;
}

lecam::SpdMatrix sigma_from_diag(const std::vector<double>& diag, std::size_t k) {
    if (diag.empty()) return lecam::SpdMatrix::identity(k);
    return lecam::SpdMatrix::diagonal(diag);
}

void print_row_table(const std::vector<lecam::ReportRow>& rows) {
    std::printf("%-26s %4s %6s %10s %10s %12s %12s %12s %9s\n", "scenario", "k", "n", "c",
                "delta_hi", "risk_mean", "bound_d0", "bound_dhi", "seconds");
    for (const auto& r : rows) {
        if (r.skipped) {
            std::printf("%-26s %4zu %6zu  skipped: %s\n", r.scenario.c_str(), r.k, r.n,
                        r.skip_reason.c_str());
            continue;
        }
        std::printf("%-26s %4zu %6zu %10.4g %10.4g %12.5g %12.5g %12.5g %9.2f\n",
                    r.scenario.c_str(), r.k, r.n, r.c, r.delta_hi, r.risk_mean, r.bound_delta0,
                    r.bound_deltahi, r.seconds);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adversarial Le Cam lower bounds: closed forms, budgets, and simulations"};
    app.require_subcommand(1);

    // ---- bound -------------------------------------------------------------
    auto* bound_cmd = app.add_subcommand("bound", "evaluate a task lower bound");
    std::string bound_task = "mean";
    double bound_lambda = 1.0, bound_delta = 0.0, bound_eta = 1.0, bound_sigma = 1.0;
    std::size_t bound_n = 100, bound_k = 2;
    bound_cmd->add_option("--task", bound_task, "mean | classification | procrustes")
        ->check(CLI::IsMember({"mean", "classification", "procrustes"}));
    bound_cmd->add_option("--lambda-min", bound_lambda, "min eigenvalue of the covariance");
    bound_cmd->add_option("--n", bound_n, "sample count");
    bound_cmd->add_option("--delta", bound_delta, "adversarial slack");
    bound_cmd->add_option("--eta-scale", bound_eta, "procrustes noise scale");
    bound_cmd->add_option("--x-scale", bound_sigma, "procrustes input scale");
    bound_cmd->add_option("--k", bound_k, "dimension (procrustes admissibility)");

    // ---- budget ------------------------------------------------------------
    auto* budget_cmd = app.add_subcommand("budget", "calibrate noise magnitude for a TV target");
    std::string budget_noise = "gaussian";
    double budget_t = 0.05, budget_lambda = 1.0;
    std::size_t budget_n = 100, budget_k = 1;
    std::vector<double> budget_sigma_diag;
    budget_cmd->add_option("--noise", budget_noise, "gaussian | uniform")
        ->check(CLI::IsMember({"gaussian", "uniform"}));
    budget_cmd->add_option("--t", budget_t, "target product-TV level")->required();
    budget_cmd->add_option("--n", budget_n, "sample count");
    budget_cmd->add_option("--lambda-min", budget_lambda, "min eigenvalue (gaussian noise)");
    budget_cmd->add_option("--dim", budget_k, "dimension (uniform noise)");
    budget_cmd->add_option("--sigma-diag", budget_sigma_diag, "diagonal covariance entries")
        ->delimiter(',');

    // ---- divergence ----------------------------------------------------------
    auto* div_cmd = app.add_subcommand("divergence", "KL/TV between specified models");
    std::string div_kind = "kl-gaussian";
    std::vector<double> div_mu1{0.0}, div_mu2{1.0}, div_sigma1_diag, div_sigma2_diag;
    std::string div_noise = "uniform";
    double div_c = 0.1, div_noise_scale = 0.0;
    std::size_t div_m = 1000000;
    std::uint64_t div_seed = 20240801;
    div_cmd->add_option("--kind", div_kind, "kl-gaussian | tv-equal-cov | kl-poisoned-mc")
        ->check(CLI::IsMember({"kl-gaussian", "tv-equal-cov", "kl-poisoned-mc"}));
    div_cmd->add_option("--mu1", div_mu1, "first mean")->delimiter(',');
    div_cmd->add_option("--mu2", div_mu2, "second mean")->delimiter(',');
    div_cmd->add_option("--sigma1-diag", div_sigma1_diag, "first covariance diagonal")->delimiter(',');
    div_cmd->add_option("--sigma2-diag", div_sigma2_diag, "second covariance diagonal")->delimiter(',');
    div_cmd->add_option("--noise", div_noise, "gaussian | uniform (kl-poisoned-mc)")
        ->check(CLI::IsMember({"gaussian", "uniform"}));
    div_cmd->add_option("--c", div_c, "noise magnitude (kl-poisoned-mc)");
    div_cmd->add_option("--noise-scale", div_noise_scale, "gaussian noise covariance scale s");
    div_cmd->add_option("--m", div_m, "Monte-Carlo samples");
    div_cmd->add_option("--seed", div_seed, "Monte-Carlo seed");

    // ---- simulate / report / verify -----------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "run one scenario");
    CommonOpts sim_opts;
    std::string sim_scenario = "mean+gaussian";
    sim_cmd->add_option("--scenario", sim_scenario, "task+noise, e.g. mean+uniform");
    add_common(sim_cmd, sim_opts);

    auto* report_cmd = app.add_subcommand("report", "run the full scenario matrix");
    CommonOpts report_opts;
    bool report_timing = false;
    add_common(report_cmd, report_opts);
    report_cmd->add_flag("--timing", report_timing,
                         "persist measured wall-clock seconds (breaks byte reproducibility)");

    auto* verify_cmd = app.add_subcommand("verify", "run the cross-module oracle suite");
    CommonOpts verify_opts;
    add_common(verify_cmd, verify_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitBadConfig;
    }

    try {
        if (bound_cmd->parsed()) {
            double value;
            if (bound_task == "mean") {
                value = lecam::mean_estimation_bound(bound_lambda, bound_n, bound_delta);
            } else if (bound_task == "classification") {
                value = lecam::classification_bound(bound_lambda, bound_n, bound_delta);
            } else {
                value = lecam::procrustes_bound(bound_eta, bound_sigma, bound_n, bound_k,
                                                bound_delta);
            }
            std::printf("%.17g\n", value);
            return kExitOk;
        }

        if (budget_cmd->parsed()) {
            if (budget_noise == "gaussian") {
                const double c = lecam::gaussian_budget_for_target(budget_t, budget_lambda, budget_n);
                std::printf("c = %.17g\ntv_upper = %.17g\n", c,
                            lecam::gaussian_noise_tv_bound(c, budget_lambda, budget_n));
            } else {
                const auto sigma = sigma_from_diag(budget_sigma_diag, budget_k);
                const double c = lecam::uniform_budget_for_target(budget_t, sigma, budget_n);
                std::printf("c = %.17g\ntv_upper = %.17g\n", c,
                            lecam::uniform_noise_tv_bound(c, sigma, budget_n));
            }
            return kExitOk;
        }

        if (div_cmd->parsed()) {
            const std::size_t k = div_mu1.size();
            if (div_mu2.size() != k) throw lecam::ConfigError("--mu1/--mu2 length mismatch");
            const lecam::Gaussian p(div_mu1, sigma_from_diag(div_sigma1_diag, k));
            if (div_kind == "kl-gaussian") {
                const lecam::Gaussian q(div_mu2, sigma_from_diag(div_sigma2_diag, k));
                std::printf("%.17g\n", lecam::kl_gaussian(p, q));
            } else if (div_kind == "tv-equal-cov") {
                std::printf("%.17g\n", lecam::tv_equal_cov_gaussian_exact(
                                           div_mu1, div_mu2, sigma_from_diag(div_sigma1_diag, k)));
            } else {
                lecam::NoiseSpec noise =
                    div_noise == "uniform"
                        ? lecam::NoiseSpec(lecam::UniformBoxNoise(div_c, k))
                        : lecam::NoiseSpec(lecam::GaussianNoise(
                              lecam::Vector(k, div_c / std::sqrt(double(k))), div_noise_scale));
                const lecam::PoisonedModel q(p, noise);
                const auto est = lecam::kl_monte_carlo(
                    [&](const lecam::Vector& x) { return lecam::gaussian_log_density(p, x); },
                    [&](const lecam::Vector& x) { return lecam::poisoned_log_density(q, x); },
                    [&](lecam::Xoshiro256ss& r) { return lecam::sample_gaussian(p, r); }, div_m,
                    lecam::Seed{div_seed});
                std::printf("kl = %.17g\nstderr = %.17g\nsamples = %zu\n", est.value,
                            est.std_error, est.samples_used);
            }
            return kExitOk;
        }

        if (sim_cmd->parsed()) {
            lecam::ExperimentConfig cfg = resolve_config(sim_opts);
            cfg.scenarios = {sim_scenario};
            lecam::validate_config(cfg);
            const auto rows = lecam::run_scenarios(cfg, sim_opts.jobs);
            print_row_table(rows);
            for (const auto& r : rows)
                if (r.skipped) return kExitCheckFailure;
            return kExitOk;
        }

        if (report_cmd->parsed()) {
            const lecam::ExperimentConfig cfg = resolve_config(report_opts);
            const auto rows = lecam::run_scenarios(cfg, report_opts.jobs);
            lecam::write_report_files(cfg, rows, report_timing);
            print_row_table(rows);
            std::printf("wrote %s/report.csv and report.json (%zu rows)\n", cfg.out_dir.c_str(),
                        rows.size());
            return kExitOk;
        }

        if (verify_cmd->parsed()) {
            const lecam::ExperimentConfig cfg = resolve_config(verify_opts);
            const lecam::VerifyReport rep = lecam::verify_suite(cfg);
            std::printf("%-44s %-6s %14s\n", "check", "status", "margin");
            for (const auto& c : rep.checks) {
                std::printf("%-44s %-6s %14.6g %s\n", c.name.c_str(),
                            c.passed ? "pass" : "FAIL", c.margin, c.detail.c_str());
            }
            std::printf("%zu checks, %s\n", rep.checks.size(),
                        rep.all_passed() ? "all passed" : "FAILURES present");
            return rep.all_passed() ? kExitOk : kExitCheckFailure;
        }
    } catch (const lecam::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitBadConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailure;
    }
    return kExitOk;
}
