#pragma once

// Experiment harness: configuration, the six-scenario report grid
// (three learning tasks x two noise families), and the cross-module
// verification suite.
//
// Persisted artifacts are byte-reproducible: identical config and seed give
// identical CSV/JSON regardless of --jobs. Wall-clock timings therefore stay
// on the console by default; the persisted `seconds` column carries zeros
// unless timing output is explicitly requested.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lecam/adversary.hpp"
#include "lecam/bounds.hpp"
#include "lecam/distributions.hpp"
#include "lecam/divergence.hpp"
#include "lecam/matrix.hpp"
#include "lecam/rng.hpp"
#include "lecam/tasks.hpp"

namespace lecam {

// ============================================================================
// CONFIGURATION
// ============================================================================

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::vector<std::string> scenarios = {"mean+gaussian",           "mean+uniform",
                                          "classification+gaussian", "classification+uniform",
                                          "procrustes+gaussian",     "procrustes+uniform"};
    std::size_t k = 2;
    std::vector<std::size_t> n_grid = {10, 100, 1000};
    std::size_t replicates = 500;
    double target_tv = 0.05;
    std::uint64_t seed = 20240801;
    std::string out_dir = "reports";
    std::size_t mc_samples = 1000000;  // sample count for Monte-Carlo oracles

    // Model parameters; empty vectors default to zeros / first basis vector.
    Vector mean_mu;
    Vector classification_w;
    double x_scale = 1.0;
    double eta_scale = 1.0;
};

namespace detail {

inline void parse_scenario(const std::string& name, std::string& task, std::string& noise) {
    const auto plus = name.find('+');
    if (plus == std::string::npos)
        throw ConfigError("scenario '" + name + "' must have the form task+noise");
    task = name.substr(0, plus);
    noise = name.substr(plus + 1);
    if (task != "mean" && task != "classification" && task != "procrustes")
        throw ConfigError("unknown task '" + task + "' in scenario '" + name + "'");
    if (noise != "gaussian" && noise != "uniform" && noise != "none")
        throw ConfigError("unknown noise '" + noise + "' in scenario '" + name + "'");
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("k must be >= 1");
    if (cfg.n_grid.empty()) throw ConfigError("n grid must be non-empty");
    for (std::size_t n : cfg.n_grid)
        if (n < 1) throw ConfigError("every n must be >= 1");
    if (cfg.replicates < 30) throw ConfigError("replicates must be >= 30");
    if (!(cfg.target_tv >= 0.0 && cfg.target_tv <= 1.0)) throw ConfigError("target_tv must lie in [0, 1]");
    if (cfg.mc_samples < 10000) throw ConfigError("mc_samples must be >= 10^4");
    if (cfg.scenarios.empty()) throw ConfigError("scenario list must be non-empty");
    for (const auto& s : cfg.scenarios) {
        std::string task, noise;
        detail::parse_scenario(s, task, noise);
    }
    if (!cfg.mean_mu.empty() && cfg.mean_mu.size() != cfg.k) throw ConfigError("mean_mu must have length k");
    if (!cfg.classification_w.empty() && cfg.classification_w.size() != cfg.k)
        throw ConfigError("classification_w must have length k");
    if (!(cfg.x_scale > 0.0 && cfg.eta_scale > 0.0)) throw ConfigError("scales must be positive");
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("scenarios")) cfg.scenarios = j.at("scenarios").get<std::vector<std::string>>();
        if (j.contains("k")) cfg.k = j.at("k").get<std::size_t>();
        if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
        if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<std::size_t>();
        if (j.contains("target_tv")) cfg.target_tv = j.at("target_tv").get<double>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("mc_samples")) cfg.mc_samples = j.at("mc_samples").get<std::size_t>();
        if (j.contains("mean_mu")) cfg.mean_mu = j.at("mean_mu").get<Vector>();
        if (j.contains("classification_w")) cfg.classification_w = j.at("classification_w").get<Vector>();
        if (j.contains("x_scale")) cfg.x_scale = j.at("x_scale").get<double>();
        if (j.contains("eta_scale")) cfg.eta_scale = j.at("eta_scale").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    validate_config(cfg);
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return config_from_json(j);
}

// Serializes the experiment-defining fields. The output directory is
// deliberately absent: it does not affect any computed value, and including
// it would make otherwise identical reports differ by where they were written.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["scenarios"] = cfg.scenarios;
    j["k"] = cfg.k;
    j["n_grid"] = cfg.n_grid;
    j["replicates"] = cfg.replicates;
    j["target_tv"] = cfg.target_tv;
    j["seed"] = cfg.seed;
    j["mc_samples"] = cfg.mc_samples;
    j["mean_mu"] = cfg.mean_mu;
    j["classification_w"] = cfg.classification_w;
    j["x_scale"] = cfg.x_scale;
    j["eta_scale"] = cfg.eta_scale;
    return j;
}

// ============================================================================
// SCENARIO RUNS
// ============================================================================

struct ReportRow {
    std::string scenario;
    std::size_t k = 0;
    std::size_t n = 0;
    double t = 0.0;
    double c = 0.0;
    double tv_upper = 0.0;
    double delta_hi = 0.0;
    double risk_mean = 0.0;
    double risk_stderr = 0.0;
    double bound_delta0 = 0.0;
    double bound_deltahi = 0.0;
    double seconds = 0.0;  // measured wall clock; persisted as 0 unless timing is requested
    bool skipped = false;
    std::string skip_reason;
    std::uint64_t row_seed = 0;
};

namespace detail {

// Seed streams hanging off the config seed. Stream 0 holds model setup (the
// planted Procrustes W); stream 1+i covers scenario i's rows by n-index.
inline constexpr std::uint64_t kModelStream = 0;

inline TaskSpec build_task(const ExperimentConfig& cfg, const std::string& task) {
    const std::size_t k = cfg.k;
    if (task == "mean") {
        Vector mu = cfg.mean_mu.empty() ? Vector(k, 0.0) : cfg.mean_mu;
        return MeanEstimationTask(std::move(mu), SpdMatrix::identity(k));
    }
    if (task == "classification") {
        Vector w = cfg.classification_w;
        if (w.empty()) {
            w.assign(k, 0.0);
            w[0] = 1.0;
        }
        return BinaryClassificationTask(std::move(w), SpdMatrix::identity(k));
    }
    const Matrix planted =
        random_orthogonal(k, derive_child_seed(Seed{cfg.seed}, kModelStream, 0));
    return ProcrustesTask(planted, cfg.x_scale, cfg.eta_scale);
}

// Calibrates the noise magnitude c so the per-endpoint product TV stays at or
// below the target, and assembles the noise law. Gaussian poison points along
// the channel's minimum-eigenvalue direction with zero covariance scale (the
// slowest-detected member of the family).
inline NoiseSpec calibrated_noise(const std::string& noise, const TaskSpec& task, double t,
                                  std::size_t n, double& c_out, double& tv_out) {
    if (noise == "none" || t == 0.0) {
        c_out = 0.0;
        tv_out = 0.0;
        return no_noise();
    }
    const SpdMatrix channel = noise_channel_sigma(task);
    if (noise == "gaussian") {
        const double c = gaussian_budget_for_target(t, channel.min_eigenvalue(), n);
        c_out = c;
        tv_out = gaussian_noise_tv_bound(c, channel.min_eigenvalue(), n);
        return GaussianNoise(scaled(channel.min_eigenvector(), c), 0.0);
    }
    const double c = uniform_budget_for_target(t, channel, n);
    c_out = c;
    tv_out = uniform_noise_tv_bound(c, channel, n);
    return UniformBoxNoise(c, channel.dim());
}

inline std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline std::string report_csv_header() {
    return "scenario,k,n,t,c,tv_upper,delta_hi,risk_mean,risk_stderr,bound_delta0,"
           "bound_deltahi,seconds";
}

inline std::string report_row_csv(const ReportRow& row, bool include_timing) {
    std::ostringstream oss;
    oss << row.scenario << ',' << row.k << ',' << row.n << ',' << detail::format_float(row.t)
        << ',' << detail::format_float(row.c) << ',' << detail::format_float(row.tv_upper) << ','
        << detail::format_float(row.delta_hi) << ',' << detail::format_float(row.risk_mean) << ','
        << detail::format_float(row.risk_stderr) << ',' << detail::format_float(row.bound_delta0)
        << ',' << detail::format_float(row.bound_deltahi) << ','
        << detail::format_float(include_timing ? row.seconds : 0.0);
    return oss.str();
}

// Runs every (scenario, n) cell of the configured grid: calibrate the budget,
// measure empirical risk, and attach the bound at delta = 0 and at
// delta_hi = 2t. Inadmissible cells (the Procrustes condition) are emitted as
// explicitly reasoned skipped rows rather than dropped, so the row count is
// always |scenarios| x |n grid|.
inline std::vector<ReportRow> run_scenarios(const ExperimentConfig& cfg, std::size_t jobs = 1) {
    validate_config(cfg);
    std::vector<ReportRow> rows;
    rows.reserve(cfg.scenarios.size() * cfg.n_grid.size());

    for (std::size_t s = 0; s < cfg.scenarios.size(); ++s) {
        std::string task_name_str, noise_name_str;
        detail::parse_scenario(cfg.scenarios[s], task_name_str, noise_name_str);
        const TaskSpec task = detail::build_task(cfg, task_name_str);

        for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
            const std::size_t n = cfg.n_grid[ni];
            ReportRow row;
            row.scenario = cfg.scenarios[s];
            row.k = cfg.k;
            row.n = n;
            row.t = cfg.target_tv;
            const Seed row_seed = derive_child_seed(Seed{cfg.seed}, 1 + s, ni);
            row.row_seed = row_seed.value;

            const auto start = std::chrono::steady_clock::now();
            try {
                const NoiseSpec noise =
                    detail::calibrated_noise(noise_name_str, task, cfg.target_tv, n, row.c, row.tv_upper);
                const RiskReport report =
                    empirical_risk(task, noise, n, cfg.replicates, row_seed, jobs);
                row.delta_hi = report.delta_hi;
                row.risk_mean = report.empirical_risk;
                row.risk_stderr = report.std_error;
                row.bound_delta0 = report.lower_bound_delta0;
                row.bound_deltahi = report.lower_bound_delta_hi;
            } catch (const std::exception& e) {
                row.skipped = true;
                row.skip_reason = e.what();
                row.c = row.tv_upper = row.delta_hi = 0.0;
                row.risk_mean = row.risk_stderr = row.bound_delta0 = row.bound_deltahi =
                    std::numeric_limits<double>::quiet_NaN();
            }
            row.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline void write_report_files(const ExperimentConfig& cfg, const std::vector<ReportRow>& rows,
                               bool include_timing = false) {
    std::filesystem::create_directories(cfg.out_dir);

    std::ofstream csv(std::filesystem::path(cfg.out_dir) / "report.csv");
    if (!csv) throw std::runtime_error("cannot write report.csv in " + cfg.out_dir);
    csv << report_csv_header() << '\n';
    for (const auto& row : rows) csv << report_row_csv(row, include_timing) << '\n';

    nlohmann::ordered_json j;
    j["config"] = config_to_json(cfg);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json r;
        r["scenario"] = row.scenario;
        r["k"] = row.k;
        r["n"] = row.n;
        r["t"] = row.t;
        r["c"] = row.c;
        r["tv_upper"] = row.tv_upper;
        r["delta_hi"] = row.delta_hi;
        r["risk_mean"] = row.risk_mean;
        r["risk_stderr"] = row.risk_stderr;
        r["bound_delta0"] = row.bound_delta0;
        r["bound_deltahi"] = row.bound_deltahi;
        r["seconds"] = include_timing ? row.seconds : 0.0;
        r["skipped"] = row.skipped;
        r["skip_reason"] = row.skip_reason;
        r["row_seed"] = row.row_seed;
        j["rows"].push_back(std::move(r));
    }
    std::ofstream js(std::filesystem::path(cfg.out_dir) / "report.json");
    if (!js) throw std::runtime_error("cannot write report.json in " + cfg.out_dir);
    js << j.dump(2) << '\n';
}

// ============================================================================
// VERIFICATION SUITE
// ============================================================================

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double margin = 0.0;  // distance to the failure threshold; >= 0 means pass
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

struct VerifyOptions {
    // Test fixture for the negative control: perturbs the sign-moment matrix
    // before the structural checks, which must then fail.
    bool corrupt_sign_moments = false;
};

namespace detail {

inline void push_check(VerifyReport& rep, const std::string& name, bool passed, double margin,
                       const std::string& detail_msg = "") {
    rep.checks.push_back(VerifyCheck{name, passed, margin, detail_msg});
}

// Random SPD matrix with eigenvalues in [lo, hi] on a Haar-random basis.
inline SpdMatrix random_spd(std::size_t k, double lo, double hi, Seed seed) {
    const Matrix q = random_orthogonal(k, seed);
    Xoshiro256ss rng(derive_child_seed(seed, 7, 0));
    Matrix d(k, k);
    for (std::size_t i = 0; i < k; ++i) d(i, i) = rng.uniform(lo, hi);
    Matrix m = q * d * q.transposed();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
    return SpdMatrix(std::move(m));
}

inline SpdMatrix random_correlation(std::size_t k, Seed seed) {
    const SpdMatrix spd = random_spd(k, 0.3, 3.0, seed);
    Matrix c(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            c(i, j) = spd(i, j) / std::sqrt(spd(i, i) * spd(j, j));
    for (std::size_t i = 0; i < k; ++i) c(i, i) = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double v = 0.5 * (c(i, j) + c(j, i));
            c(i, j) = v;
            c(j, i) = v;
        }
    return SpdMatrix(std::move(c));
}

}  // namespace detail

// Executes the cross-module oracle checks (closed forms vs Monte Carlo and
// quadrature, structural properties, budget soundness, bound consistency) and
// reports one margin per check.
inline VerifyReport verify_suite(const ExperimentConfig& cfg, const VerifyOptions& opts = {}) {
    validate_config(cfg);
    VerifyReport rep;
    const Seed base{cfg.seed};

    // --- KL identity and closed form vs Monte Carlo --------------------------
    {
        const Gaussian p = Gaussian::standard(2);
        const double self_kl = kl_gaussian(p, p);
        detail::push_check(rep, "kl.identity", self_kl == 0.0, -std::abs(self_kl));
    }
    {
        double worst = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (std::size_t trial = 0; trial < 10; ++trial) {
            const std::size_t k = 1 + trial % 3;
            const Seed s = derive_child_seed(base, 10, trial);
            const SpdMatrix s1 = detail::random_spd(k, 0.3, 3.0, derive_child_seed(s, 0, 0));
            const SpdMatrix s2 = detail::random_spd(k, 0.3, 3.0, derive_child_seed(s, 0, 1));
            Xoshiro256ss rng(derive_child_seed(s, 0, 2));
            Vector m1(k), m2(k);
            for (std::size_t i = 0; i < k; ++i) m1[i] = rng.uniform(-1.0, 1.0);
            for (std::size_t i = 0; i < k; ++i) m2[i] = rng.uniform(-1.0, 1.0);
            const Gaussian p(m1, s1), q(m2, s2);
            const double closed = kl_gaussian(p, q);
            const auto est = kl_monte_carlo(
                [&](const Vector& x) { return gaussian_log_density(p, x); },
                [&](const Vector& x) { return gaussian_log_density(q, x); },
                [&](Xoshiro256ss& r) { return sample_gaussian(p, r); }, cfg.mc_samples,
                derive_child_seed(s, 0, 3));
            const double tol = std::max(3.0 * est.std_error, 0.02 * closed);
            const double margin = tol - std::abs(est.value - closed);
            worst = std::min(worst, margin);
            ok = ok && margin >= 0.0;
        }
        detail::push_check(rep, "kl.mc_oracle_agreement", ok, worst);
    }

    // --- Affinity inequality and TV consistency ------------------------------
    {
        const SpdMatrix one = SpdMatrix::identity(1);
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (double sep : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const Gaussian p(Vector{0.0}, one), q(Vector{sep}, one);
            const double kl = kl_gaussian(p, q);
            const double affinity = affinity_numeric_1d(
                [&](const Vector& x) { return gaussian_log_density(p, x); },
                [&](const Vector& x) { return gaussian_log_density(q, x); }, -10.0, 10.0 + sep,
                20001);
            const double lower = affinity_lower_bound(kl);
            const double tv = tv_equal_cov_gaussian_exact(Vector{0.0}, Vector{sep}, one);
            const double m1 = affinity - lower;
            const double m2 = 1e-6 - std::abs(affinity - (1.0 - tv));
            worst = std::min({worst, m1, m2});
            ok = ok && m1 >= 0.0 && m2 >= 0.0;
        }
        detail::push_check(rep, "affinity.exp_lower_bound_and_tv", ok, worst);
    }

    // --- Sign-moment structure ------------------------------------------------
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t trial = 0; trial < 100; ++trial) {
            const std::size_t k = 2 + trial % 3;
            const SpdMatrix corr = detail::random_correlation(k, derive_child_seed(base, 20, trial));
            SignMoments sm = sign_moment_matrices(corr);
            if (opts.corrupt_sign_moments) {
                sm.b(0, 1) += 0.2;
                sm.b(1, 0) += 0.2;
            }
            const double min_eig = symmetric_eigen(sm.b).values.front();
            const double margin = min_eig + 1e-8;
            worst = std::min(worst, margin);
            ok = ok && margin >= 0.0;
        }
        detail::push_check(rep, "sign_moments.b_psd", ok, worst);
    }
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (int i = -99; i <= 99; ++i) {
            const double rho = static_cast<double>(i) / 100.0;
            Matrix m(2, 2);
            m(0, 0) = m(1, 1) = 1.0;
            m(0, 1) = m(1, 0) = rho;
            SignMoments sm = sign_moment_matrices(SpdMatrix(std::move(m)));
            if (opts.corrupt_sign_moments) sm.b(0, 1) += 0.2;
            const double expected = (2.0 / kPi) * std::asin(rho);
            const double margin = 1e-12 - std::abs(sm.b(0, 1) - expected);
            worst = std::min(worst, margin);
            ok = ok && margin >= 0.0;
        }
        detail::push_check(rep, "sign_moments.branches_match_arcsin", ok, worst);
    }

    // --- Gaussian noise family -------------------------------------------------
    {
        const SpdMatrix sigma = detail::random_spd(2, 0.5, 2.0, derive_child_seed(base, 30, 0));
        const Gaussian p(Vector{0.3, -0.2}, sigma);
        const Vector shift = scaled(sigma.min_eigenvector(), 0.2);
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 20; ++i) {
            const double s = static_cast<double>(i) / 19.0;
            const double kl = gaussian_noise_kl_exact(p, GaussianNoise(shift, s));
            const double margin = prev - kl + 1e-12;
            worst = std::min(worst, margin);
            ok = ok && margin >= 0.0;
            prev = kl;
        }
        detail::push_check(rep, "gaussian_noise.kl_monotone_in_scale", ok, worst);
    }
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (double t : {0.01, 0.05, 0.1, 0.3}) {
            for (std::size_t n : {std::size_t{10}, std::size_t{100}}) {
                const SpdMatrix sigma =
                    detail::random_spd(2, 0.5, 2.0, derive_child_seed(base, 31, n));
                const double lam = sigma.min_eigenvalue();
                const double c = gaussian_budget_for_target(t, lam, n);
                const Vector mu1(2, 0.0);
                const Vector mu2 = scaled(sigma.min_eigenvector(), c);
                const double tv = tv_equal_cov_gaussian_product(mu1, mu2, sigma, n);
                const double margin = t - tv;
                worst = std::min(worst, margin);
                ok = ok && margin >= 0.0;
            }
        }
        detail::push_check(rep, "gaussian_noise.budget_soundness", ok, worst);
    }

    // --- Uniform noise family ---------------------------------------------------
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        std::size_t trial = 0;
        for (const Vector& diag : {Vector{1.0}, Vector{1.0, 2.0}}) {
            const SpdMatrix sigma = SpdMatrix::diagonal(diag);
            const Gaussian p(Vector(diag.size(), 0.0), sigma);
            for (double c : {0.05, 0.1, 0.2}) {
                const PoisonedModel q(p, UniformBoxNoise(c, diag.size()));
                const auto est = kl_monte_carlo(
                    [&](const Vector& x) { return gaussian_log_density(p, x); },
                    [&](const Vector& x) { return poisoned_log_density(q, x); },
                    [&](Xoshiro256ss& r) { return sample_gaussian(p, r); }, cfg.mc_samples,
                    derive_child_seed(base, 40, trial++));
                const double bound = uniform_noise_kl_bound(c, sigma);
                const double margin = bound + 3.0 * est.std_error - est.value;
                worst = std::min(worst, margin);
                ok = ok && margin >= 0.0;
            }
        }
        detail::push_check(rep, "uniform_noise.kl_budget_soundness", ok, worst);
    }
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        const SpdMatrix sigma = detail::random_spd(2, 0.5, 2.0, derive_child_seed(base, 41, 0));
        for (double t : {0.01, 0.05, 0.1}) {
            for (std::size_t n : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
                const double c = uniform_budget_for_target(t, sigma, n);
                const double tv = uniform_noise_tv_bound(c, sigma, n);
                const double margin = 1e-9 - std::abs(tv - t);
                worst = std::min(worst, margin);
                ok = ok && margin >= 0.0;
            }
        }
        detail::push_check(rep, "uniform_noise.budget_round_trip", ok, worst);
    }

    // --- Bound structure ----------------------------------------------------------
    {
        // Reduction at delta = 0: the specialized formulas equal the general
        // form assembled from the derivation's plug-in separation and KL.
        const double lam = 1.7;
        const std::size_t n = 64;
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();

        const auto [u_star, f_star] =
            optimize_separation_quadratic(static_cast<double>(n) / (2.0 * lam), 0.0,
                                          std::numeric_limits<double>::infinity());
        const double mean_general = lecam_adversarial_general(
            u_star, affinity_lower_bound(static_cast<double>(n) * u_star * u_star / (2.0 * lam)),
            0.0);
        double margin = 1e-12 - std::abs(mean_general - mean_estimation_bound(lam, n, 0.0));
        worst = std::min(worst, margin);
        ok = ok && margin >= 0.0;
        margin = 1e-12 - std::abs(f_star - mean_estimation_bound(lam, n, 0.0));
        worst = std::min(worst, margin);
        ok = ok && margin >= 0.0;

        const double v_class = lam / static_cast<double>(n);  // the derivation's plug-in
        const double class_general = lecam_adversarial_general(
            v_class, affinity_lower_bound(static_cast<double>(n) * v_class / (2.0 * lam)), 0.0);
        margin = 1e-12 - std::abs(class_general - classification_bound(lam, n, 0.0));
        worst = std::min(worst, margin);
        ok = ok && margin >= 0.0;

        const double sg = 1.3, eta = 0.9;
        const std::size_t kk = 3;
        const double a_proc = static_cast<double>(n) * sg * sg / (eta * eta);
        const auto [v_proc, g_proc] =
            optimize_separation_linear(a_proc, 0.0, 4.0 * static_cast<double>(kk));
        const double proc_general = lecam_adversarial_general(
            v_proc, affinity_lower_bound(static_cast<double>(n) * v_proc * sg * sg / (eta * eta)),
            0.0);
        margin = 1e-12 - std::abs(proc_general - procrustes_bound(eta, sg, n, kk, 0.0));
        worst = std::min(worst, margin);
        ok = ok && margin >= 0.0;
        margin = 1e-12 - std::abs(g_proc - procrustes_bound(eta, sg, n, kk, 0.0));
        worst = std::min(worst, margin);
        ok = ok && margin >= 0.0;
        detail::push_check(rep, "bounds.delta0_reduction", ok, worst);
    }
    {
        // Numerical optimizers never undercut the derivations' plug-ins.
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (double alpha : {0.5, 5.0, 50.0}) {
            for (double delta : {0.0, 0.01, 0.1, 0.5}) {
                const double u_max = 4.0;
                const auto [u, fu] = optimize_separation_quadratic(alpha, delta, u_max);
                const double u_plug = std::min(1.0 / std::sqrt(2.0 * alpha), u_max);
                const double f_plug =
                    u_plug / 8.0 * (std::exp(-alpha * u_plug * u_plug) + 2.0 * delta);
                const double margin = fu - f_plug + 1e-15;
                worst = std::min(worst, margin);
                ok = ok && margin >= 0.0;
            }
        }
        for (double a : {1.0, 10.0, 100.0}) {
            for (double delta : {0.0, 0.01, 0.1, 0.5}) {
                const double v_max = 8.0;
                const auto [v, gv] = optimize_separation_linear(a, delta, v_max);
                const double v_plug = std::min(1.0 / a, v_max);
                const double g_plug = v_plug / 8.0 * (std::exp(-a * v_plug) + 2.0 * delta);
                const double margin = gv - g_plug + 1e-15;
                worst = std::min(worst, margin);
                ok = ok && margin >= 0.0;
            }
        }
        detail::push_check(rep, "bounds.optimizer_dominance", ok, worst);
    }
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        double prev_mean = std::numeric_limits<double>::infinity();
        double prev_class = std::numeric_limits<double>::infinity();
        double prev_proc = std::numeric_limits<double>::infinity();
        for (std::size_t n : {std::size_t{1}, std::size_t{10}, std::size_t{100}, std::size_t{1000}}) {
            const double bm = mean_estimation_bound(1.0, n, 0.0);
            const double bc = classification_bound(1.0, n, 0.0);
            const double bp = procrustes_bound(1.0, 1.0, n, 2, 0.0);
            const double m = std::min({bm, bc, bp, prev_mean - bm, prev_class - bc, prev_proc - bp});
            worst = std::min(worst, m);
            ok = ok && bm > 0.0 && bc > 0.0 && bp > 0.0 && bm < prev_mean && bc < prev_class &&
                 bp < prev_proc && mean_estimation_bound(1.0, n, 0.1) > bm;
            prev_mean = bm;
            prev_class = bc;
            prev_proc = bp;
        }
        detail::push_check(rep, "bounds.positive_and_monotone", ok, worst);
    }

    // --- Empirical risk dominates the bound -----------------------------------
    {
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        const std::vector<TaskSpec> tasks = {
            MeanEstimationTask(Vector(2, 0.0), SpdMatrix::identity(2)),
            BinaryClassificationTask(Vector{1.0, 0.0}, SpdMatrix::identity(2)),
            ProcrustesTask(random_orthogonal(2, derive_child_seed(base, 50, 0)), 1.0, 1.0)};
        std::size_t idx = 0;
        for (const auto& task : tasks) {
            for (std::size_t n : {std::size_t{10}, std::size_t{100}, std::size_t{1000}}) {
                const RiskReport r =
                    empirical_risk(task, no_noise(), n, 1000, derive_child_seed(base, 51, idx++));
                const double margin =
                    r.empirical_risk + 3.0 * r.std_error - r.lower_bound_delta0;
                worst = std::min(worst, margin);
                ok = ok && margin >= 0.0;
            }
        }
        detail::push_check(rep, "tasks.risk_dominates_bound", ok, worst);
    }

    // --- Estimator structure ----------------------------------------------------
    {
        const Seed s = derive_child_seed(base, 60, 0);
        const MeanEstimationTask task(Vector(3, 0.0), SpdMatrix::identity(3));
        SampleBatch batch = generate(task, no_noise(), 50, s);
        const Vector est0 = estimate_mean(batch);
        const Vector shift{0.5, -1.0, 2.0};
        for (std::size_t r = 0; r < batch.n(); ++r)
            batch.points.set_row(r, add(batch.points.row(r), shift));
        const Vector est1 = estimate_mean(batch);
        const double err = norm2(sub(sub(est1, est0), shift));
        detail::push_check(rep, "tasks.mean_translation_equivariance", err <= 1e-12,
                           1e-12 - err);
    }
    {
        const Seed s = derive_child_seed(base, 61, 0);
        const ProcrustesTask task(random_orthogonal(2, derive_child_seed(base, 61, 1)), 1.0, 0.3);
        SampleBatch batch = generate(task, no_noise(), 100, s);
        const Matrix what = estimate_procrustes(batch);
        const Matrix q = random_orthogonal(2, derive_child_seed(base, 61, 2));
        for (std::size_t r = 0; r < batch.n(); ++r)
            batch.responses->set_row(r, q * batch.responses->row(r));
        const Matrix rotated = estimate_procrustes(batch);
        const double err = max_abs(rotated - q * what);
        detail::push_check(rep, "tasks.procrustes_left_composition", err <= 1e-10, 1e-10 - err);
    }
    {
        // W_hat maximizes the trace objective against random orthogonal probes.
        const Seed s = derive_child_seed(base, 62, 0);
        const ProcrustesTask task(random_orthogonal(2, derive_child_seed(base, 62, 1)), 1.0, 0.5);
        const SampleBatch batch = generate(task, no_noise(), 50, s);
        const Matrix what = estimate_procrustes(batch);
        Matrix m(2, 2);
        for (std::size_t r = 0; r < batch.n(); ++r)
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    m(i, j) += (*batch.responses)(r, i) * batch.points(r, j);
        const double best = trace(what.transposed() * m);
        double probe_best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < 10000; ++i) {
            const Matrix w = random_orthogonal(2, derive_child_seed(s, 1, i));
            probe_best = std::max(probe_best, trace(w.transposed() * m));
        }
        detail::push_check(rep, "tasks.procrustes_trace_optimality", best + 1e-9 >= probe_best,
                           best + 1e-9 - probe_best);
    }
    {
        // Unbiasedness of the label-weighted mean at n = 50.
        const BinaryClassificationTask task(Vector{1.0, 0.0}, SpdMatrix::identity(2));
        const std::size_t reps = 10000;
        Vector acc(2, 0.0);
        std::vector<Vector> estimates;
        estimates.reserve(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            const SampleBatch b =
                generate(task, no_noise(), 50, derive_child_seed(base, 63, r));
            estimates.push_back(estimate_w(b));
            acc = add(acc, estimates.back());
        }
        const Vector mean = scaled(acc, 1.0 / static_cast<double>(reps));
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < 2; ++j) {
            double ss = 0.0;
            for (const auto& e : estimates) ss += (e[j] - mean[j]) * (e[j] - mean[j]);
            const double se = std::sqrt(ss / static_cast<double>(reps - 1) /
                                        static_cast<double>(reps));
            const double margin = 3.0 * se - std::abs(mean[j] - task.w[j]);
            worst = std::min(worst, margin);
            ok = ok && margin >= 0.0;
        }
        detail::push_check(rep, "tasks.classification_estimator_unbiased", ok, worst);
    }

    return rep;
}

}  // namespace lecam
