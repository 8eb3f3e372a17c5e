#pragma once

// Generative models and baseline estimators for the three learning problems,
// plus replicated empirical-risk measurement against the theoretical bounds.
//
// Draw order per generated row (bit-reproducibility contract):
//   mean            k normals, then the noise draws
//   classification  one uniform for the label, k normals, then noise on x
//   procrustes      k normals for x, k normals for eta, then noise on y

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "lecam/adversary.hpp"
#include "lecam/bounds.hpp"
#include "lecam/distributions.hpp"
#include "lecam/matrix.hpp"
#include "lecam/rng.hpp"

namespace lecam {

// ============================================================================
// TASK SPECIFICATIONS
// ============================================================================

struct MeanEstimationTask {
    Vector mu;
    SpdMatrix sigma;

    MeanEstimationTask(Vector mu_in, SpdMatrix sigma_in)
        : mu(std::move(mu_in)), sigma(std::move(sigma_in)) {
        if (mu.size() != sigma.dim())
            throw std::invalid_argument("MeanEstimationTask: mean/covariance dimension mismatch");
    }
};

struct BinaryClassificationTask {
    Vector w;
    SpdMatrix sigma;

    BinaryClassificationTask(Vector w_in, SpdMatrix sigma_in)
        : w(std::move(w_in)), sigma(std::move(sigma_in)) {
        if (w.size() != sigma.dim())
            throw std::invalid_argument("BinaryClassificationTask: w/covariance dimension mismatch");
    }
};

struct ProcrustesTask {
    Matrix w;           // orthogonal k x k
    double x_scale;     // sigma
    double eta_scale;   // epsilon

    ProcrustesTask(Matrix w_in, double x_scale_in, double eta_scale_in)
        : w(std::move(w_in)), x_scale(x_scale_in), eta_scale(eta_scale_in) {
        if (w.rows() != w.cols() || w.rows() == 0)
            throw std::invalid_argument("ProcrustesTask: W must be square and non-empty");
        if (max_orthogonality_defect(w) > 1e-10)
            throw std::invalid_argument("ProcrustesTask: W must be orthogonal within 1e-10");
        if (!(x_scale > 0.0 && eta_scale > 0.0))
            throw std::invalid_argument("ProcrustesTask: scales must be positive");
    }
};

using TaskSpec = std::variant<MeanEstimationTask, BinaryClassificationTask, ProcrustesTask>;

inline std::size_t task_dim(const TaskSpec& task) {
    if (const auto* m = std::get_if<MeanEstimationTask>(&task)) return m->mu.size();
    if (const auto* c = std::get_if<BinaryClassificationTask>(&task)) return c->w.size();
    return std::get<ProcrustesTask>(task).w.rows();
}

inline std::string task_name(const TaskSpec& task) {
    if (std::holds_alternative<MeanEstimationTask>(task)) return "mean";
    if (std::holds_alternative<BinaryClassificationTask>(task)) return "classification";
    return "procrustes";
}

inline std::string noise_name(const NoiseSpec& noise) {
    if (std::holds_alternative<GaussianNoise>(noise)) return "gaussian";
    if (std::holds_alternative<UniformBoxNoise>(noise)) return "uniform";
    return "none";
}

// Covariance of the Gaussian channel the noise is added to. For the two
// generative tasks this is the conditional law given the clean part of the
// sample (labels, x), whose TV to its poisoned version upper-bounds the TV of
// the joints.
inline SpdMatrix noise_channel_sigma(const TaskSpec& task) {
    if (const auto* m = std::get_if<MeanEstimationTask>(&task)) return m->sigma;
    if (const auto* c = std::get_if<BinaryClassificationTask>(&task)) return c->sigma;
    const auto& p = std::get<ProcrustesTask>(task);
    return SpdMatrix::scaled_identity(p.w.rows(), p.eta_scale * p.eta_scale);
}

struct RiskReport {
    std::string task_id;
    std::string noise_id;
    std::size_t n = 0;
    std::size_t replicates = 0;
    double empirical_risk = 0.0;
    double std_error = 0.0;
    double delta_hi = 0.0;
    double lower_bound_delta0 = 0.0;
    double lower_bound_delta_hi = 0.0;
};

// ============================================================================
// SAMPLE GENERATION
// ============================================================================

inline SampleBatch generate(const TaskSpec& task, const NoiseSpec& noise, std::size_t n,
                            Seed seed) {
    if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
    const std::size_t k = task_dim(task);
    if (noise_dim(noise, k) != k)
        throw std::invalid_argument("generate: noise dimension must match task dimension");
    Xoshiro256ss rng(seed);
    SampleBatch batch;
    batch.points = Matrix(n, k);

    if (const auto* m = std::get_if<MeanEstimationTask>(&task)) {
        const Gaussian g(m->mu, m->sigma);
        for (std::size_t r = 0; r < n; ++r) {
            Vector x = sample_gaussian(g, rng);
            if (!is_none(noise)) x = add(x, sample_noise(noise, k, rng));
            batch.points.set_row(r, x);
        }
        return batch;
    }

    if (const auto* c = std::get_if<BinaryClassificationTask>(&task)) {
        batch.labels = std::vector<int>(n);
        const Gaussian g(Vector(k, 0.0), c->sigma);
        for (std::size_t r = 0; r < n; ++r) {
            const int label = rng.uniform01() < 0.5 ? -1 : 1;
            (*batch.labels)[r] = label;
            Vector x = sample_gaussian(g, rng);
            for (std::size_t i = 0; i < k; ++i) x[i] += static_cast<double>(label) * c->w[i];
            if (!is_none(noise)) x = add(x, sample_noise(noise, k, rng));
            batch.points.set_row(r, x);
        }
        return batch;
    }

    const auto& p = std::get<ProcrustesTask>(task);
    batch.responses = Matrix(n, k);
    for (std::size_t r = 0; r < n; ++r) {
        Vector x(k), eta(k);
        for (std::size_t i = 0; i < k; ++i) x[i] = p.x_scale * rng.normal();
        for (std::size_t i = 0; i < k; ++i) eta[i] = p.eta_scale * rng.normal();
        Vector y = add(p.w * x, eta);
        if (!is_none(noise)) y = add(y, sample_noise(noise, k, rng));
        batch.points.set_row(r, x);
        batch.responses->set_row(r, y);
    }
    return batch;
}

// ============================================================================
// BASELINE ESTIMATORS
// ============================================================================

inline Vector estimate_mean(const SampleBatch& batch) {
    if (batch.n() < 1) throw std::invalid_argument("estimate_mean: empty batch");
    Vector mean(batch.dim(), 0.0);
    for (std::size_t r = 0; r < batch.n(); ++r)
        for (std::size_t j = 0; j < batch.dim(); ++j) mean[j] += batch.points(r, j);
    return scaled(mean, 1.0 / static_cast<double>(batch.n()));
}

// Label-weighted mean (1/n) sum_i y_i x_i, unbiased for w under the
// classification model.
inline Vector estimate_w(const SampleBatch& batch) {
    if (!batch.labels) throw std::invalid_argument("estimate_w: batch has no labels");
    if (batch.n() < 1) throw std::invalid_argument("estimate_w: empty batch");
    Vector w(batch.dim(), 0.0);
    for (std::size_t r = 0; r < batch.n(); ++r) {
        const double y = static_cast<double>((*batch.labels)[r]);
        for (std::size_t j = 0; j < batch.dim(); ++j) w[j] += y * batch.points(r, j);
    }
    return scaled(w, 1.0 / static_cast<double>(batch.n()));
}

// Orthogonal Procrustes estimate: with M = sum_i y_i x_i^T = U D V'^T, the
// maximizer of Tr(W^T M) over the full orthogonal group is U V'^T
// (reflections admitted; no determinant constraint).
inline Matrix estimate_procrustes(const SampleBatch& batch) {
    if (!batch.responses) throw std::invalid_argument("estimate_procrustes: batch has no paired responses");
    const std::size_t k = batch.dim();
    if (batch.n() < k)
        throw std::invalid_argument("estimate_procrustes: need at least k sample pairs");
    Matrix m(k, k);
    for (std::size_t r = 0; r < batch.n(); ++r)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                m(i, j) += (*batch.responses)(r, i) * batch.points(r, j);
    const Svd svd = jacobi_svd(m);
    if (!(svd.singular_values.back() > 1e-12 * svd.singular_values.front())) {
        throw std::runtime_error(
            "estimate_procrustes: cross-moment matrix is rank deficient; draw more samples");
    }
    return svd.u * svd.v.transposed();
}

// ============================================================================
// EMPIRICAL RISK
// ============================================================================

namespace detail {

inline double replicate_metric(const TaskSpec& task, const NoiseSpec& noise, std::size_t n,
                               Seed seed) {
    const SampleBatch batch = generate(task, noise, n, seed);
    if (const auto* m = std::get_if<MeanEstimationTask>(&task)) {
        return norm2(sub(estimate_mean(batch), m->mu));  // ||mu_hat - mu||_2
    }
    if (const auto* c = std::get_if<BinaryClassificationTask>(&task)) {
        const Vector diff = sub(estimate_w(batch), c->w);
        return dot(diff, diff);  // ||w_hat - w||_2^2
    }
    const auto& p = std::get<ProcrustesTask>(task);
    const Matrix diff = estimate_procrustes(batch) - p.w;
    const double f = frobenius_norm(diff);
    return f * f;  // ||W_hat - W||_F^2
}

// Per-endpoint product-TV upper bound for the configured noise on this task's
// channel, capped at 1 (TV never exceeds 1).
inline double per_endpoint_tv_upper(const TaskSpec& task, const NoiseSpec& noise, std::size_t n) {
    if (is_none(noise)) return 0.0;
    const SpdMatrix channel = noise_channel_sigma(task);
    double tv;
    if (const auto* g = std::get_if<GaussianNoise>(&noise)) {
        tv = gaussian_noise_tv_bound(g->magnitude(), channel.min_eigenvalue(), n);
    } else {
        tv = uniform_noise_tv_bound(std::get<UniformBoxNoise>(noise).half_width, channel, n);
    }
    return std::min(tv, 1.0);
}

inline double task_lower_bound(const TaskSpec& task, std::size_t n, double delta) {
    if (const auto* m = std::get_if<MeanEstimationTask>(&task))
        return mean_estimation_bound(m->sigma.min_eigenvalue(), n, delta);
    if (const auto* c = std::get_if<BinaryClassificationTask>(&task))
        return classification_bound(c->sigma.min_eigenvalue(), n, delta);
    const auto& p = std::get<ProcrustesTask>(task);
    return procrustes_bound(p.eta_scale, p.x_scale, n, p.w.rows(), delta);
}

}  // namespace detail

// Mean and standard error of the task metric over `replicates` independent
// runs, each on its own child seed, next to the theoretical bound at delta=0
// and at the noise-derived delta_hi. Replicates may be evaluated on `jobs`
// threads; results land in indexed slots and are reduced in index order, so
// the report does not depend on the thread count.
inline RiskReport empirical_risk(const TaskSpec& task, const NoiseSpec& noise, std::size_t n,
                                 std::size_t replicates, Seed seed, std::size_t jobs = 1) {
    if (replicates < 30) throw std::invalid_argument("empirical_risk: need at least 30 replicates");
    if (jobs < 1) jobs = 1;

    RiskReport report;
    report.task_id = task_name(task);
    report.noise_id = noise_name(noise);
    report.n = n;
    report.replicates = replicates;
    // Bounds first: the Procrustes admissibility condition gates the whole
    // experiment, not just the report columns.
    report.delta_hi = 2.0 * detail::per_endpoint_tv_upper(task, noise, n);
    report.lower_bound_delta0 = detail::task_lower_bound(task, n, 0.0);
    report.lower_bound_delta_hi = detail::task_lower_bound(task, n, report.delta_hi);

    std::vector<double> metrics(replicates);
    const auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r)
            metrics[r] = detail::replicate_metric(task, noise, n, derive_child_seed(seed, 1, r));
    };
    if (jobs == 1) {
        worker(0, replicates);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (replicates + jobs - 1) / jobs;
        for (std::size_t j = 0; j < jobs && j * chunk < replicates; ++j)
            pool.emplace_back(worker, j * chunk, std::min(replicates, (j + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    double mean = 0.0;
    for (double v : metrics) mean += v;
    mean /= static_cast<double>(replicates);
    double ss = 0.0;
    for (double v : metrics) ss += (v - mean) * (v - mean);
    const double std_error =
        std::sqrt(ss / static_cast<double>(replicates - 1) / static_cast<double>(replicates));

    report.empirical_risk = mean;
    report.std_error = std_error;
    return report;
}

}  // namespace lecam
