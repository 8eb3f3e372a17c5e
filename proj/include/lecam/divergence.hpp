#pragma once

// Closed-form KL and TV machinery for Gaussians, the exponential affinity
// lower bound, Pinsker's product step, and the Monte-Carlo / quadrature
// estimators used to cross-check every closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "lecam/distributions.hpp"
#include "lecam/matrix.hpp"
#include "lecam/rng.hpp"
#include "lecam/special.hpp"

namespace lecam {

struct DivergenceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples_used = 0;
};

// KL(p || q) for multivariate Gaussians:
//   1/2 [ Tr(S2^{-1} S1) + (m2-m1)^T S2^{-1} (m2-m1) - d + log det S2 / det S1 ].
// Clamped at zero to absorb rounding on near-identical inputs.
inline double kl_gaussian(const Gaussian& p, const Gaussian& q) {
    if (p.dim() != q.dim()) throw std::invalid_argument("kl_gaussian: dimension mismatch");
    const std::size_t d = p.dim();
    double tr = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        Vector col(d);
        for (std::size_t i = 0; i < d; ++i) col[i] = p.cov(i, j);
        tr += q.cov.solve(col)[j];
    }
    const double quad = q.cov.quad_inv(sub(q.mean, p.mean));
    const double kl =
        0.5 * (tr + quad - static_cast<double>(d) + q.cov.log_det() - p.cov.log_det());
    return std::max(kl, 0.0);
}

// Sample-mean estimate of E_P[log p(x) - log q(x)] with its standard error.
// `sampler(rng)` must draw one point from P; `logp`/`logq` evaluate the two
// log densities. A non-finite log ratio aborts with the offending point.
template <class LogP, class LogQ, class Sampler>
DivergenceEstimate kl_monte_carlo(LogP&& logp, LogQ&& logq, Sampler&& sampler, std::size_t m,
                                  Seed seed) {
    if (m < 10000) throw std::invalid_argument("kl_monte_carlo: m must be >= 10^4");
    Xoshiro256ss rng(seed);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vector x = sampler(rng);
        const double r = logp(x) - logq(x);
        if (!std::isfinite(r)) {
            std::ostringstream oss;
            oss << "kl_monte_carlo: non-finite log ratio at point (";
            for (std::size_t j = 0; j < x.size(); ++j) oss << (j ? ", " : "") << x[j];
            oss << ")";
            throw std::runtime_error(oss.str());
        }
        const double delta = r - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (r - mean);
    }
    DivergenceEstimate est;
    est.value = mean;
    est.std_error = std::sqrt(m2 / static_cast<double>(m - 1) / static_cast<double>(m));
    est.samples_used = m;
    return est;
}

// Testing-affinity lower bound (1/2) e^{-kl}; the exponential route that
// makes product distributions tractable.
inline double affinity_lower_bound(double kl) {
    if (!(kl >= 0.0)) throw std::invalid_argument("affinity_lower_bound: kl must be >= 0");
    return 0.5 * std::exp(-kl);
}

// Composite Simpson integral of min(p, q) over [lo, hi]. The grid is fixed
// (no adaptivity) so the result is deterministic; callers must pick [lo, hi]
// wide enough to cover all but ~1e-8 of both masses.
template <class LogP, class LogQ>
double affinity_numeric_1d(LogP&& logp, LogQ&& logq, double lo, double hi,
                           std::size_t gridpoints) {
    if (!(hi > lo)) throw std::invalid_argument("affinity_numeric_1d: empty interval");
    if (gridpoints < 10000) throw std::invalid_argument("affinity_numeric_1d: need >= 10^4 gridpoints");
    std::size_t intervals = gridpoints - 1;
    if (intervals % 2 == 1) ++intervals;
    const double h = (hi - lo) / static_cast<double>(intervals);

    const auto integrand = [&](double x) {
        const Vector pt{x};
        return std::min(std::exp(logp(pt)), std::exp(logq(pt)));
    };
    double acc = integrand(lo) + integrand(hi);
    for (std::size_t i = 1; i < intervals; ++i) {
        const double x = lo + h * static_cast<double>(i);
        acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(x);
    }
    const double result = acc * h / 3.0;
    if (result > 1.0 + 1e-6) {
        throw std::runtime_error(
            "affinity_numeric_1d: integral " + std::to_string(result) +
            " exceeds 1; densities are inconsistent");
    }
    return std::min(result, 1.0);
}

// Exact TV between equal-covariance Gaussians: 2 Phi(delta/2) - 1 with
// delta the Mahalanobis distance between the means.
inline double tv_equal_cov_gaussian_exact(const Vector& mu1, const Vector& mu2,
                                          const SpdMatrix& sigma) {
    if (mu1.size() != mu2.size() || mu1.size() != sigma.dim())
        throw std::invalid_argument("tv_equal_cov_gaussian_exact: dimension mismatch");
    const double delta = std::sqrt(sigma.quad_inv(sub(mu1, mu2)));
    return 2.0 * norm_cdf(delta / 2.0) - 1.0;
}

// Exact TV between the n-fold products of equal-covariance Gaussians; the
// product pair is again a two-Gaussian problem with Mahalanobis sqrt(n)*delta.
inline double tv_equal_cov_gaussian_product(const Vector& mu1, const Vector& mu2,
                                            const SpdMatrix& sigma, std::size_t n) {
    if (n < 1) throw std::invalid_argument("tv_equal_cov_gaussian_product: n must be >= 1");
    const double delta = std::sqrt(sigma.quad_inv(sub(mu1, mu2)));
    return 2.0 * norm_cdf(std::sqrt(static_cast<double>(n)) * delta / 2.0) - 1.0;
}

// Pinsker bound on the product TV: sqrt(n * KL / 2).
inline double pinsker_product_tv_upper(double kl_single, std::size_t n) {
    if (!(kl_single >= 0.0)) throw std::invalid_argument("pinsker_product_tv_upper: kl must be >= 0");
    if (n < 1) throw std::invalid_argument("pinsker_product_tv_upper: n must be >= 1");
    return std::sqrt(static_cast<double>(n) * kl_single / 2.0);
}

}  // namespace lecam
