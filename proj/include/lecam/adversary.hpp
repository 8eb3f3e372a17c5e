#pragma once

// Noise-budget models: TV upper bounds for Gaussian and uniform poisoning,
// the sign-moment matrices of a centered Gaussian, and the calibration that
// inverts a target product-TV level t into a noise magnitude c.

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "lecam/distributions.hpp"
#include "lecam/divergence.hpp"
#include "lecam/matrix.hpp"
#include "lecam/special.hpp"

namespace lecam {

struct AdversaryBudget {
    double beta = 0.0;  // TV budget per endpoint
    double c = 0.0;     // noise magnitude
    double t = 0.0;     // target product-TV level

    AdversaryBudget(double beta_in, double c_in, double t_in) : beta(beta_in), c(c_in), t(t_in) {
        if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("AdversaryBudget: beta must lie in [0, 1]");
        if (!(c >= 0.0)) throw std::invalid_argument("AdversaryBudget: c must be >= 0");
        if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("AdversaryBudget: t must lie in [0, 1]");
    }
};

// E[x sign(x)^T] and E[sign(x) sign(x)^T] for x ~ N(0, Sigma), plus the
// intermediate ratio V (off-diagonal only; the diagonal formula divides by
// zero and sign^2 x = 1 fixes B_ii = 1 directly).
struct SignMoments {
    Matrix a;
    Matrix b;
    Matrix v;
};

// ============================================================================
// GAUSSIAN NOISE FAMILY
// ============================================================================

// Product-TV upper bound for Gaussian poison of magnitude c: c sqrt(n) / (2 sqrt(lambda_min)).
inline double gaussian_noise_tv_bound(double c, double lambda_min, std::size_t n) {
    if (!(c >= 0.0)) throw std::invalid_argument("gaussian_noise_tv_bound: c must be >= 0");
    if (!(lambda_min > 0.0)) throw std::invalid_argument("gaussian_noise_tv_bound: lambda_min must be > 0");
    if (n < 1) throw std::invalid_argument("gaussian_noise_tv_bound: n must be >= 1");
    return c * std::sqrt(static_cast<double>(n)) / (2.0 * std::sqrt(lambda_min));
}

// Inverse of the bound above: c = 2 t sqrt(lambda_min) / sqrt(n), so that
// gaussian_noise_tv_bound(c) == t exactly.
inline double gaussian_budget_for_target(double t, double lambda_min, std::size_t n) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("gaussian_budget_for_target: t must lie in [0, 1]");
    if (!(lambda_min > 0.0)) throw std::invalid_argument("gaussian_budget_for_target: lambda_min must be > 0");
    if (n < 1) throw std::invalid_argument("gaussian_budget_for_target: n must be >= 1");
    return 2.0 * t * std::sqrt(lambda_min) / std::sqrt(static_cast<double>(n));
}

// Exact KL(P || P * noise) through the closed-form convolution. Never exceeds
// c^2 / (2 lambda_min), and is non-increasing in the noise scale.
inline double gaussian_noise_kl_exact(const Gaussian& p, const GaussianNoise& noise) {
    if (noise.shift.size() != p.dim())
        throw std::invalid_argument("gaussian_noise_kl_exact: dimension mismatch");
    return kl_gaussian(p, detail::gaussian_convolved(p, noise));
}

// ============================================================================
// SIGN MOMENTS
// ============================================================================

// A_ij = sqrt(2) Sigma_ij / sqrt(pi Sigma_ii);
// B_ij = (2/pi) arctan V_ij for Sigma_ij > 0, and otherwise
//        (1/4pi)(6 arctan V_ij - 2 arccot V_ij + pi) with arccot v = pi/2 - arctan v,
// where V_ij = Sigma_ij / sqrt(Sigma_ii Sigma_jj - Sigma_ij^2). Under this
// arccot convention the two branches coincide with (2/pi) arcsin(rho_ij).
inline SignMoments sign_moment_matrices(const SpdMatrix& sigma) {
    const std::size_t k = sigma.dim();
    SignMoments sm;
    sm.a = Matrix(k, k);
    sm.b = Matrix(k, k);
    sm.v = Matrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            sm.a(i, j) = kSqrt2 * sigma(i, j) / std::sqrt(kPi * sigma(i, i));
            if (i == j) {
                sm.b(i, j) = 1.0;
                continue;
            }
            const double denom2 = sigma(i, i) * sigma(j, j) - sigma(i, j) * sigma(i, j);
            if (!(denom2 > 0.0)) {
                throw std::domain_error(
                    "sign_moment_matrices: Sigma_ii Sigma_jj - Sigma_ij^2 must be positive");
            }
            const double v = sigma(i, j) / std::sqrt(denom2);
            sm.v(i, j) = v;
            if (sigma(i, j) > 0.0) {
                sm.b(i, j) = (2.0 / kPi) * std::atan(v);
            } else {
                const double arccot = kPi / 2.0 - std::atan(v);
                sm.b(i, j) = (6.0 * std::atan(v) - 2.0 * arccot + kPi) / (4.0 * kPi);
            }
        }
    }
    return sm;
}

// (Cov(sign X1, X2), Cov(sign X1, sign X2)) for a centered bivariate Gaussian.
inline std::pair<double, double> sign_covariances(const SpdMatrix& sigma) {
    if (sigma.dim() != 2) throw std::invalid_argument("sign_covariances: expects a 2x2 covariance");
    const SignMoments sm = sign_moment_matrices(sigma);
    return {sm.a(0, 1), sm.b(0, 1)};
}

// ============================================================================
// UNIFORM NOISE FAMILY
// ============================================================================

namespace detail {

inline double sign_linear_coefficient(const SpdMatrix& sigma) {
    double s = 0.0;
    for (std::size_t i = 0; i < sigma.dim(); ++i) s += kSqrt2 / std::sqrt(kPi * sigma(i, i));
    return s;
}

inline double sign_quadratic_coefficient(const SpdMatrix& sigma) {
    const SignMoments sm = sign_moment_matrices(sigma);
    return trace(sm.b * sigma.inverse());
}

}  // namespace detail

// KL upper bound for uniform box poison of half width c:
//   c sum_i sqrt(2)/sqrt(pi Sigma_ii) + (c^2 / 2) Tr(B Sigma^{-1}),
// the sign-moment expansion of the convolution's log-ratio.
inline double uniform_noise_kl_bound(double c, const SpdMatrix& sigma) {
    if (!(c >= 0.0)) throw std::invalid_argument("uniform_noise_kl_bound: c must be >= 0");
    return c * detail::sign_linear_coefficient(sigma) +
           0.5 * c * c * detail::sign_quadratic_coefficient(sigma);
}

// Pinsker applied to the KL bound above.
inline double uniform_noise_tv_bound(double c, const SpdMatrix& sigma, std::size_t n) {
    return pinsker_product_tv_upper(uniform_noise_kl_bound(c, sigma), n);
}

// Inverts uniform_noise_tv_bound: the positive root of
//   (n Tr(B Sigma^{-1}) / 4) c^2 + (n/2) sum_i sqrt(2)/sqrt(pi Sigma_ii) c = t^2,
// computed in the rationalized form 2 t^2 / (b + sqrt(b^2 + 4 a t^2)) so small
// targets do not cancel.
inline double uniform_budget_for_target(double t, const SpdMatrix& sigma, std::size_t n) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("uniform_budget_for_target: t must lie in [0, 1]");
    if (n < 1) throw std::invalid_argument("uniform_budget_for_target: n must be >= 1");
    if (t == 0.0) return 0.0;
    const double nn = static_cast<double>(n);
    const double a = nn * detail::sign_quadratic_coefficient(sigma) / 4.0;
    const double b = nn * detail::sign_linear_coefficient(sigma) / 2.0;
    if (!(a > 0.0)) throw std::domain_error("uniform_budget_for_target: Tr(B Sigma^{-1}) must be positive");
    return 2.0 * t * t / (b + std::sqrt(b * b + 4.0 * a * t * t));
}

}  // namespace lecam
