#pragma once

// The adversarial two-point lower bound: the general separation/4 *
// (affinity + delta) form, the three specialized task bounds, the delta
// interval, and the 1-D separation optimizations the derivations perform.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "lecam/matrix.hpp"

namespace lecam {

// One evaluated scenario bound: the two-point separation, the affinity term,
// and the bound at both ends of the admissible delta interval.
struct BoundResult {
    std::string scenario;
    double separation = 0.0;
    double affinity_term = 0.0;
    double delta_lo = 0.0;
    double delta_hi = 0.0;
    double bound_at_delta_lo = 0.0;
    double bound_at_delta_hi = 0.0;
};

// ============================================================================
// GENERAL FORM
// ============================================================================

// separation/4 * (affinity + delta). With delta = 0 this is the classical
// two-point bound.
inline double lecam_adversarial_general(double separation, double affinity, double delta) {
    if (!(separation >= 0.0)) throw std::invalid_argument("lecam_adversarial_general: separation must be >= 0");
    if (!(affinity >= 0.0 && affinity <= 1.0))
        throw std::invalid_argument("lecam_adversarial_general: affinity must lie in [0, 1]");
    if (!(delta >= 0.0 && delta <= 2.0))
        throw std::invalid_argument("lecam_adversarial_general: delta must lie in [0, 2]");
    return separation / 4.0 * (affinity + delta);
}

// Admissible adversarial slack for a per-endpoint TV budget beta: [0, 2 beta].
inline std::pair<double, double> delta_interval(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("delta_interval: beta must lie in [0, 1]");
    return {0.0, 2.0 * beta};
}

// Evaluates the general bound at both ends of the delta interval admitted by
// a per-endpoint budget beta.
inline BoundResult make_bound_result(std::string scenario, double separation, double affinity,
                                     double beta) {
    const auto [lo, hi] = delta_interval(beta);
    BoundResult r;
    r.scenario = std::move(scenario);
    r.separation = separation;
    r.affinity_term = affinity;
    r.delta_lo = lo;
    r.delta_hi = hi;
    r.bound_at_delta_lo = lecam_adversarial_general(separation, affinity, lo);
    r.bound_at_delta_hi = lecam_adversarial_general(separation, affinity, hi);
    return r;
}

// ============================================================================
// SPECIALIZED BOUNDS
// ============================================================================

// Mean estimation: sqrt(lambda_min) / (8 sqrt(n)) * (1/sqrt(e) + 2 delta).
inline double mean_estimation_bound(double lambda_min, std::size_t n, double delta) {
    if (!(lambda_min > 0.0)) throw std::invalid_argument("mean_estimation_bound: lambda_min must be > 0");
    if (n < 1) throw std::invalid_argument("mean_estimation_bound: n must be >= 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("mean_estimation_bound: delta must be >= 0");
    return std::sqrt(lambda_min) / (8.0 * std::sqrt(static_cast<double>(n))) *
           (1.0 / std::sqrt(std::exp(1.0)) + 2.0 * delta);
}

// Binary classification: lambda_min / (8 n) * (1/sqrt(e) + 2 delta).
inline double classification_bound(double lambda_min, std::size_t n, double delta) {
    if (!(lambda_min > 0.0)) throw std::invalid_argument("classification_bound: lambda_min must be > 0");
    if (n < 1) throw std::invalid_argument("classification_bound: n must be >= 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("classification_bound: delta must be >= 0");
    return lambda_min / (8.0 * static_cast<double>(n)) *
           (1.0 / std::sqrt(std::exp(1.0)) + 2.0 * delta);
}

// Procrustes analysis: eta^2 / (8 n sigma^2) * (1/e + 2 delta), admissible
// only while eta^2/sigma^2 <= 4 k n.
inline double procrustes_bound(double eta_scale, double x_scale, std::size_t n, std::size_t k,
                               double delta) {
    if (!(eta_scale > 0.0 && x_scale > 0.0))
        throw std::invalid_argument("procrustes_bound: scales must be positive");
    if (n < 1 || k < 1) throw std::invalid_argument("procrustes_bound: n and k must be >= 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("procrustes_bound: delta must be >= 0");
    const double ratio = eta_scale * eta_scale / (x_scale * x_scale);
    const double cap = 4.0 * static_cast<double>(k) * static_cast<double>(n);
    if (ratio > cap) {
        throw std::domain_error(
            "procrustes_bound: admissibility eta^2/sigma^2 <= 4kn violated (" +
            std::to_string(ratio) + " > " + std::to_string(cap) + ")");
    }
    return eta_scale * eta_scale / (8.0 * static_cast<double>(n) * x_scale * x_scale) *
           (1.0 / std::exp(1.0) + 2.0 * delta);
}

// ============================================================================
// SEPARATION OPTIMIZERS
// ============================================================================

namespace detail {

// Maximizes a smooth objective on [lo, hi]: a coarse scan brackets the global
// maximum (the delta > 0 objectives can carry both an interior and a boundary
// candidate), then golden-section refines the bracket to rel_tol.
template <class F>
std::pair<double, double> maximize_on_interval(F&& f, double lo, double hi, double rel_tol) {
    constexpr std::size_t kScan = 512;
    double best_x = lo, best_f = f(lo);
    for (std::size_t i = 1; i <= kScan; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kScan);
        const double fx = f(x);
        if (fx > best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    const double step = (hi - lo) / static_cast<double>(kScan);
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > rel_tol * (std::abs(x1) + std::abs(x2)) + 1e-300) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    const double x_star = 0.5 * (a + b);
    return {x_star, f(x_star)};
}

}  // namespace detail

// Maximizes f(u) = u/8 (e^{-alpha u^2} + 2 delta) over [0, u_max].
// delta = 0 has the closed-form interior optimum u = 1/sqrt(2 alpha); with
// delta > 0 the objective eventually grows linearly, so an unbounded domain
// is rejected.
inline std::pair<double, double> optimize_separation_quadratic(double alpha, double delta,
                                                               double u_max) {
    if (!(alpha > 0.0)) throw std::invalid_argument("optimize_separation_quadratic: alpha must be > 0");
    if (!(delta >= 0.0)) throw std::invalid_argument("optimize_separation_quadratic: delta must be >= 0");
    const auto f = [alpha, delta](double u) {
        return u / 8.0 * (std::exp(-alpha * u * u) + 2.0 * delta);
    };
    const double u_closed = 1.0 / std::sqrt(2.0 * alpha);
    if (delta == 0.0) {
        const double u = std::min(u_closed, u_max);  // objective increases up to u_closed
        return {u, f(u)};
    }
    if (!std::isfinite(u_max))
        throw std::invalid_argument(
            "optimize_separation_quadratic: objective is unbounded for delta > 0 on an "
            "unbounded domain; pass a finite u_max");
    auto best = detail::maximize_on_interval(f, 0.0, u_max, 1e-10);
    // The delta = 0 stationary point stays a candidate; keeps the numerical
    // result from ever undercutting the plug-in value.
    if (u_closed <= u_max && f(u_closed) > best.second) best = {u_closed, f(u_closed)};
    if (f(u_max) > best.second) best = {u_max, f(u_max)};
    return best;
}

// Maximizes g(v) = v/8 (e^{-a v} + 2 delta) over [0, v_max]; the linear-in-v
// analogue used when the separation metric is already squared.
inline std::pair<double, double> optimize_separation_linear(double a, double delta,
                                                            double v_max) {
    if (!(a > 0.0)) throw std::invalid_argument("optimize_separation_linear: a must be > 0");
    if (!(delta >= 0.0)) throw std::invalid_argument("optimize_separation_linear: delta must be >= 0");
    if (!(v_max > 0.0)) throw std::invalid_argument("optimize_separation_linear: v_max must be > 0");
    const auto g = [a, delta](double v) { return v / 8.0 * (std::exp(-a * v) + 2.0 * delta); };
    const double v_closed = 1.0 / a;
    if (delta == 0.0) {
        const double v = std::min(v_closed, v_max);
        return {v, g(v)};
    }
    if (!std::isfinite(v_max))
        throw std::invalid_argument(
            "optimize_separation_linear: objective is unbounded for delta > 0 on an "
            "unbounded domain; pass a finite v_max");
    auto best = detail::maximize_on_interval(g, 0.0, v_max, 1e-10);
    if (v_closed <= v_max && g(v_closed) > best.second) best = {v_closed, g(v_closed)};
    if (g(v_max) > best.second) best = {v_max, g(v_max)};
    return best;
}

// ============================================================================
// TWO-POINT KL QUANTITIES
// ============================================================================

// Joint KL of the labeled-classification two-point pair:
// 1/2 (w1 - w2)^T Sigma^{-1} (w1 - w2). The Rademacher label contributes zero.
inline double classification_kl(const Vector& w1, const Vector& w2, const SpdMatrix& sigma) {
    if (w1.size() != w2.size() || w1.size() != sigma.dim())
        throw std::invalid_argument("classification_kl: dimension mismatch");
    return 0.5 * sigma.quad_inv(sub(w1, w2));
}

struct ProcrustesKl {
    double kl = 0.0;  // (sigma^2/eta^2) ||W1 - W2||_F^2, the derivation's exponent quantity
    double v = 0.0;   // 2k - 2 Tr(W1^T W2), confined to [0, 4k]
};

// Two-point KL quantity for the Procrustes pair. Note the returned value is
// the exponent coefficient the lower-bound derivation uses; it equals twice
// the joint KL of the (x, y) models.
inline ProcrustesKl procrustes_kl(const Matrix& w1, const Matrix& w2, double x_scale,
                                  double eta_scale) {
    if (w1.rows() != w1.cols() || w2.rows() != w2.cols() || w1.rows() != w2.rows())
        throw std::invalid_argument("procrustes_kl: expects square matrices of equal size");
    if (!(x_scale > 0.0 && eta_scale > 0.0))
        throw std::invalid_argument("procrustes_kl: scales must be positive");
    if (max_orthogonality_defect(w1) > 1e-8 || max_orthogonality_defect(w2) > 1e-8)
        throw std::invalid_argument("procrustes_kl: inputs must be orthogonal within 1e-8");
    const std::size_t k = w1.rows();
    ProcrustesKl out;
    const Matrix diff = w1 - w2;
    const double fro2 = frobenius_norm(diff) * frobenius_norm(diff);
    out.kl = (x_scale * x_scale) / (eta_scale * eta_scale) * fro2;
    out.v = 2.0 * static_cast<double>(k) - 2.0 * trace(w1.transposed() * w2);
    return out;
}

}  // namespace lecam
