#pragma once

// Multivariate Gaussians, the two additive noise families, and deterministic
// sampling of clean and noise-injected models.
//
// Draw order contract (part of the bit-reproducibility guarantee): for each
// sampled row, the k standard normals of the Gaussian part are consumed
// first, then the noise draws (one scalar normal for directional Gaussian
// noise, k uniforms for box noise).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "lecam/matrix.hpp"
#include "lecam/rng.hpp"
#include "lecam/special.hpp"

namespace lecam {

// ============================================================================
// MODEL TYPES
// ============================================================================

struct Gaussian {
    Vector mean;
    SpdMatrix cov;

    Gaussian(Vector mean_in, SpdMatrix cov_in) : mean(std::move(mean_in)), cov(std::move(cov_in)) {
        if (mean.size() != cov.dim())
            throw std::invalid_argument("Gaussian: mean length must equal covariance dimension");
    }

    std::size_t dim() const { return mean.size(); }

    static Gaussian standard(std::size_t k) { return Gaussian(Vector(k, 0.0), SpdMatrix::identity(k)); }
};

// Directional Gaussian noise N(shift, scale * shift shift^T). The rank-one
// covariance parameterization makes scale in [0, 1] the entire feasible set
// of covariances dominated by shift shift^T.
struct GaussianNoise {
    Vector shift;
    double scale = 0.0;

    GaussianNoise(Vector shift_in, double scale_in) : shift(std::move(shift_in)), scale(scale_in) {
        if (!(scale >= 0.0 && scale <= 1.0))
            throw std::invalid_argument("GaussianNoise: scale must lie in [0, 1]");
    }

    double magnitude() const { return norm2(shift); }
};

// Independent uniform noise on the box [-half_width, +half_width]^dim.
struct UniformBoxNoise {
    double half_width = 0.0;
    std::size_t dim = 0;

    UniformBoxNoise(double half_width_in, std::size_t dim_in)
        : half_width(half_width_in), dim(dim_in) {
        if (!(half_width > 0.0)) throw std::invalid_argument("UniformBoxNoise: half width must be positive");
        if (dim == 0) throw std::invalid_argument("UniformBoxNoise: dimension must be positive");
    }
};

using NoiseSpec = std::variant<std::monostate, GaussianNoise, UniformBoxNoise>;

inline NoiseSpec no_noise() { return NoiseSpec{std::monostate{}}; }

inline bool is_none(const NoiseSpec& n) { return std::holds_alternative<std::monostate>(n); }

inline std::size_t noise_dim(const NoiseSpec& n, std::size_t base_dim) {
    if (const auto* g = std::get_if<GaussianNoise>(&n)) return g->shift.size();
    if (const auto* u = std::get_if<UniformBoxNoise>(&n)) return u->dim;
    return base_dim;
}

// Clean Gaussian base plus an optional additive noise law; the observed
// distribution is the convolution of the two.
struct PoisonedModel {
    Gaussian base;
    NoiseSpec noise;

    PoisonedModel(Gaussian base_in, NoiseSpec noise_in)
        : base(std::move(base_in)), noise(std::move(noise_in)) {
        if (noise_dim(noise, base.dim()) != base.dim())
            throw std::invalid_argument("PoisonedModel: noise dimension must match base dimension");
    }

    std::size_t dim() const { return base.dim(); }
};

struct SampleBatch {
    Matrix points;                          // n x k
    std::optional<std::vector<int>> labels; // classification: +-1 per row
    std::optional<Matrix> responses;        // paired tasks: n x k response rows

    std::size_t n() const { return points.rows(); }
    std::size_t dim() const { return points.cols(); }
};

// ============================================================================
// SAMPLING
// ============================================================================

inline Vector sample_gaussian(const Gaussian& g, Xoshiro256ss& rng) {
    const std::size_t k = g.dim();
    Vector z(k);
    for (std::size_t i = 0; i < k; ++i) z[i] = rng.normal();
    Vector x = g.mean;
    const Matrix& l = g.cov.chol();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= i; ++j) x[i] += l(i, j) * z[j];
    return x;
}

inline Vector sample_noise(const NoiseSpec& noise, std::size_t k, Xoshiro256ss& rng) {
    if (const auto* g = std::get_if<GaussianNoise>(&noise)) {
        const double z = rng.normal();
        Vector u(k);
        const double f = 1.0 + std::sqrt(g->scale) * z;
        for (std::size_t i = 0; i < k; ++i) u[i] = g->shift[i] * f;
        return u;
    }
    if (const auto* u = std::get_if<UniformBoxNoise>(&noise)) {
        Vector v(k);
        for (std::size_t i = 0; i < k; ++i) v[i] = rng.uniform(-u->half_width, u->half_width);
        return v;
    }
    return Vector(k, 0.0);
}

inline SampleBatch sample_poisoned(const PoisonedModel& q, std::size_t n, Seed seed) {
    if (n < 1) throw std::invalid_argument("sample_poisoned: n must be >= 1");
    Xoshiro256ss rng(seed);
    const std::size_t k = q.dim();
    SampleBatch batch;
    batch.points = Matrix(n, k);
    for (std::size_t r = 0; r < n; ++r) {
        Vector x = sample_gaussian(q.base, rng);
        if (!is_none(q.noise)) x = add(x, sample_noise(q.noise, k, rng));
        batch.points.set_row(r, x);
    }
    return batch;
}

// ============================================================================
// DENSITIES
// ============================================================================

inline double gaussian_log_density(const Gaussian& g, const Vector& x) {
    if (x.size() != g.dim())
        throw std::invalid_argument("gaussian_log_density: dimension mismatch");
    const Vector d = sub(x, g.mean);
    const double quad = g.cov.quad_inv(d);
    return -0.5 * (quad + static_cast<double>(g.dim()) * kLog2Pi + g.cov.log_det());
}

namespace detail {

inline Gaussian gaussian_convolved(const Gaussian& base, const GaussianNoise& noise) {
    const std::size_t k = base.dim();
    Matrix cov = base.cov.entries();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            cov(i, j) += noise.scale * noise.shift[i] * noise.shift[j];
    return Gaussian(add(base.mean, noise.shift), SpdMatrix(std::move(cov)));
}

}  // namespace detail

// Exact log density of the noise-injected model. Gaussian noise convolves in
// closed form; uniform box noise convolves coordinate-wise when the base
// covariance is diagonal (each marginal is a normal CDF increment over a
// 2*eps window).
inline double poisoned_log_density(const PoisonedModel& q, const Vector& x) {
    if (x.size() != q.dim()) throw std::invalid_argument("poisoned_log_density: dimension mismatch");
    if (is_none(q.noise)) return gaussian_log_density(q.base, x);
    if (const auto* g = std::get_if<GaussianNoise>(&q.noise)) {
        return gaussian_log_density(detail::gaussian_convolved(q.base, *g), x);
    }
    const auto& u = std::get<UniformBoxNoise>(q.noise);
    if (!q.base.cov.is_diagonal()) {
        throw std::invalid_argument(
            "poisoned_log_density: exact density unavailable for uniform noise with "
            "non-diagonal covariance; use mc_log_density instead");
    }
    double logq = 0.0;
    for (std::size_t i = 0; i < q.dim(); ++i) {
        const double sd = std::sqrt(q.base.cov(i, i));
        const double lo = (x[i] - u.half_width - q.base.mean[i]) / sd;
        const double hi = (x[i] + u.half_width - q.base.mean[i]) / sd;
        const double mass = normal_interval_mass(lo, hi);
        logq += std::log(mass / (2.0 * u.half_width));
    }
    return logq;
}

// Monte-Carlo estimate of the convolved log density, for noise laws without
// an exact form: log (1/m) sum_j p_base(x - u_j) over m noise draws,
// accumulated in log space with a max shift so far-tail points stay finite.
inline double mc_log_density(const PoisonedModel& q, const Vector& x, std::size_t m, Seed seed) {
    if (x.size() != q.dim()) throw std::invalid_argument("mc_log_density: dimension mismatch");
    if (is_none(q.noise)) return gaussian_log_density(q.base, x);
    if (m < 1000) throw std::invalid_argument("mc_log_density: m must be >= 1000");

    Xoshiro256ss rng(seed);
    Vector logs(m);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        const Vector u = sample_noise(q.noise, q.dim(), rng);
        logs[j] = gaussian_log_density(q.base, sub(x, u));
        max_log = std::max(max_log, logs[j]);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += std::exp(logs[j] - max_log);
    return max_log + std::log(acc / static_cast<double>(m));
}

// ============================================================================
// CONDITIONING AND ORTHOGONAL SAMPLING
// ============================================================================

// Conditional law of the second block of a joint Gaussian given that the
// first block equals `a`:
//   N(mu2 + S21 S11^{-1} (a - mu1),  S22 - S21 S11^{-1} S12).
inline Gaussian conditional_gaussian(const Vector& mu1, const Vector& mu2, const Matrix& s11,
                                     const Matrix& s12, const Matrix& s21, const Matrix& s22,
                                     const Vector& a) {
    const std::size_t k1 = mu1.size(), k2 = mu2.size();
    if (s11.rows() != k1 || s11.cols() != k1 || s22.rows() != k2 || s22.cols() != k2 ||
        s12.rows() != k1 || s12.cols() != k2 || s21.rows() != k2 || s21.cols() != k1 ||
        a.size() != k1)
        throw std::invalid_argument("conditional_gaussian: block shapes inconsistent");

    // Validates joint SPD-ness (and with it S11 invertibility) up front.
    Matrix joint(k1 + k2, k1 + k2);
    for (std::size_t i = 0; i < k1; ++i)
        for (std::size_t j = 0; j < k1; ++j) joint(i, j) = s11(i, j);
    for (std::size_t i = 0; i < k1; ++i)
        for (std::size_t j = 0; j < k2; ++j) joint(i, k1 + j) = s12(i, j);
    for (std::size_t i = 0; i < k2; ++i)
        for (std::size_t j = 0; j < k1; ++j) joint(k1 + i, j) = s21(i, j);
    for (std::size_t i = 0; i < k2; ++i)
        for (std::size_t j = 0; j < k2; ++j) joint(k1 + i, k1 + j) = s22(i, j);
    SpdMatrix joint_spd(std::move(joint));
    (void)joint_spd;

    const SpdMatrix s11_spd{s11};
    const Vector innovation = s11_spd.solve(sub(a, mu1));
    Vector mean = mu2;
    for (std::size_t i = 0; i < k2; ++i) mean[i] += dot(s21.row(i), innovation);

    Matrix cov(k2, k2);
    for (std::size_t j = 0; j < k2; ++j) {
        Vector col(k1);
        for (std::size_t i = 0; i < k1; ++i) col[i] = s12(i, j);
        const Vector solved = s11_spd.solve(col);
        for (std::size_t i = 0; i < k2; ++i) cov(i, j) = s22(i, j) - dot(s21.row(i), solved);
    }
    // Exact symmetrization; the two triangles differ only by rounding.
    for (std::size_t i = 0; i < k2; ++i)
        for (std::size_t j = i + 1; j < k2; ++j) {
            const double v = 0.5 * (cov(i, j) + cov(j, i));
            cov(i, j) = v;
            cov(j, i) = v;
        }
    return Gaussian(std::move(mean), SpdMatrix(std::move(cov)));
}

// Haar-distributed orthogonal matrix: QR of an i.i.d. standard normal matrix
// with the R-diagonal sign correction.
inline Matrix random_orthogonal(std::size_t k, Seed seed) {
    if (k < 1) throw std::invalid_argument("random_orthogonal: k must be >= 1");
    Xoshiro256ss rng(seed);
    Matrix g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) g(i, j) = rng.normal();
    return qr_orthogonal_factor(g);
}

}  // namespace lecam
