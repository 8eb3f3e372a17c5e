#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lecam/distributions.hpp"
#include "oracles.hpp"

using namespace lecam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gaussian log density closed form", "[distributions]") {
    const Gaussian std1 = Gaussian::standard(1);
    REQUIRE_THAT(gaussian_log_density(std1, {0.0}), WithinAbs(-0.9189385332046727, 1e-14));

    // At x = mu the quadratic term vanishes.
    const SpdMatrix sigma(Matrix::from_rows({{2.0, 0.3}, {0.3, 1.0}}));
    const Gaussian g(Vector{1.0, -2.0}, sigma);
    REQUIRE_THAT(gaussian_log_density(g, {1.0, -2.0}),
                 WithinAbs(-0.5 * (2.0 * kLog2Pi + sigma.log_det()), 1e-14));

    // 1-D, variance 4, evaluated at two sigmas from the mean.
    const Gaussian wide(Vector{0.0}, SpdMatrix::diagonal({4.0}));
    REQUIRE_THAT(gaussian_log_density(wide, {2.0}), WithinAbs(-2.1120857137646181, 1e-13));
}

TEST_CASE("sample_poisoned law of large numbers", "[distributions][slow]") {
    const std::size_t n = 1000000;
    const PoisonedModel clean(Gaussian::standard(2), no_noise());
    const SampleBatch batch = sample_poisoned(clean, n, Seed{2024});
    const double envelope = 4.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += batch.points(r, j);
        mean /= static_cast<double>(n);
        REQUIRE_THAT(mean, WithinAbs(0.0, envelope));
    }
}

TEST_CASE("gaussian noise draws match their first two moments", "[distributions][slow]") {
    const Vector shift{0.6, -0.3};
    const double s = 0.4;
    const NoiseSpec noise = GaussianNoise(shift, s);
    Xoshiro256ss rng(Seed{5150});
    const std::size_t m = 1000000;
    Vector mean(2, 0.0);
    Matrix cov(2, 2);
    std::vector<Vector> draws;
    draws.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        draws.push_back(sample_noise(noise, 2, rng));
        mean = add(mean, draws.back());
    }
    mean = scaled(mean, 1.0 / static_cast<double>(m));
    for (const auto& d : draws)
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) cov(a, b) += (d[a] - mean[a]) * (d[b] - mean[b]);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) cov(a, b) /= static_cast<double>(m - 1);

    for (std::size_t j = 0; j < 2; ++j) REQUIRE_THAT(mean[j], WithinAbs(shift[j], 5e-3));
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            REQUIRE_THAT(cov(a, b), WithinAbs(s * shift[a] * shift[b], 5e-3));
}

TEST_CASE("uniform box noise respects its support", "[distributions]") {
    const PoisonedModel q(Gaussian::standard(1), UniformBoxNoise(0.5, 1));
    Xoshiro256ss rng(Seed{31337});
    for (int i = 0; i < 100000; ++i) {
        const Vector u = sample_noise(q.noise, 1, rng);
        REQUIRE(u[0] >= -0.5);
        REQUIRE(u[0] <= 0.5);
    }
}

TEST_CASE("poisoned density: gaussian noise closed form", "[distributions]") {
    const Gaussian base(Vector{0.2, -0.1}, SpdMatrix(Matrix::from_rows({{1.5, 0.4}, {0.4, 0.9}})));

    // Zero shift forces zero noise covariance, so the density is the clean one.
    const PoisonedModel degenerate(base, GaussianNoise(Vector{0.0, 0.0}, 0.7));
    const Vector x{0.5, 0.5};
    REQUIRE(poisoned_log_density(degenerate, x) == gaussian_log_density(base, x));

    // Nonzero shift: compare against the explicitly convolved Gaussian.
    const Vector shift{0.3, 0.1};
    const double s = 0.5;
    const PoisonedModel shifted(base, GaussianNoise(shift, s));
    Matrix cov = base.cov.entries();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) cov(i, j) += s * shift[i] * shift[j];
    const Gaussian convolved(add(base.mean, shift), SpdMatrix(cov));
    REQUIRE_THAT(poisoned_log_density(shifted, x),
                 WithinAbs(gaussian_log_density(convolved, x), 1e-14));
}

TEST_CASE("poisoned density: uniform noise exact form", "[distributions]") {
    const PoisonedModel q(Gaussian::standard(1), UniformBoxNoise(0.5, 1));
    REQUIRE_THAT(poisoned_log_density(q, {0.0}), WithinAbs(-0.9599163336956223, 1e-12));

    // Vanishing box width recovers the clean density.
    const PoisonedModel narrow(Gaussian::standard(1), UniformBoxNoise(1e-6, 1));
    REQUIRE_THAT(poisoned_log_density(narrow, {0.7}),
                 WithinAbs(gaussian_log_density(Gaussian::standard(1), {0.7}), 1e-9));

    const PoisonedModel bad(
        Gaussian(Vector{0.0, 0.0}, SpdMatrix(Matrix::from_rows({{1.0, 0.5}, {0.5, 1.0}}))),
        UniformBoxNoise(0.2, 2));
    REQUIRE_THROWS_WITH(poisoned_log_density(bad, {0.0, 0.0}),
                        Catch::Matchers::ContainsSubstring("exact density unavailable"));
}

TEST_CASE("mc log density degenerate and convergent cases", "[distributions]") {
    const PoisonedModel clean(Gaussian::standard(2), no_noise());
    REQUIRE(mc_log_density(clean, {0.3, -0.4}, 2000, Seed{1}) ==
            gaussian_log_density(Gaussian::standard(2), {0.3, -0.4}));

    const PoisonedModel q(Gaussian(Vector{0.0, 0.0}, SpdMatrix::diagonal({1.0, 2.0})),
                          UniformBoxNoise(0.4, 2));
    const Vector x{0.5, -1.0};
    const double exact = poisoned_log_density(q, x);
    REQUIRE_THAT(mc_log_density(q, x, 100000, Seed{9}), WithinAbs(exact, 0.01));

    // Far tail: log-sum-exp path must stay finite.
    const double far = mc_log_density(q, {40.0, -40.0}, 2000, Seed{10});
    REQUIRE(std::isfinite(far));
    REQUIRE(far < -500.0);

    REQUIRE_THROWS_AS(mc_log_density(q, x, 10, Seed{2}), std::invalid_argument);
}

TEST_CASE("mc log density variance halves when m doubles", "[distributions]") {
    const PoisonedModel q(Gaussian::standard(1), UniformBoxNoise(0.5, 1));
    const Vector x{1.2};
    const auto sample_variance = [&](std::size_t m, std::uint64_t tag) {
        const std::size_t reps = 100;
        std::vector<double> vals(reps);
        for (std::size_t r = 0; r < reps; ++r)
            vals[r] = mc_log_density(q, x, m, derive_child_seed(Seed{808}, tag, r));
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(reps);
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        return ss / static_cast<double>(reps - 1);
    };
    const double var_m = sample_variance(2000, 1);
    const double var_2m = sample_variance(4000, 2);
    const double ratio = var_m / var_2m;
    INFO("variance ratio " << ratio);
    REQUIRE(ratio > 2.0 / 1.5);
    REQUIRE(ratio < 2.0 * 1.5);
}

TEST_CASE("conditional gaussian", "[distributions]") {
    // Independent blocks: conditioning does nothing.
    const Matrix z12(1, 1, 0.0);
    const Gaussian ind = conditional_gaussian({0.0}, {3.0}, Matrix::identity(1), z12, z12,
                                              Matrix::from_rows({{2.0}}), {5.0});
    REQUIRE_THAT(ind.mean[0], WithinAbs(3.0, 1e-14));
    REQUIRE_THAT(ind.cov(0, 0), WithinAbs(2.0, 1e-14));

    // Standard bivariate with correlation 0.5, conditioned on x1 = 2.
    const Matrix rho = Matrix::from_rows({{0.5}});
    const Gaussian cond = conditional_gaussian({0.0}, {0.0}, Matrix::identity(1), rho, rho,
                                               Matrix::identity(1), {2.0});
    REQUIRE_THAT(cond.mean[0], WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(cond.cov(0, 0), WithinAbs(0.75, 1e-14));

    // Observing the prior mean leaves the conditional mean unchanged.
    const Gaussian noop = conditional_gaussian({1.5}, {-2.0}, Matrix::identity(1), rho, rho,
                                               Matrix::identity(1), {1.5});
    REQUIRE_THAT(noop.mean[0], WithinAbs(-2.0, 1e-14));

    // Singular first block is rejected while validating the joint matrix.
    const Matrix singular(1, 1, 0.0);
    REQUIRE_THROWS(conditional_gaussian({0.0}, {0.0}, singular, z12, z12, Matrix::identity(1),
                                        {0.0}));
}

TEST_CASE("random orthogonal matrices", "[distributions]") {
    const Matrix one = random_orthogonal(1, Seed{11});
    REQUIRE(std::abs(std::abs(one(0, 0)) - 1.0) < 1e-14);

    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const Matrix q = random_orthogonal(4, Seed{seed});
        REQUIRE(max_orthogonality_defect(q) <= 1e-10);
    }
    REQUIRE(max_abs(random_orthogonal(5, Seed{77}) - random_orthogonal(5, Seed{77})) == 0.0);
}

TEST_CASE("uniform convolution dominates the shifted clean density", "[distributions]") {
    // In 1-D with centered base the convolved density at x is at least the
    // clean density at x + eps * sign(x): the window average includes points
    // closer to the mode.
    const double eps = 0.5;
    const PoisonedModel q(Gaussian::standard(1), UniformBoxNoise(eps, 1));
    const Gaussian clean = Gaussian::standard(1);
    for (int i = -100; i <= 100; ++i) {
        const double x = 5.0 * static_cast<double>(i) / 100.0;
        const double sign_x = x < 0.0 ? -1.0 : 1.0;
        const double lhs = poisoned_log_density(q, {x});
        const double rhs = gaussian_log_density(clean, {x + eps * sign_x});
        INFO("x = " << x);
        REQUIRE(lhs >= rhs - 1e-12);
    }
}
