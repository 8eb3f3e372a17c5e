#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lecam/adversary.hpp"
#include "oracles.hpp"

using namespace lecam;
using Catch::Matchers::WithinAbs;

TEST_CASE("gaussian noise tv bound and calibration", "[adversary]") {
    REQUIRE(gaussian_noise_tv_bound(0.0, 1.0, 10) == 0.0);
    REQUIRE_THAT(gaussian_noise_tv_bound(0.004, 4.0, 100), WithinAbs(0.01, 1e-15));
    REQUIRE_THAT(gaussian_noise_tv_bound(0.2, 1.0, 25), WithinAbs(0.5, 1e-15));

    REQUIRE(gaussian_budget_for_target(0.0, 1.0, 10) == 0.0);
    REQUIRE_THAT(gaussian_budget_for_target(0.01, 4.0, 100), WithinAbs(0.004, 1e-15));

    // Algebraic inverse round trip.
    Xoshiro256ss rng(Seed{11});
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform01();
        const double lam = rng.uniform(0.1, 5.0);
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 1000.0);
        const double c = gaussian_budget_for_target(t, lam, n);
        REQUIRE_THAT(gaussian_noise_tv_bound(c, lam, n), WithinAbs(t, 1e-12));
    }
}

TEST_CASE("sign moment matrices on canonical covariances", "[adversary]") {
    const SignMoments eye = sign_moment_matrices(SpdMatrix::identity(2));
    REQUIRE_THAT(eye.a(0, 0), WithinAbs(0.7978845608028654, 1e-14));
    REQUIRE(eye.a(0, 1) == 0.0);
    REQUIRE(eye.b(0, 0) == 1.0);
    REQUIRE(eye.b(0, 1) == 0.0);

    const SignMoments pos =
        sign_moment_matrices(SpdMatrix(Matrix::from_rows({{1.0, 0.5}, {0.5, 1.0}})));
    REQUIRE_THAT(pos.v(0, 1), WithinAbs(0.5773502691896257, 1e-14));
    REQUIRE_THAT(pos.b(0, 1), WithinAbs(1.0 / 3.0, 1e-14));
    REQUIRE_THAT(pos.a(0, 1), WithinAbs(0.3989422804014327, 1e-14));

    // Negative correlation goes through the second branch and lands on
    // (2/pi) arcsin(-1/2).
    const SignMoments neg =
        sign_moment_matrices(SpdMatrix(Matrix::from_rows({{1.0, -0.5}, {-0.5, 1.0}})));
    REQUIRE_THAT(neg.b(0, 1), WithinAbs(-1.0 / 3.0, 1e-14));
    REQUIRE_THAT(neg.b(0, 1), WithinAbs((2.0 / kPi) * std::asin(-0.5), 1e-14));
}

TEST_CASE("sign covariances match the monte carlo oracle", "[adversary][slow]") {
    const struct {
        double s11, s12, s22;
    } cases[] = {{1.0, 0.0, 1.0}, {1.0, 0.5, 1.0}, {4.0, 1.0, 1.0}};
    std::uint64_t seed = 900;
    for (const auto& c : cases) {
        Matrix m(2, 2);
        m(0, 0) = c.s11;
        m(0, 1) = m(1, 0) = c.s12;
        m(1, 1) = c.s22;
        const auto [cov_sx, cov_ss] = sign_covariances(SpdMatrix(m));
        const auto mc = oracles::mc_sign_covariances(c.s11, c.s12, c.s22, 1000000, Seed{seed++});
        INFO("s12 = " << c.s12);
        REQUIRE_THAT(cov_sx, WithinAbs(mc.cov_sign_x, 0.01));
        REQUIRE_THAT(cov_ss, WithinAbs(mc.cov_sign_sign, 0.01));
    }
    const auto [zero_sx, zero_ss] = sign_covariances(SpdMatrix::identity(2));
    REQUIRE(zero_sx == 0.0);
    REQUIRE(zero_ss == 0.0);
    REQUIRE_THAT(sign_covariances(SpdMatrix(Matrix::from_rows({{4.0, 1.0}, {1.0, 1.0}}))).first,
                 WithinAbs(0.3989422804014327, 1e-14));
}

TEST_CASE("b matrix is positive semidefinite on random correlations", "[adversary]") {
    for (std::size_t trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + trial % 3;
        const Matrix q = random_orthogonal(k, Seed{4000 + trial});
        Xoshiro256ss rng(Seed{5000 + trial});
        Matrix d(k, k);
        for (std::size_t i = 0; i < k; ++i) d(i, i) = rng.uniform(0.2, 3.0);
        Matrix spd = q * d * q.transposed();
        Matrix corr(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                corr(i, j) = spd(i, j) / std::sqrt(spd(i, i) * spd(j, j));
        for (std::size_t i = 0; i < k; ++i) corr(i, i) = 1.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) {
                const double v = 0.5 * (corr(i, j) + corr(j, i));
                corr(i, j) = corr(j, i) = v;
            }
        const SignMoments sm = sign_moment_matrices(SpdMatrix(corr));
        REQUIRE(symmetric_eigen(sm.b).values.front() >= -1e-8);
    }
}

TEST_CASE("uniform noise kl and tv bounds", "[adversary]") {
    const SpdMatrix one = SpdMatrix::identity(1);
    REQUIRE(uniform_noise_kl_bound(0.0, one) == 0.0);
    REQUIRE_THAT(uniform_noise_kl_bound(0.1, one), WithinAbs(0.0847884560802865, 1e-14));

    // Diagonal covariance separates into per-coordinate 1-D bounds.
    const SpdMatrix diag = SpdMatrix::diagonal({1.0, 2.5, 0.7});
    const double c = 0.15;
    double sum_1d = 0.0;
    for (double s : {1.0, 2.5, 0.7}) sum_1d += uniform_noise_kl_bound(c, SpdMatrix::diagonal({s}));
    REQUIRE_THAT(uniform_noise_kl_bound(c, diag), WithinAbs(sum_1d, 1e-13));

    REQUIRE(uniform_noise_tv_bound(0.0, one, 7) == 0.0);
    REQUIRE_THAT(uniform_noise_tv_bound(0.1, one, 1), WithinAbs(0.2058985867852018, 1e-13));
    REQUIRE(uniform_noise_tv_bound(0.1, diag, 9) ==
            pinsker_product_tv_upper(uniform_noise_kl_bound(0.1, diag), 9));
}

TEST_CASE("uniform budget calibration", "[adversary]") {
    const SpdMatrix one = SpdMatrix::identity(1);
    REQUIRE(uniform_budget_for_target(0.0, one, 10) == 0.0);
    REQUIRE_THAT(uniform_budget_for_target(0.2, one, 1), WithinAbs(0.0946510252482351, 1e-12));

    const SpdMatrix sigma(Matrix::from_rows({{1.4, 0.3}, {0.3, 0.8}}));
    for (double t : {0.001, 0.01, 0.1, 0.5, 1.0}) {
        for (std::size_t n : {std::size_t{1}, std::size_t{10}, std::size_t{500}}) {
            const double c = uniform_budget_for_target(t, sigma, n);
            INFO("t = " << t << " n = " << n);
            REQUIRE_THAT(uniform_noise_tv_bound(c, sigma, n), WithinAbs(t, 1e-9));
        }
    }
}

TEST_CASE("exact gaussian poison kl and its monotonicity", "[adversary]") {
    const Gaussian p = Gaussian::standard(1);
    REQUIRE(gaussian_noise_kl_exact(p, GaussianNoise(Vector{0.0}, 0.3)) == 0.0);
    REQUIRE_THAT(gaussian_noise_kl_exact(p, GaussianNoise(Vector{0.1}, 0.0)),
                 WithinAbs(0.005, 1e-12));

    // Larger noise covariance scale can only lower the divergence.
    double prev = gaussian_noise_kl_exact(p, GaussianNoise(Vector{0.1}, 0.0));
    for (int i = 1; i < 20; ++i) {
        const double s = static_cast<double>(i) / 19.0;
        const double kl = gaussian_noise_kl_exact(p, GaussianNoise(Vector{0.1}, s));
        REQUIRE(kl <= prev + 1e-15);
        prev = kl;
    }
    REQUIRE(gaussian_noise_kl_exact(p, GaussianNoise(Vector{0.1}, 1.0)) <= 0.005);

    // Never exceeds the c^2/(2 lambda_min) envelope used by the TV bound.
    const SpdMatrix sigma(Matrix::from_rows({{2.0, 0.5}, {0.5, 1.0}}));
    const Gaussian p2(Vector{0.0, 0.0}, sigma);
    Xoshiro256ss rng(Seed{606});
    for (int i = 0; i < 20; ++i) {
        Vector shift{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        const double c = norm2(shift);
        const double kl = gaussian_noise_kl_exact(p2, GaussianNoise(shift, rng.uniform01()));
        REQUIRE(kl <= c * c / (2.0 * sigma.min_eigenvalue()) + 1e-12);
    }
}

TEST_CASE("budget struct validates ranges", "[adversary]") {
    REQUIRE_NOTHROW(AdversaryBudget(0.5, 0.1, 0.2));
    REQUIRE_THROWS_AS(AdversaryBudget(1.5, 0.1, 0.2), std::invalid_argument);
    REQUIRE_THROWS_AS(AdversaryBudget(0.5, -0.1, 0.2), std::invalid_argument);
    REQUIRE_THROWS_AS(AdversaryBudget(0.5, 0.1, 1.2), std::invalid_argument);
}
