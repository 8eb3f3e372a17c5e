#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "lecam/bounds.hpp"
#include "lecam/distributions.hpp"
#include "lecam/divergence.hpp"
#include "oracles.hpp"

using namespace lecam;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("general adversarial bound", "[bounds]") {
    REQUIRE_THAT(lecam_adversarial_general(1.0, 0.5, 0.0), WithinAbs(0.125, 1e-15));
    REQUIRE_THAT(lecam_adversarial_general(1.0, 0.5, 0.04), WithinAbs(0.135, 1e-15));
    REQUIRE(lecam_adversarial_general(0.0, 0.9, 1.3) == 0.0);
    REQUIRE_THROWS_AS(lecam_adversarial_general(1.0, 1.2, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(lecam_adversarial_general(1.0, 0.5, 2.5), std::invalid_argument);
}

TEST_CASE("delta interval", "[bounds]") {
    REQUIRE(delta_interval(0.0) == std::pair{0.0, 0.0});
    REQUIRE(delta_interval(0.01) == std::pair{0.0, 0.02});
    REQUIRE(delta_interval(0.5) == std::pair{0.0, 1.0});
    REQUIRE_THROWS_AS(delta_interval(1.5), std::invalid_argument);
}

TEST_CASE("bound result spans the delta interval", "[bounds]") {
    const BoundResult r = make_bound_result("mean", 0.1, 0.30326532985631671, 0.01);
    REQUIRE(r.delta_lo == 0.0);
    REQUIRE(r.delta_hi == 0.02);
    REQUIRE(r.bound_at_delta_hi >= r.bound_at_delta_lo);
    REQUIRE(r.bound_at_delta_lo ==
            lecam_adversarial_general(r.separation, r.affinity_term, r.delta_lo));
    REQUIRE(r.bound_at_delta_hi ==
            lecam_adversarial_general(r.separation, r.affinity_term, r.delta_hi));
    // With beta = 0 the interval collapses and the two bounds coincide.
    const BoundResult clean = make_bound_result("mean", 0.1, 0.5, 0.0);
    REQUIRE(clean.bound_at_delta_hi == clean.bound_at_delta_lo);
}

TEST_CASE("mean estimation bound values", "[bounds]") {
    REQUIRE_THAT(mean_estimation_bound(1.0, 100, 0.0), WithinAbs(0.0075816332464079178, 1e-15));
    REQUIRE_THAT(mean_estimation_bound(1.0, 100, 0.02), WithinAbs(0.0080816332464079178, 1e-15));
    REQUIRE_THAT(mean_estimation_bound(4.0, 1, 0.0), WithinAbs(0.1516326649281584, 1e-14));
}

TEST_CASE("classification bound values", "[bounds]") {
    REQUIRE_THAT(classification_bound(1.0, 100, 0.0), WithinAbs(7.5816332464079178e-4, 1e-16));
    REQUIRE_THAT(classification_bound(1.0, 1, 0.0), WithinAbs(0.075816332464079178, 1e-15));
    double prev = classification_bound(2.0, 50, 0.0);
    for (double delta : {0.01, 0.05, 0.2, 1.0}) {
        const double b = classification_bound(2.0, 50, delta);
        REQUIRE(b > prev);
        prev = b;
    }
}

TEST_CASE("procrustes bound values and admissibility", "[bounds]") {
    REQUIRE_THAT(procrustes_bound(1.0, 1.0, 100, 2, 0.0), WithinAbs(4.5984930146430290e-4, 1e-16));
    REQUIRE_THAT(procrustes_bound(1.0, 1.0, 100, 2, 0.05), WithinAbs(5.8484930146430290e-4, 1e-16));

    // eta^2/sigma^2 just past 4kn is rejected with the admissibility condition.
    const double eta = std::sqrt(4.0 * 2.0 * 1.0 + 1.0);
    REQUIRE_THROWS_WITH(procrustes_bound(eta, 1.0, 1, 2, 0.0),
                        Catch::Matchers::ContainsSubstring("admissibility"));
}

TEST_CASE("quadratic separation optimizer", "[bounds]") {
    // alpha = n/(2 lambda) at n = 100, lambda = 1: the interior optimum is the
    // mean-estimation plug-in u = sqrt(lambda/n).
    const auto [u1, f1] = optimize_separation_quadratic(50.0, 0.0, kInf);
    REQUIRE_THAT(u1, WithinAbs(0.1, 1e-12));
    REQUIRE_THAT(f1, WithinAbs(mean_estimation_bound(1.0, 100, 0.0), 1e-15));

    const auto [u2, f2] = optimize_separation_quadratic(0.5, 0.0, kInf);
    REQUIRE_THAT(u2, WithinAbs(1.0, 1e-12));

    // With delta = 0.5 the objective rises across the whole bounded domain.
    const auto [u3, f3] = optimize_separation_quadratic(1.0, 0.5, 4.0);
    const auto grid = oracles::grid_maximize(
        [](double u) { return u / 8.0 * (std::exp(-u * u) + 1.0); }, 0.0, 4.0, 100000);
    REQUIRE_THAT(u3, WithinAbs(4.0, 1e-9));
    REQUIRE_THAT(u3, WithinAbs(grid.first, 1e-4));
    REQUIRE(f3 >= grid.second - 1e-12);

    REQUIRE_THROWS_AS(optimize_separation_quadratic(1.0, 0.1, kInf), std::invalid_argument);
}

TEST_CASE("linear separation optimizer", "[bounds]") {
    const auto [v1, g1] = optimize_separation_linear(100.0, 0.0, 1e6);
    REQUIRE_THAT(v1, WithinAbs(0.01, 1e-13));

    // Procrustes parameterization: a = n sigma^2 / eta^2, domain capped at 4k.
    const auto [v2, g2] = optimize_separation_linear(100.0, 0.0, 8.0);
    REQUIRE_THAT(v2, WithinAbs(0.01, 1e-13));
    REQUIRE_THAT(g2, WithinAbs(procrustes_bound(1.0, 1.0, 100, 2, 0.0), 1e-16));

    // Interior optimum infeasible: the boundary wins.
    const auto [v3, g3] = optimize_separation_linear(1.0, 0.0, 0.5);
    REQUIRE_THAT(v3, WithinAbs(0.5, 1e-12));
    const auto grid = oracles::grid_maximize(
        [](double v) { return v / 8.0 * std::exp(-v); }, 0.0, 0.5, 100000);
    REQUIRE_THAT(v3, WithinAbs(grid.first, 1e-4));

    REQUIRE_THROWS_AS(optimize_separation_linear(1.0, 0.1, kInf), std::invalid_argument);
}

TEST_CASE("optimizers dominate the plug-in points", "[bounds]") {
    for (double alpha : {0.5, 2.0, 20.0}) {
        for (double delta : {0.0, 0.02, 0.3}) {
            const auto [u, fu] = optimize_separation_quadratic(alpha, delta, 5.0);
            const double u_plug = std::min(1.0 / std::sqrt(2.0 * alpha), 5.0);
            const double f_plug = u_plug / 8.0 * (std::exp(-alpha * u_plug * u_plug) + 2.0 * delta);
            INFO("alpha " << alpha << " delta " << delta);
            REQUIRE(fu >= f_plug - 1e-15);
        }
    }
}

TEST_CASE("classification two-point kl", "[bounds]") {
    const SpdMatrix one = SpdMatrix::identity(1);
    REQUIRE(classification_kl({0.7}, {0.7}, one) == 0.0);
    REQUIRE_THAT(classification_kl({0.0}, {1.0}, one), WithinAbs(0.5, 1e-14));

    const SpdMatrix sigma(Matrix::from_rows({{2.0, 0.3}, {0.3, 1.0}}));
    Xoshiro256ss rng(Seed{41});
    for (int i = 0; i < 20; ++i) {
        const Vector w1{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const Vector w2{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const Vector d = sub(w1, w2);
        REQUIRE(classification_kl(w1, w2, sigma) <=
                dot(d, d) / (2.0 * sigma.min_eigenvalue()) + 1e-14);
    }
}

TEST_CASE("classification kl against a joint mixture monte carlo oracle", "[bounds][slow]") {
    // Sample (x, Y) from the w1 model and average the conditional log ratio;
    // the label marginal is shared so it cancels.
    const SpdMatrix one = SpdMatrix::identity(1);
    const Vector w1{0.0}, w2{1.0};
    const Gaussian g1(w1, one);
    Xoshiro256ss rng(Seed{314});
    const std::size_t m = 1000000;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double y = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        const double x = y * w1[0] + rng.normal();
        const Gaussian c1(Vector{y * w1[0]}, one);
        const Gaussian c2(Vector{y * w2[0]}, one);
        const double r = gaussian_log_density(c1, {x}) - gaussian_log_density(c2, {x});
        const double delta = r - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (r - mean);
    }
    const double se = std::sqrt(m2 / static_cast<double>(m - 1) / static_cast<double>(m));
    REQUIRE_THAT(classification_kl(w1, w2, one), WithinAbs(mean, 3.0 * se));
}

TEST_CASE("procrustes two-point kl", "[bounds]") {
    const Matrix eye = Matrix::identity(2);
    REQUIRE(procrustes_kl(eye, eye, 1.0, 1.0).kl == 0.0);

    Matrix rot(2, 2);
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;  // 90 degree rotation
    const ProcrustesKl r = procrustes_kl(eye, rot, 1.0, 1.0);
    REQUIRE_THAT(r.kl, WithinAbs(4.0, 1e-12));
    REQUIRE_THAT(r.v, WithinAbs(4.0, 1e-12));

    Matrix neg(2, 2);
    neg(0, 0) = neg(1, 1) = -1.0;
    REQUIRE_THAT(procrustes_kl(eye, neg, 1.0, 1.0).v, WithinAbs(8.0, 1e-12));  // 4k at k=2

    Matrix not_orth = Matrix::from_rows({{1.0, 0.1}, {0.0, 1.0}});
    REQUIRE_THROWS_WITH(procrustes_kl(eye, not_orth, 1.0, 1.0),
                        Catch::Matchers::ContainsSubstring("orthogonal"));
}

TEST_CASE("procrustes kl is twice the joint monte carlo kl", "[bounds][slow]") {
    // The derivation's exponent quantity drops the 1/2 of the conditional
    // Gaussian KL, so the joint MC estimate must land on half the value.
    const Matrix eye = Matrix::identity(2);
    Matrix rot(2, 2);
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;
    const double sigma = 1.0, eta = 1.0;
    const ProcrustesKl r = procrustes_kl(eye, rot, sigma, eta);

    const SpdMatrix cond_cov = SpdMatrix::scaled_identity(2, eta * eta);
    Xoshiro256ss rng(Seed{2718});
    const std::size_t m = 400000;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        Vector x{sigma * rng.normal(), sigma * rng.normal()};
        Vector y = add(eye * x, Vector{eta * rng.normal(), eta * rng.normal()});
        const Gaussian c1(eye * x, cond_cov);
        const Gaussian c2(rot * x, cond_cov);
        const double lr = gaussian_log_density(c1, y) - gaussian_log_density(c2, y);
        const double delta = lr - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (lr - mean);
    }
    const double se = std::sqrt(m2 / static_cast<double>(m - 1) / static_cast<double>(m));
    REQUIRE_THAT(r.kl / 2.0, WithinAbs(mean, 3.0 * se));
}

TEST_CASE("specialized bounds reduce to the general form at delta zero", "[bounds]") {
    const double lam = 2.3;
    const std::size_t n = 47;

    const auto [u, fu] = optimize_separation_quadratic(
        static_cast<double>(n) / (2.0 * lam), 0.0, kInf);
    const double kl_mean = static_cast<double>(n) * u * u / (2.0 * lam);
    REQUIRE_THAT(lecam_adversarial_general(u, affinity_lower_bound(kl_mean), 0.0),
                 WithinAbs(mean_estimation_bound(lam, n, 0.0), 1e-12));

    const double v_class = lam / static_cast<double>(n);
    const double kl_class = static_cast<double>(n) * v_class / (2.0 * lam);
    REQUIRE_THAT(lecam_adversarial_general(v_class, affinity_lower_bound(kl_class), 0.0),
                 WithinAbs(classification_bound(lam, n, 0.0), 1e-12));

    const double sg = 0.8, eta = 1.1;
    const std::size_t k = 2;
    const auto [v, gv] = optimize_separation_linear(
        static_cast<double>(n) * sg * sg / (eta * eta), 0.0, 4.0 * static_cast<double>(k));
    const double kl_proc = static_cast<double>(n) * sg * sg * v / (eta * eta);
    REQUIRE_THAT(lecam_adversarial_general(v, affinity_lower_bound(kl_proc), 0.0),
                 WithinAbs(procrustes_bound(eta, sg, n, k, 0.0), 1e-12));
}
