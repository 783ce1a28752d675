#include <catch2/catch_amalgamated.hpp>

#include <thermoform/info_geom.hpp>
#include <thermoform/measure.hpp>
#include <thermoform/rng.hpp>

#include <cmath>
#include <utility>
#include <vector>

using namespace thermoform;
using Catch::Matchers::WithinAbs;

namespace {

const FiniteMemoryFn coin_flip_direction(2, 1, {1.0, -1.0});

SuitableMeasure maximal_entropy() { return bernoulli({0.5, 0.5}); }

}  // namespace

TEST_CASE("projection lands in the kernel of the transfer operator", "[tangent]") {
    Rng rng(801);
    for (int trial = 0; trial < 10; ++trial) {
        unsigned d = 2 + trial % 2;
        SuitableMeasure mu = equilibrium(random_potential(d, 1 + trial % 2, rng));
        FiniteMemoryFn eta = random_potential(d, 1 + trial % 3, rng);
        TangentVector t = tangent_project(mu, eta);
        REQUIRE(tangent_kernel_residual(t) <= 1e-12);
        REQUIRE_NOTHROW(check_tangent(t));
        // projecting a second time changes nothing
        TangentVector tt = tangent_project(mu, t.xi);
        REQUIRE(sup_diff(tt.xi, t.xi) <= 1e-12);
        REQUIRE(fisher_information(t) >= 0.0);
    }
    // projection requires an invariant base point
    SuitableMeasure drifting = eigenprobability(FiniteMemoryFn(2, 2, {0.3, -0.2, 0.5, 0.1}));
    REQUIRE_THROWS_AS(tangent_project(drifting, coin_flip_direction), validation_error);
}

TEST_CASE("the metric agrees with variance and pressure curvature", "[metric]") {
    // at the coin-flip measure the centered coordinate has unit metric
    SuitableMeasure uni = maximal_entropy();
    TangentVector t = tangent_project(uni, coin_flip_direction);
    REQUIRE_THAT(fisher_information(t), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(asymptotic_variance(uni, t.xi), WithinAbs(1.0, 1e-12));
    auto [slope, curvature] = pressure_derivatives(uni.log_irn, t.xi);
    REQUIRE_THAT(slope, WithinAbs(0.0, 1e-10));
    REQUIRE_THAT(curvature, WithinAbs(1.0, 1e-4));

    Rng rng(802);
    for (int trial = 0; trial < 5; ++trial) {
        SuitableMeasure mu = equilibrium(random_potential(2, 1 + trial % 2, rng));
        TangentVector tr = tangent_project(mu, random_potential(2, 1 + trial % 2, rng));
        double fi = fisher_information(tr);
        double av = asymptotic_variance(mu, tr.xi);
        double pc = pressure_derivatives(mu.log_irn, tr.xi).second;
        REQUIRE_THAT(av, WithinAbs(fi, 1e-10 * std::max(1.0, fi)));
        REQUIRE_THAT(pc, WithinAbs(fi, 1e-4 * std::max(1.0, fi)));
    }
}

TEST_CASE("the pressure curve through the coin flip is log cosh", "[metric]") {
    for (double theta : {0.1, 0.3, 0.7}) {
        double p = pressure(maximal_entropy().log_irn + theta * coin_flip_direction);
        REQUIRE_THAT(p, WithinAbs(std::log(std::cosh(theta)), 1e-12));
    }
}

TEST_CASE("coboundaries are null directions of the variance", "[metric]") {
    Rng rng(803);
    for (int trial = 0; trial < 5; ++trial) {
        unsigned d = 2 + trial % 2;
        SuitableMeasure mu = equilibrium(random_potential(d, 2, rng));
        FiniteMemoryFn c = random_potential(d, 1, rng);
        REQUIRE_THAT(asymptotic_variance(mu, c - compose_shift(c)), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("covariance is symmetric and bilinear enough to trust", "[metric]") {
    SuitableMeasure mu = equilibrium(FiniteMemoryFn(2, 2, {0.4, -0.3, 0.2, 0.1}));
    FiniteMemoryFn f(2, 1, {0.7, -0.2});
    FiniteMemoryFn g(2, 2, {0.1, 0.5, -0.4, 0.3});
    double fg = asymptotic_covariance(mu, f, g);
    double gf = asymptotic_covariance(mu, g, f);
    REQUIRE_THAT(fg, WithinAbs(gf, 1e-12));
    REQUIRE_THAT(asymptotic_covariance(mu, 2.0 * f, g), WithinAbs(2.0 * fg, 1e-11));
}

TEST_CASE("divergence grows quadratically with the metric as curvature", "[taylor]") {
    SuitableMeasure uni = maximal_entropy();
    TangentVector t = tangent_project(uni, coin_flip_direction);
    std::vector<double> thetas{-0.01, -0.005, 0.005, 0.01};
    KlTaylorTable table = kl_taylor(uni, uni, t.xi, thetas);

    REQUIRE_THAT(table.slope, WithinAbs(0.0, 1e-13));
    REQUIRE_THAT(table.curvature, WithinAbs(1.0, 1e-12));
    REQUIRE(table.strongly_relaxing);
    REQUIRE(table.rows.size() == thetas.size());

    double num = 0.0, den = 0.0;
    for (const KlTaylorRow& row : table.rows) {
        // moving along the coin-flip line, the divergence is log cosh theta
        REQUIRE_THAT(row.kl, WithinAbs(std::log(std::cosh(row.theta)), 1e-12));
        num += row.kl * row.theta * row.theta;
        den += std::pow(row.theta, 4.0);
    }
    double fitted = 2.0 * num / den;
    REQUIRE_THAT(fitted, WithinAbs(table.curvature, 0.01 * table.curvature));
}

TEST_CASE("the divergence slope separates the two endpoint averages", "[taylor]") {
    SuitableMeasure start = bernoulli({0.6, 0.4});
    SuitableMeasure base = maximal_entropy();
    TangentVector t = tangent_project(base, coin_flip_direction);
    KlTaylorTable table = kl_taylor(start, base, t.xi, {-0.01, 0.01});
    // -integral at the start plus integral at the base: -(0.2) + 0
    REQUIRE_THAT(table.slope, WithinAbs(-0.2, 1e-13));
    REQUIRE(table.strongly_relaxing);

    KlTaylorTable other = kl_taylor(bernoulli({0.4, 0.6}), base, t.xi, {-0.01, 0.01});
    REQUIRE_THAT(other.slope, WithinAbs(0.2, 1e-13));
    REQUIRE_FALSE(other.strongly_relaxing);

    // the grid is clamped to the trust region of the expansion
    REQUIRE_THROWS_AS(kl_taylor(start, base, t.xi, {0.5}), validation_error);
}

TEST_CASE("finite-time information grows one unit per step on coin flips", "[finite-time]") {
    SuitableMeasure uni = maximal_entropy();
    REQUIRE_THAT(fisher_at_time_n(uni, coin_flip_direction, 1), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(fisher_at_time_n(uni, coin_flip_direction, 2), WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(fisher_at_time_n(uni, coin_flip_direction, 4), WithinAbs(3.0, 1e-9));
    REQUIRE_THAT(fisher_at_time_n(uni, coin_flip_direction, 8), WithinAbs(7.0, 1e-9));

    // the per-step rate approaches the asymptotic variance from below
    double rate = fisher_at_time_n(uni, coin_flip_direction, 8) / 8.0;
    double var = asymptotic_variance(uni, tangent_project(uni, coin_flip_direction).xi);
    REQUIRE(std::abs(rate - var) / var <= 0.25);

    REQUIRE_THROWS_AS(fisher_at_time_n(uni, coin_flip_direction, 9), validation_error);
    REQUIRE_THROWS_AS(fisher_at_time_n(uni, coin_flip_direction, 0), validation_error);
}
