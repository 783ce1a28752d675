#include <catch2/catch_amalgamated.hpp>

#include <thermoform/maxent.hpp>
#include <thermoform/measure.hpp>
#include <thermoform/rng.hpp>

#include <cmath>
#include <optional>
#include <vector>

using namespace thermoform;
using Catch::Matchers::WithinAbs;

namespace {

PotentialFamily indicator_family() {
    PotentialFamily fam;
    fam.alphabet = 2;
    fam.constraints = {FiniteMemoryFn(2, 1, {1.0, 0.0})};
    return fam;
}

PotentialFamily two_constraint_family() {
    PotentialFamily fam;
    fam.alphabet = 2;
    fam.constraints = {FiniteMemoryFn(2, 1, {1.0, 0.0}),
                       FiniteMemoryFn(2, 2, {1.0, 0.0, 0.0, 1.0})};
    return fam;
}

PotentialFamily generated_family() {
    PotentialFamily fam = indicator_family();
    fam.has_generator = true;
    fam.gen_base = FiniteMemoryFn(2, 1, {1.0, 0.0});
    fam.gen_direction = FiniteMemoryFn(2, 1, {0.0, 1.0});
    return fam;
}

}  // namespace

TEST_CASE("the pressure surface of the indicator family is softplus", "[maxent]") {
    PotentialFamily fam = indicator_family();
    for (double z : {-1.5, 0.0, 0.8}) {
        REQUIRE_THAT(pressure_surface(fam, {z}),
                     WithinAbs(std::log(std::exp(z) + 1.0), 1e-12));
        // gradient = logistic mean of the indicator
        double grad = pressure_gradient(fam, {z})[0];
        REQUIRE_THAT(grad, WithinAbs(std::exp(z) / (std::exp(z) + 1.0), 1e-9));
    }
}

TEST_CASE("coefficients round-trip through their moment map", "[maxent]") {
    PotentialFamily fam1 = indicator_family();
    PotentialFamily fam2 = two_constraint_family();
    Rng rng(901);
    for (int trial = 0; trial < 25; ++trial) {
        double z = 4.0 * rng.uniform() - 2.0;
        std::vector<double> x = pressure_gradient(fam1, {z});
        std::vector<double> back = maxent_solve(fam1, x);
        REQUIRE_THAT(back[0], WithinAbs(z, 1e-8));

        std::vector<double> z2{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        std::vector<double> x2 = pressure_gradient(fam2, z2);
        std::vector<double> back2 = maxent_solve(fam2, x2);
        REQUIRE_THAT(back2[0], WithinAbs(z2[0], 1e-8));
        REQUIRE_THAT(back2[1], WithinAbs(z2[1], 1e-8));
    }
}

TEST_CASE("the logit solution is exact for a mean-0.3 coin", "[maxent]") {
    std::vector<double> z = maxent_solve(indicator_family(), {0.3});
    REQUIRE_THAT(z[0], WithinAbs(std::log(3.0 / 7.0), 1e-10));
}

TEST_CASE("the dual value is the entropy of the solving state", "[maxent]") {
    // alpha(x) = P(z*) - x z* collapses to the coin entropy at mean x
    for (double x : {0.3, 0.5, 0.62}) {
        double expect = -(x * std::log(x) + (1.0 - x) * std::log(1.0 - x));
        REQUIRE_THAT(legendre_alpha(indicator_family(), {x}), WithinAbs(expect, 1e-9));
    }
}

TEST_CASE("targets outside the constraint range are rejected", "[maxent]") {
    REQUIRE_THROWS_AS(maxent_solve(indicator_family(), {1.5}), validation_error);
    REQUIRE_THROWS_AS(maxent_solve(indicator_family(), {0.0}), validation_error);
    REQUIRE_THROWS_AS(maxent_solve(indicator_family(), {0.3, 0.3}), validation_error);

    PotentialFamily degenerate;
    degenerate.alphabet = 2;
    degenerate.constraints = {FiniteMemoryFn(2, 1, {1.0, 0.0}),
                              FiniteMemoryFn(2, 1, {1.0, 0.0})};
    REQUIRE_THROWS_AS(maxent_solve(degenerate, {0.3, 0.3}), validation_error);
}

TEST_CASE("susceptibilities invert each other with opposite sign", "[maxent]") {
    PotentialFamily fam = indicator_family();
    SusceptibilityPair at0 = susceptibility(fam, {0.0});
    REQUIRE_THAT(at0.sp[0], WithinAbs(0.25, 1e-6));
    REQUIRE_THAT(at0.se[0], WithinAbs(-4.0, 4e-4));
    REQUIRE(at0.inverse_residual <= 1e-4);

    // away from the center the curvature is the logistic variance q(1-q)
    SusceptibilityPair at6 = susceptibility(fam, {0.6});
    double q = std::exp(0.6) / (std::exp(0.6) + 1.0);
    REQUIRE_THAT(at6.sp[0], WithinAbs(q * (1.0 - q), 1e-5));
    REQUIRE(at6.inverse_residual <= 1e-4);

    SusceptibilityPair pair2 = susceptibility(two_constraint_family(), {0.2, -0.3});
    REQUIRE(pair2.m == 2);
    REQUIRE(pair2.inverse_residual <= 1e-3);
    // response matrices are symmetric
    REQUIRE_THAT(pair2.sp[1], WithinAbs(pair2.sp[2], 1e-8));
    REQUIRE_THAT(pair2.se[1], WithinAbs(pair2.se[2], 1e-3));
}

TEST_CASE("the fundamental relation couples entropy to energy", "[gibbs]") {
    FiniteMemoryFn two_level(2, 1, {0.0, 1.0});
    std::vector<GibbsRow> rows = gibbs_equation(two_level, {0.5, 1.0, 2.0});
    REQUIRE(rows.size() == 3);
    for (const GibbsRow& row : rows) {
        // closed form: the equilibrium of -beta H is a logistic coin
        double p_hi = 1.0 / (1.0 + std::exp(row.beta));
        REQUIRE_THAT(row.energy, WithinAbs(p_hi, 1e-12));
        double expect_h = -(p_hi * std::log(p_hi) + (1.0 - p_hi) * std::log(1.0 - p_hi));
        REQUIRE_THAT(row.entropy_v, WithinAbs(expect_h, 1e-12));
        REQUIRE_THAT(row.dh_de, WithinAbs(row.beta, 1e-3));
    }
    REQUIRE_THROWS_AS(gibbs_equation(two_level, {0.05}), validation_error);
    REQUIRE_THROWS_AS(gibbs_equation(two_level, {}), validation_error);
}

TEST_CASE("work and heat rates recombine into the energy rate", "[first-law]") {
    PotentialFamily fam = generated_family();

    EnergyRate fixed_z = energy_rate_decomposition(fam, 0, std::nullopt, {0.4}, 0.2);
    REQUIRE_THAT(fixed_z.dW + fixed_z.dQ - fixed_z.dU, WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(fixed_z.pressure_p, WithinAbs(-fixed_z.dW, 1e-12));

    EnergyRate fixed_x =
        energy_rate_decomposition(fam, 0, std::optional<std::vector<double>>{{0.55}}, {}, 0.2);
    REQUIRE_THAT(fixed_x.dW + fixed_x.dQ - fixed_x.dU, WithinAbs(0.0, 1e-8));

    PotentialFamily bare = indicator_family();
    REQUIRE_THROWS_AS(energy_rate_decomposition(bare, 0, std::nullopt, {0.4}, 0.2),
                      validation_error);
}

TEST_CASE("operation accounting balances to rounding", "[first-law]") {
    Rng rng(902);
    for (int trial = 0; trial < 30; ++trial) {
        unsigned d = 2 + trial % 2;
        FiniteMemoryFn j1 = random_jacobian(d, 1 + trial % 2, rng);
        FiniteMemoryFn j2 = random_jacobian(d, 1 + (trial / 2) % 2, rng);
        SuitableMeasure mu = (trial % 2 == 0)
                                 ? equilibrium(random_potential(d, 1 + trial % 2, rng))
                                 : eigenprobability(random_potential(d, 1, rng));
        ThermoAccount acc = thermo_operation_accounting(j1, j2, mu);
        REQUIRE_THAT(acc.dW + acc.dQ - acc.dU, WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(acc.dU, WithinAbs(acc.E1 - acc.E3, 1e-15));
    }

    // operating with the starting kernel leaves the relative energy at zero
    FiniteMemoryFn j = markov_invariant({0.7, 0.3, 0.3, 0.7}, 2).log_irn;
    ThermoAccount same = thermo_operation_accounting(j, j, bernoulli({0.9, 0.1}));
    REQUIRE(same.E1 == 0.0);
    REQUIRE_THAT(same.E3, WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(same.dW + same.dQ, WithinAbs(0.0, 1e-15));
}
