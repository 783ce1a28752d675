#pragma once

// Self-contained battery of randomized and closed-form invariant checks.
// Every check produces one row {name, residual, inputs, tolerance, pass};
// the CLI serializes the rows and fails the process when any row fails.
// Trials are seeded per-index so the battery is reproducible bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "function.hpp"
#include "info_geom.hpp"
#include "involution.hpp"
#include "maxent.hpp"
#include "measure.hpp"
#include "rng.hpp"
#include "second_law.hpp"
#include "transfer.hpp"
#include "word.hpp"

namespace thermoform {

struct CheckRow {
    std::string check;
    double residual = 0;
    std::string inputs;
    double tolerance = 0;
    bool pass = false;
};

namespace detail {

inline CheckRow make_row(std::string name, double residual, std::string inputs,
                         double tol) {
    CheckRow row;
    row.check = std::move(name);
    row.residual = residual;
    row.inputs = std::move(inputs);
    row.tolerance = tol;
    row.pass = residual <= tol;
    return row;
}

// Rotates through the three measure constructions so the randomized checks
// exercise invariant, merely suitable, and independent inputs alike.
inline SuitableMeasure random_suitable(unsigned d, unsigned k, Rng& rng,
                                       unsigned flavor) {
    switch (flavor % 3) {
        case 0: return equilibrium(random_potential(d, k, rng));
        case 1: return eigenprobability(random_potential(d, k, rng));
        default: {
            std::vector<double> p(d);
            double mass = 0;
            for (unsigned i = 0; i < d; ++i) {
                p[i] = 0.1 + rng.uniform();
                mass += p[i];
            }
            for (double& v : p) v /= mass;
            return bernoulli(p);
        }
    }
}

// Invariant measures only: equilibrium states, random chains, independent
// draws. The entropy-growth comparison is meaningful only on these (pushing
// an invariant start and re-equilibrating reproduces the start exactly,
// because the pushed kernel differs from the start kernel by a coboundary).
inline SuitableMeasure random_invariant(unsigned d, unsigned k, Rng& rng,
                                        unsigned flavor) {
    switch (flavor % 3) {
        case 0: return equilibrium(random_potential(d, k, rng));
        case 1: {
            std::vector<double> p(static_cast<std::size_t>(d) * d);
            for (unsigned c = 0; c < d; ++c) {
                double mass = 0;
                for (unsigned r = 0; r < d; ++r) {
                    p[r * d + c] = 0.1 + rng.uniform();
                    mass += p[r * d + c];
                }
                for (unsigned r = 0; r < d; ++r) p[r * d + c] /= mass;
            }
            return markov_invariant(p, d);
        }
        default: {
            std::vector<double> p(d);
            double mass = 0;
            for (unsigned i = 0; i < d; ++i) {
                p[i] = 0.1 + rng.uniform();
                mass += p[i];
            }
            for (double& v : p) v /= mass;
            return bernoulli(p);
        }
    }
}

// sup_x |sum_a J(a x) - 1|, the numeric version of the Jacobian predicate
inline double jacobian_residual(const FiniteMemoryFn& log_j) {
    FiniteMemoryFn ones = FiniteMemoryFn::constant(log_j.alphabet, 1.0);
    return sup_diff(apply_ruelle(log_j, ones), ones);
}

// two-state column-stochastic matrix with both diagonal entries equal to a
inline std::vector<double> two_state_matrix(double a) {
    return {a, 1.0 - a, 1.0 - a, a};
}

// the running example family: one constraint, the indicator of symbol 1 on
// a binary alphabet
inline PotentialFamily indicator_family() {
    PotentialFamily fam;
    fam.alphabet = 2;
    fam.constraints = {FiniteMemoryFn(2, 1, {1.0, 0.0})};
    return fam;
}

inline void check_normalization(std::vector<CheckRow>& rows, std::uint64_t seed) {
    double worst_j = 0, worst_p = 0;
    for (unsigned i = 0; i < 100; ++i) {
        unsigned d = 2 + i % 3, k = 1 + i % 4;
        Rng rng(seed + i);
        FiniteMemoryFn log_j = random_jacobian(d, k, rng);
        worst_j = std::max(worst_j, jacobian_residual(log_j));
        worst_p = std::max(worst_p, std::abs(pressure(log_j)));
    }
    std::string inputs = "100 random potentials, alphabet 2..4, depth 1..4";
    rows.push_back(make_row("jacobian_normalization", worst_j, inputs, 1e-12));
    rows.push_back(make_row("normalized_pressure", worst_p, inputs, 1e-12));
}

inline void check_kl_invariance(std::vector<CheckRow>& rows, std::uint64_t seed) {
    double worst_pair = 0, worst_eq = 0;
    for (unsigned i = 0; i < 100; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 1000 + i);
        FiniteMemoryFn log_j = random_jacobian(d, 1 + i % 2, rng);
        SuitableMeasure mu1 = random_suitable(d, 1 + i % 2, rng, i);
        SuitableMeasure mu2 = random_suitable(d, 1 + (i / 2) % 2, rng, i + 1);
        worst_pair = std::max(worst_pair,
                              std::abs(cg_entropy_production(log_j, mu1, mu2)));
        worst_eq = std::max(worst_eq, std::abs(ep_dyn(log_j, mu1)));
    }
    std::string inputs = "100 random kernel/measure trials, alphabet 2..3";
    rows.push_back(make_row("kl_invariance_pair", worst_pair, inputs, 1e-10));
    rows.push_back(make_row("kl_invariance_to_equilibrium", worst_eq, inputs, 1e-10));
}

inline void check_orbit_kernels(std::vector<CheckRow>& rows, std::uint64_t seed) {
    double worst_table = 0, worst_kl = 0;
    for (unsigned i = 0; i < 10; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 2000 + i);
        FiniteMemoryFn log_j = random_jacobian(d, 1 + i % 2, rng);
        SuitableMeasure mu0 = random_suitable(d, 1 + (i / 2) % 2, rng, i);
        for (unsigned n = 0; n <= 4; ++n) {
            SuitableMeasure mu_n = iterate_push(log_j, mu0, n);
            FiniteMemoryFn closed = iterated_kernel(mu0.log_irn, log_j, n);
            worst_table = std::max(worst_table, sup_diff(mu_n.log_irn, closed));
        }
        for (unsigned n = 0; n <= 3; ++n) {
            auto [lhs, rhs] = kl_along_orbit(log_j, mu0, n);
            worst_kl = std::max(worst_kl, std::abs(lhs - rhs));
        }
    }
    std::string inputs = "10 random kernel/measure pairs, pushes up to 4";
    rows.push_back(make_row("iterated_kernel_closed_form", worst_table, inputs, 1e-12));
    rows.push_back(make_row("kl_orbit_identity", worst_kl, inputs, 1e-10));
}

inline void check_entropy_growth(std::vector<CheckRow>& rows, std::uint64_t seed) {
    // entropy comparison is restricted to invariant starts: for those the
    // re-equilibrated measure coincides with the start measure, so h3 - h1
    // vanishes to rounding.  Non-invariant starts can move either way and are
    // exercised below only for the construction identities, which hold
    // unconditionally.
    double worst_gap = -1e300, worst_pressure = 0, worst_ac = 0, worst_cross = 0;
    for (unsigned i = 0; i < 100; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 3000 + i);
        FiniteMemoryFn log_j = random_jacobian(d, 1 + i % 2, rng);
        SuitableMeasure mu1 = random_invariant(d, 1 + (i / 3) % 2, rng, i);
        SecondLawReport rep = second_law_v1(log_j, mu1);
        worst_gap = std::max(worst_gap, rep.h1 - rep.h3);
        worst_pressure = std::max(worst_pressure, std::abs(rep.pressure_log_j2));
        worst_ac = std::max(worst_ac, rep.ac_residual);
        worst_cross = std::max(worst_cross, rep.cross_entropy_residual);
    }
    for (unsigned i = 0; i < 50; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 3500 + i);
        FiniteMemoryFn log_j = random_jacobian(d, 1 + i % 2, rng);
        SuitableMeasure mu1 = eigenprobability(random_potential(d, 1 + (i / 2) % 2, rng));
        SecondLawReport rep = second_law_v1(log_j, mu1);
        worst_pressure = std::max(worst_pressure, std::abs(rep.pressure_log_j2));
        worst_ac = std::max(worst_ac, rep.ac_residual);
        worst_cross = std::max(worst_cross, rep.cross_entropy_residual);
    }
    std::string all = "150 random kernel trials, invariant and general starts";
    rows.push_back(make_row("entropy_after_push", worst_gap,
                            "100 random kernel trials against invariant starts", 1e-12));
    rows.push_back(make_row("pressure_of_pushed_kernel", worst_pressure, all, 1e-10));
    rows.push_back(make_row("absolute_continuity", worst_ac, all, 1e-10));
    rows.push_back(make_row("push_cross_entropy", worst_cross, all, 1e-10));
}

inline void check_margin_implication(std::vector<CheckRow>& rows, std::uint64_t seed) {
    // seed the trial set with the canonical pair where the margin is known to
    // be positive, then add random trials; the implication "nonnegative margin
    // forces nonnegative entropy change" must hold on every one
    double worst = -1e300;
    SuitableMeasure chain = markov_invariant(two_state_matrix(0.7), 2);
    SuitableMeasure start = bernoulli({0.9, 0.1});
    if (rrty_margin(chain.log_irn, start) >= 0)
        worst = std::max(worst, -entropy_change(chain.log_irn, start));
    for (unsigned i = 0; i < 100; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 4000 + i);
        FiniteMemoryFn log_j = random_jacobian(d, 1 + i % 2, rng);
        SuitableMeasure mu1 = random_suitable(d, 1, rng, i);
        if (rrty_margin(log_j, mu1) >= 0)
            worst = std::max(worst, -entropy_change(log_j, mu1));
    }
    rows.push_back(make_row("sufficient_margin_implication", worst,
                            "canonical two-state pair plus 100 random trials", 1e-12));
}

inline void check_markov_closed_forms(std::vector<CheckRow>& rows) {
    SuitableMeasure mu = markov_invariant(two_state_matrix(0.7), 2);
    // symmetric chain: pi = (1/2, 1/2), so the entropy rate is the plain
    // binary entropy of the transition row
    double expected = -(0.7 * std::log(0.7) + 0.3 * std::log(0.3));
    rows.push_back(make_row("markov_entropy_closed_form",
                            std::abs(entropy(mu) - expected),
                            "two-state chain, stay probability 0.7", 1e-12));
    std::vector<double> w = weights_at_depth(mu, 2);
    std::vector<double> p = two_state_matrix(0.7);
    double worst = 0;
    for (unsigned i = 0; i < 2; ++i)
        for (unsigned j = 0; j < 2; ++j)
            worst = std::max(worst, std::abs(w[i * 2 + j] - p[j * 2 + i] * 0.5));
    rows.push_back(make_row("markov_cylinder_weights", worst,
                            "two-state chain, stay probability 0.7", 1e-14));
}

inline void check_fisher(std::vector<CheckRow>& rows, std::uint64_t seed) {
    double worst_three = 0;
    // canonical case first: maximal-entropy base on two symbols with the
    // centered coordinate direction, where everything equals 1
    {
        SuitableMeasure mu = bernoulli({0.5, 0.5});
        FiniteMemoryFn xi(2, 1, {1.0, -1.0});
        TangentVector t{mu, xi};
        double f = fisher_information(t);
        double v = asymptotic_variance(mu, xi);
        double p2 = pressure_derivatives(mu.log_irn, xi).second;
        double lo = std::min({f, v, p2}), hi = std::max({f, v, p2});
        worst_three = std::max(worst_three, (hi - lo) / std::max(1e-300, std::abs(lo)));

        double f8 = fisher_at_time_n(mu, xi, 8);
        rows.push_back(make_row("fisher_time_ratio", std::abs(f8 / 8.0 - v) / v,
                                "maximal-entropy base, centered coordinate", 0.25));
    }
    for (unsigned i = 0; i < 5; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 5000 + i);
        SuitableMeasure mu = equilibrium(random_potential(d, 1 + i % 2, rng));
        TangentVector t = tangent_project(mu, random_potential(d, 2, rng));
        double f = fisher_information(t);
        double v = asymptotic_variance(mu, t.xi);
        double p2 = pressure_derivatives(mu.log_irn, t.xi).second;
        double lo = std::min({f, v, p2}), hi = std::max({f, v, p2});
        worst_three = std::max(worst_three, (hi - lo) / std::max(1e-300, std::abs(lo)));
    }
    rows.push_back(make_row("fisher_three_way", worst_three,
                            "canonical case plus 5 random tangents", 1e-4));
}

inline void check_kl_quadratic(std::vector<CheckRow>& rows, std::uint64_t seed) {
    std::vector<double> thetas = {-1e-2, -5e-3, 5e-3, 1e-2};
    double worst = 0;
    auto fit_gap = [&](const SuitableMeasure& mu, const FiniteMemoryFn& xi) {
        KlTaylorTable t = kl_taylor(mu, mu, xi, thetas);
        // even function of theta here (mu1 = mu2), so fit kl = a theta^2
        double num = 0, den = 0;
        for (const KlTaylorRow& r : t.rows) {
            num += r.kl * r.theta * r.theta;
            den += r.theta * r.theta * r.theta * r.theta;
        }
        double fitted = 2.0 * num / den;
        return std::abs(fitted - t.curvature) / std::abs(t.curvature);
    };
    {
        SuitableMeasure mu = bernoulli({0.5, 0.5});
        worst = std::max(worst, fit_gap(mu, FiniteMemoryFn(2, 1, {1.0, -1.0})));
    }
    for (unsigned i = 0; i < 2; ++i) {
        unsigned d = 2 + i;
        Rng rng(seed + 6000 + i);
        SuitableMeasure mu = equilibrium(random_potential(d, 2, rng));
        TangentVector t = tangent_project(mu, random_potential(d, 2, rng));
        worst = std::max(worst, fit_gap(mu, t.xi));
    }
    rows.push_back(make_row("kl_quadratic_response", worst,
                            "canonical case plus 2 random tangents, theta up to 1e-2",
                            1e-2));
}

inline void check_maxent(std::vector<CheckRow>& rows, std::uint64_t seed) {
    // roundtrip z -> x -> z on one- and two-constraint families
    double worst_rt = 0;
    for (unsigned i = 0; i < 50; ++i) {
        Rng rng(seed + 7000 + i);
        PotentialFamily fam;
        fam.alphabet = 2;
        if (i % 2 == 0) {
            fam.constraints = {FiniteMemoryFn(2, 1, {1.0, 0.0})};
        } else {
            fam.constraints = {FiniteMemoryFn(2, 1, {1.0, 0.0}),
                               FiniteMemoryFn(2, 2, {1.0, 0.0, 0.0, 1.0})};
        }
        std::vector<double> z(fam.constraints.size());
        for (double& v : z) v = rng.symmetric();
        std::vector<double> x = pressure_gradient(fam, z);
        std::vector<double> back = maxent_solve(fam, x);
        for (std::size_t j = 0; j < z.size(); ++j)
            worst_rt = std::max(worst_rt, std::abs(back[j] - z[j]));
    }
    rows.push_back(make_row("maxent_roundtrip", worst_rt,
                            "50 random coefficient vectors, 1-2 constraints", 1e-8));

    // binary indicator constraint on an i.i.d. background has the explicit
    // solution z = logit(x)
    PotentialFamily fam = indicator_family();
    std::vector<double> z_star = maxent_solve(fam, {0.3});
    rows.push_back(make_row("logit_closed_form",
                            std::abs(z_star[0] - std::log(0.3 / 0.7)),
                            "indicator constraint, target mean 0.3", 1e-10));

    SusceptibilityPair s0 = susceptibility(fam, {0.0});
    rows.push_back(make_row("susceptibility_at_origin", std::abs(s0.sp[0] - 0.25),
                            "indicator constraint at the origin", 1e-6));
    double worst_inv = s0.inverse_residual;
    SusceptibilityPair s1 = susceptibility(fam, {0.6});
    worst_inv = std::max(worst_inv, s1.inverse_residual);
    rows.push_back(make_row("susceptibility_inverse", worst_inv,
                            "indicator constraint at z = 0 and z = 0.6", 1e-4));
}

inline void check_gibbs(std::vector<CheckRow>& rows) {
    FiniteMemoryFn H(2, 1, {0.0, 1.0});
    std::vector<double> grid(20);
    double lo = std::log(0.1), hi = std::log(10.0);
    for (unsigned i = 0; i < 20; ++i)
        grid[i] = std::exp(lo + (hi - lo) * i / 19.0);
    grid.front() = 0.1;  // keep the endpoints exactly inside the allowed window
    grid.back() = 10.0;
    std::vector<GibbsRow> table = gibbs_equation(H, grid);
    double worst = 0;
    for (const GibbsRow& r : table)
        if (std::isfinite(r.dh_de))
            worst = std::max(worst, std::abs(r.dh_de - r.beta));
    rows.push_back(make_row("gibbs_temperature_slope", worst,
                            "two-level energy, 20-point grid in [0.1, 10]", 1e-3));
}

inline void check_first_law(std::vector<CheckRow>& rows, std::uint64_t seed) {
    double worst = 0;
    for (unsigned i = 0; i < 100; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 8000 + i);
        FiniteMemoryFn j1 = random_jacobian(d, 1 + i % 2, rng);
        FiniteMemoryFn j2 = random_jacobian(d, 1 + (i / 2) % 2, rng);
        SuitableMeasure mu1 = random_suitable(d, 1 + (i / 4) % 2, rng, i);
        ThermoAccount acc = thermo_operation_accounting(j1, j2, mu1);
        worst = std::max(worst, std::abs(acc.dW + acc.dQ - acc.dU));
    }
    rows.push_back(make_row("first_law_accounting", worst,
                            "100 random kernel pairs with random start measures",
                            1e-12));

    PotentialFamily fam = indicator_family();
    fam.has_generator = true;
    fam.gen_base = FiniteMemoryFn(2, 1, {1.0, 0.0});
    fam.gen_direction = FiniteMemoryFn(2, 1, {0.0, 1.0});
    EnergyRate rate = energy_rate_decomposition(fam, 0, std::nullopt, {0.4}, 0.2);
    rows.push_back(make_row("energy_rate_first_law",
                            std::abs(rate.dW + rate.dQ - rate.dU),
                            "affine one-parameter family at fixed coefficients",
                            1e-8));
}

inline void check_entropy_production(std::vector<CheckRow>& rows, std::uint64_t seed) {
    double worst_sym = 0;
    for (unsigned i = 0; i < 20; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 9000 + i);
        FiniteMemoryFn a = random_potential(d, 2, rng);
        for (index_t v = 0; v < a.size(); ++v) {
            index_t r = reverse_index(v, d, 2);
            if (r > v) {
                double m = 0.5 * (a.table[v] + a.table[r]);
                a.table[v] = a.table[r] = m;
            }
        }
        worst_sym = std::max(worst_sym, std::abs(entropy_production(a)));
    }
    rows.push_back(make_row("symmetric_zero_production", worst_sym,
                            "20 random palindromic pair potentials", 1e-12));

    double worst_two = 0;
    for (unsigned i = 0; i < 20; ++i) {
        Rng rng(seed + 9100 + i);
        SuitableMeasure mu = markov_invariant(two_state_matrix(0.1 + 0.8 * rng.uniform()), 2);
        worst_two = std::max(worst_two, std::abs(entropy_production(mu.log_irn)));
    }
    rows.push_back(make_row("two_state_zero_production", worst_two,
                            "20 random two-state chains", 1e-12));

    // three-state rotation-biased chain: each state sends 0.7 forward, 0.2
    // backward, keeps 0.1; the stationary law is uniform and the closed-form
    // production rate sums to (0.7 - 0.2) ln(0.7 / 0.2)
    std::vector<double> circulant = {0.1, 0.2, 0.7, 0.7, 0.1, 0.2, 0.2, 0.7, 0.1};
    SuitableMeasure mu3 = markov_invariant(circulant, 3);
    double expected = 0.5 * std::log(3.5);
    rows.push_back(make_row("circulant_production_value",
                            std::abs(entropy_production(mu3.log_irn) - expected),
                            "three-state rotation-biased chain", 1e-9));

    double worst_flip = 0;
    for (unsigned i = 0; i < 20; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 9200 + i);
        FiniteMemoryFn a = random_potential(d, 2, rng);
        InvolutionData inv = involution_kernel(a);
        double direct = entropy_production(a);
        double via_kl = kl(equilibrium(a), equilibrium(inv.dual_potential));
        worst_flip = std::max(worst_flip, std::abs(direct - via_kl));
    }
    rows.push_back(make_row("production_vs_flip_kl", worst_flip,
                            "20 random pair potentials, alphabet 2..3", 1e-10));
}

inline void check_duality(std::vector<CheckRow>& rows, std::uint64_t seed) {
    double worst = 0;
    for (unsigned i = 0; i < 50; ++i) {
        unsigned d = 2 + i % 2;
        Rng rng(seed + 9500 + i);
        worst = std::max(worst, duality_check(random_potential(d, 2, rng)));
    }
    rows.push_back(make_row("duality_proportionality", worst,
                            "50 random pair potentials, alphabet 2..3", 1e-10));
}

inline void check_orbit_trace(std::vector<CheckRow>& rows) {
    SuitableMeasure chain = markov_invariant(two_state_matrix(0.7), 2);
    SuitableMeasure start = bernoulli({0.9, 0.1});
    std::vector<TraceRow> trace = weak_convergence_trace(chain.log_irn, start, 5, 2);
    double worst_dev = -1e300, worst_kl = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        worst_dev = std::max(worst_dev, trace[i].deviation - trace[i - 1].deviation);
    for (const TraceRow& r : trace)
        worst_kl = std::max(worst_kl,
                            std::abs(r.kl_to_equilibrium - trace[0].kl_to_equilibrium));
    std::string inputs = "two-state chain kernel from a skewed independent start";
    rows.push_back(make_row("orbit_monotone_deviation", worst_dev, inputs, 0.0));
    rows.push_back(make_row("kl_constant_along_orbit", worst_kl, inputs, 1e-10));
}

} // namespace detail

// Runs the whole battery deterministically for the given seed. Row order is
// fixed; residuals depend only on the seed.
inline std::vector<CheckRow> verify_all(std::uint64_t seed) {
    std::vector<CheckRow> rows;
    detail::check_normalization(rows, seed);
    detail::check_kl_invariance(rows, seed);
    detail::check_orbit_kernels(rows, seed);
    detail::check_entropy_growth(rows, seed);
    detail::check_margin_implication(rows, seed);
    detail::check_markov_closed_forms(rows);
    detail::check_fisher(rows, seed);
    detail::check_kl_quadratic(rows, seed);
    detail::check_maxent(rows, seed);
    detail::check_gibbs(rows);
    detail::check_first_law(rows, seed);
    detail::check_entropy_production(rows, seed);
    detail::check_duality(rows, seed);
    detail::check_orbit_trace(rows);
    return rows;
}

} // namespace thermoform
