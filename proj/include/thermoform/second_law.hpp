#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "measure.hpp"

namespace thermoform {

// Thermodynamic operation: push a measure through the dual of the transfer
// operator of a normalized kernel. Cylinder weights transform as
//
//   mu3([w]) = J(w_1..w_kJ) * mu1([w_2..w_m]),    m >= kJ,
//
// so the result is again suitable, one level deeper, with kernel
// J3(z) = J1(sigma z) J(z) / J(sigma z). Mass is preserved because J
// prepend-sums to one.
inline SuitableMeasure dual_push(const FiniteMemoryFn& log_j, const SuitableMeasure& mu1) {
    require(log_j.alphabet == mu1.alphabet, "alphabet mismatch");
    require(is_jacobian(log_j, 1e-10), "dual_push requires a normalized kernel");
    unsigned d = mu1.alphabet;
    unsigned kj = std::max(log_j.depth, 1u), k1 = mu1.depth;
    unsigned k3 = std::max(k1, kj) + 1;

    FiniteMemoryFn log_j3 =
        compose_shift(mu1.log_irn) + extend_depth(log_j, kj) - compose_shift(log_j);

    FiniteMemoryFn j = extend_depth(log_j, kj);
    index_t nb = word_count(d, k3 - 1);
    std::vector<double> base(nb);
    for (index_t w = 0; w < nb; ++w) {
        index_t tail = shift_index(w, d, k3 - 1);
        base[w] = std::exp(j.on_prefix(w, k3 - 1)) * cylinder_weight(mu1, tail, k3 - 2);
    }

    SuitableMeasure out;
    out.alphabet = d;
    out.depth = k3;
    out.log_irn = std::move(log_j3);
    out.base = std::move(base);
    validate(out);
    return out;
}

inline SuitableMeasure iterate_push(const FiniteMemoryFn& log_j, SuitableMeasure mu,
                                    unsigned n) {
    for (unsigned i = 0; i < n; ++i) mu = dual_push(log_j, mu);
    return mu;
}

// closed form for the kernel after n pushes: J_n(z) = J0(sigma^n z) J(z) / J(sigma^n z)
inline FiniteMemoryFn iterated_kernel(const FiniteMemoryFn& log_j0,
                                      const FiniteMemoryFn& log_j, unsigned n) {
    FiniteMemoryFn a = log_j0, b = log_j;
    for (unsigned i = 0; i < n; ++i) {
        a = compose_shift(a);
        b = compose_shift(b);
    }
    return a + log_j - b;
}

struct TraceRow {
    unsigned n = 0;
    double deviation = 0;  // max cylinder gap to the equilibrium at probe depth
    double kl_to_equilibrium = 0;
};

// Weak convergence of the push orbit toward equilibrium(logJ): cylinder gaps
// shrink geometrically while the KL divergence to the target stays constant.
inline std::vector<TraceRow> weak_convergence_trace(const FiniteMemoryFn& log_j,
                                                    const SuitableMeasure& mu0,
                                                    unsigned n_max, unsigned probe_depth) {
    require(probe_depth <= 4, "probe depth must be <= 4");
    SuitableMeasure eq = equilibrium(log_j);
    std::vector<double> target = weights_at_depth(eq, probe_depth);
    std::vector<TraceRow> rows;
    SuitableMeasure mu = mu0;
    for (unsigned n = 0; n <= n_max; ++n) {
        if (n > 0) mu = dual_push(log_j, mu);
        std::vector<double> w = weights_at_depth(mu, probe_depth);
        double dev = 0;
        for (index_t i = 0; i < w.size(); ++i) dev = std::max(dev, std::abs(w[i] - target[i]));
        rows.push_back({n, dev, kl(mu, eq)});
    }
    return rows;
}

// KL divergence between two measures is invariant under a joint push
// (coarse-graining identity); residual should sit at rounding level.
inline double cg_entropy_production(const FiniteMemoryFn& log_j, const SuitableMeasure& mu1,
                                    const SuitableMeasure& mu2) {
    return kl(mu1, mu2) - kl(dual_push(log_j, mu1), dual_push(log_j, mu2));
}

// Pushing mu1 toward the equilibrium of log_j2 does not change its KL
// distance to that equilibrium.
inline double ep_dyn(const FiniteMemoryFn& log_j2, const SuitableMeasure& mu1) {
    SuitableMeasure mu2 = equilibrium(log_j2);
    return kl(mu1, mu2) - kl(dual_push(log_j2, mu1), mu2);
}

// Along the push orbit, kl(mu_n, equilibrium) has the closed-form companion
// integral of [log J0 - log J] o sigma^n against mu_n; returns both sides.
inline std::pair<double, double> kl_along_orbit(const FiniteMemoryFn& log_j,
                                                const SuitableMeasure& mu0, unsigned n) {
    SuitableMeasure mu_n = iterate_push(log_j, mu0, n);
    double kl_value = kl(mu_n, equilibrium(log_j));
    FiniteMemoryFn diff = mu0.log_irn - extend_depth(log_j, std::max(log_j.depth, 1u));
    for (unsigned i = 0; i < n; ++i) diff = compose_shift(diff);
    double rhs = integrate(mu_n, diff);
    return {kl_value, rhs};
}

struct SecondLawReport {
    double h1 = 0;                 // entropy of the input measure
    double h3 = 0;                 // entropy of the re-equilibrated push
    double pressure_log_j2 = 0;    // pressure of the pushed measure's kernel (should be 0)
    double ac_residual = 0;        // max gap in mu3 = phi * mu2 over probe cylinders
    double cross_entropy_residual = 0; // |h3 + integral of log J1 d mu3|
};

// The second-law pipeline: push mu1 through logJ, read off the pushed
// measure's own kernel J2, and re-equilibrate. The equilibrium mu3 of log J2
// is absolutely continuous with respect to the push (density = eigenfunction)
// and its entropy dominates the input entropy.
inline SecondLawReport second_law_v1(const FiniteMemoryFn& log_j, const SuitableMeasure& mu1) {
    SuitableMeasure mu2 = dual_push(log_j, mu1);
    const FiniteMemoryFn& log_j2 = mu2.log_irn;
    unsigned d = mu2.alphabet, k2 = mu2.depth;

    PerronData pd = perron(log_j2);
    SuitableMeasure mu3 = equilibrium(log_j2);

    SecondLawReport rep;
    rep.h1 = entropy(mu1);
    rep.h3 = entropy(mu3);
    rep.pressure_log_j2 = std::log(pd.lambda);

    // density normalization against the pushed measure, then cylinder check
    std::vector<double> marg2 = weights_at_depth(mu2, k2 - 1);
    double pairing = 0;
    for (index_t u = 0; u < marg2.size(); ++u) pairing += pd.phi.table[u] * marg2[u];
    require_numeric(pairing > 0, "second_law_v1: degenerate density pairing");
    std::vector<double> w2 = weights_at_depth(mu2, k2);
    std::vector<double> w3 = weights_at_depth(mu3, k2);
    double ac = 0;
    for (index_t w = 0; w < w2.size(); ++w) {
        double phi_w = pd.phi.on_prefix(w, k2) / pairing;
        ac = std::max(ac, std::abs(w3[w] - phi_w * w2[w]));
    }
    rep.ac_residual = ac;
    rep.cross_entropy_residual = std::abs(rep.h3 + integrate(mu3, mu1.log_irn));
    (void)d;
    return rep;
}

// Margin of the sufficient condition for entropy increase under the push:
// 1 - integral of sum_a J(a x)^2 / J(x) d mu1. Nonnegative margin guarantees
// entropy_change >= 0; the converse does not hold.
inline double rrty_margin(const FiniteMemoryFn& log_j, const SuitableMeasure& mu1) {
    require(log_j.alphabet == mu1.alphabet, "alphabet mismatch");
    require(is_jacobian(log_j, 1e-10), "rrty_margin requires a normalized kernel");
    unsigned d = log_j.alphabet;
    unsigned kj = std::max(log_j.depth, 1u);
    FiniteMemoryFn j = extend_depth(log_j, kj);
    index_t n = word_count(d, kj);
    std::vector<double> g(n);
    for (index_t v = 0; v < n; ++v) {
        index_t head = prefix_index(v, d, kj, kj - 1);
        double s = 0;
        for (unsigned a = 0; a < d; ++a)
            s += std::exp(2.0 * j.table[prepend_index(a, head, d, kj - 1)]);
        g[v] = s / std::exp(j.table[v]);
    }
    return 1.0 - integrate(mu1, FiniteMemoryFn(d, kj, std::move(g)));
}

inline double entropy_change(const FiniteMemoryFn& log_j, const SuitableMeasure& mu1) {
    return entropy(dual_push(log_j, mu1)) - entropy(mu1);
}

} // namespace thermoform
