#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "second_law.hpp"

namespace thermoform {

// Tangent directions at an equilibrium state are functions in the kernel of
// its transfer operator; they automatically have zero mean.
struct TangentVector {
    SuitableMeasure base;  // invariant, kernel = log J
    FiniteMemoryFn xi;
};

inline double tangent_kernel_residual(const TangentVector& t) {
    return sup_norm(apply_ruelle(t.base.log_irn, t.xi));
}

inline void check_tangent(const TangentVector& t, double tol = 1e-12) {
    require(tangent_kernel_residual(t) <= tol,
            "tangent vector is not in the kernel of the transfer operator");
    require(std::abs(integrate(t.base, t.xi)) <= tol,
            "tangent vector does not have zero mean");
}

// Project any function onto the tangent space: xi = eta - (L eta) o sigma.
// L xi = L eta - (L eta) L(1) = 0 since the kernel is normalized, and the
// mean drops out by duality; projecting twice changes nothing.
inline TangentVector tangent_project(const SuitableMeasure& mu, const FiniteMemoryFn& eta) {
    require(is_invariant(mu), "tangent_project needs an invariant base measure");
    FiniteMemoryFn xi = eta - compose_shift(apply_ruelle(mu.log_irn, eta));
    return {mu, std::move(xi)};
}

// Green-Kubo asymptotic covariance of two observables under an invariant
// measure: cov(f,g) + sum_{n>=1} [cov(f o sigma^n, g) + cov(f, g o sigma^n)],
// with each correlation computed through powers of the transfer operator.
// The tail is cut once the operator has contracted the centered observable
// below tol in a bound that dominates every remaining term.
inline double asymptotic_covariance(const SuitableMeasure& mu, const FiniteMemoryFn& f,
                                    const FiniteMemoryFn& g, double tol = 1e-14) {
    require(is_invariant(mu), "asymptotic covariance needs an invariant measure");
    FiniteMemoryFn fb = f + (-integrate(mu, f));
    FiniteMemoryFn gb = g + (-integrate(mu, g));
    double s = integrate(mu, fb * gb);
    double mass_f = 0, mass_g = 0;
    {
        std::vector<double> w_f = weights_at_depth(mu, std::max(fb.depth, mu.depth));
        FiniteMemoryFn fe = extend_depth(fb, std::max(fb.depth, mu.depth));
        for (index_t i = 0; i < w_f.size(); ++i) mass_f += w_f[i] * std::abs(fe.table[i]);
        std::vector<double> w_g = weights_at_depth(mu, std::max(gb.depth, mu.depth));
        FiniteMemoryFn ge = extend_depth(gb, std::max(gb.depth, mu.depth));
        for (index_t i = 0; i < w_g.size(); ++i) mass_g += w_g[i] * std::abs(ge.table[i]);
    }
    FiniteMemoryFn lf = fb, lg = gb;
    const unsigned cap = 100000;
    for (unsigned n = 1; n <= cap; ++n) {
        lf = apply_ruelle(mu.log_irn, lf);
        lg = apply_ruelle(mu.log_irn, lg);
        s += integrate(mu, lf * gb) + integrate(mu, lg * fb);
        double bound = sup_norm(lf) * mass_g + sup_norm(lg) * mass_f;
        if (bound < tol) return s;
    }
    throw numeric_error("asymptotic covariance series did not settle in 100000 terms");
}

inline double asymptotic_variance(const SuitableMeasure& mu, const FiniteMemoryFn& xi,
                                  double tol = 1e-14) {
    double v = asymptotic_covariance(mu, xi, xi, tol);
    require_numeric(v >= -1e-12, "asymptotic variance came out negative");
    return v;
}

// first and second derivative of theta -> pressure(A + theta xi) at 0,
// by central differences
inline std::pair<double, double> pressure_derivatives(const FiniteMemoryFn& A,
                                                      const FiniteMemoryFn& xi,
                                                      double h_step = 1e-3) {
    require(h_step >= 1e-4 && h_step <= 1e-2, "step must lie in [1e-4, 1e-2]");
    double p0 = pressure(A);
    double pp = pressure(A + h_step * xi);
    double pm = pressure(A + (-h_step) * xi);
    return {(pp - pm) / (2 * h_step), (pp - 2 * p0 + pm) / (h_step * h_step)};
}

// Riemannian norm squared of a tangent vector: the plain second moment,
// which on the kernel coincides with the asymptotic variance and with the
// second pressure derivative along xi.
inline double fisher_information(const TangentVector& t) {
    check_tangent(t);
    return integrate(t.base, t.xi * t.xi);
}

// Fisher information of the n-cylinder marginals along the exponential curve
// theta -> equilibrium(log J + theta xi), by central differences of cylinder
// log-likelihoods at theta = 0.
inline double fisher_at_time_n(const SuitableMeasure& mu, const FiniteMemoryFn& xi,
                               unsigned n, double h_step = 1e-3) {
    require(n >= 1 && n <= 8, "time index must lie in 1..8");
    require(is_invariant(mu), "fisher_at_time_n needs an invariant base measure");
    SuitableMeasure plus = equilibrium(mu.log_irn + h_step * xi);
    SuitableMeasure minus = equilibrium(mu.log_irn + (-h_step) * xi);
    std::vector<double> w0 = weights_at_depth(mu, n - 1);
    std::vector<double> wp = weights_at_depth(plus, n - 1);
    std::vector<double> wm = weights_at_depth(minus, n - 1);
    double s = 0;
    for (index_t i = 0; i < w0.size(); ++i) {
        double v = (std::log(wp[i]) - std::log(wm[i])) / (2 * h_step);
        s += w0[i] * v * v;
    }
    return s;
}

struct KlTaylorRow {
    double theta = 0;
    double kl = 0;
    double slope_pred = 0;      // predicted d/dtheta at 0 (same in every row)
    double curvature_pred = 0;  // predicted d2/dtheta2 at 0 (same in every row)
};

struct KlTaylorTable {
    std::vector<KlTaylorRow> rows;
    double slope = 0;      // -integral(xi) d mu1 + integral(xi) d mu2
    double curvature = 0;  // asymptotic variance of xi at mu2
    bool strongly_relaxing = false; // slope <= 0; reported, never asserted
};

// KL divergence from mu1 to the exponential curve through mu2 in direction
// xi, sampled on a theta grid, with first/second derivative predictions.
inline KlTaylorTable kl_taylor(const SuitableMeasure& mu1, const SuitableMeasure& mu2,
                               const FiniteMemoryFn& xi, const std::vector<double>& thetas) {
    require(is_invariant(mu2), "kl_taylor needs an invariant second measure");
    for (double t : thetas)
        require(t >= -0.1 && t <= 0.1, "theta grid must lie in [-0.1, 0.1]");
    KlTaylorTable out;
    out.slope = -integrate(mu1, xi) + integrate(mu2, xi);
    out.curvature = asymptotic_variance(mu2, xi);
    out.strongly_relaxing = out.slope <= 0;
    for (double t : thetas) {
        SuitableMeasure mu_t = equilibrium(mu2.log_irn + t * xi);
        out.rows.push_back({t, kl(mu1, mu_t), out.slope, out.curvature});
    }
    return out;
}

} // namespace thermoform
