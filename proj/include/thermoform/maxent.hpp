#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "info_geom.hpp"

namespace thermoform {

// A list of extensive observables f_1..f_m, optionally with one constraint
// made parameter-dependent through an affine generator f_k^v = base + v*dir.
struct PotentialFamily {
    unsigned alphabet = 0;
    std::vector<FiniteMemoryFn> constraints;
    bool has_generator = false;
    FiniteMemoryFn gen_base, gen_direction;
};

inline FiniteMemoryFn combine(const PotentialFamily& fam, const std::vector<double>& z) {
    require(z.size() == fam.constraints.size(), "coefficient count must match constraints");
    FiniteMemoryFn acc = FiniteMemoryFn::constant(fam.alphabet, 0.0);
    for (std::size_t j = 0; j < z.size(); ++j) acc = acc + z[j] * fam.constraints[j];
    return acc;
}

inline double pressure_surface(const PotentialFamily& fam, const std::vector<double>& z) {
    for (double v : z) require(std::isfinite(v), "coefficients must be finite");
    return pressure(combine(fam, z));
}

// x_j = expectation of f_j under the equilibrium state of sum z_j f_j
inline std::vector<double> pressure_gradient(const PotentialFamily& fam,
                                             const std::vector<double>& z) {
    SuitableMeasure mu = equilibrium(combine(fam, z));
    std::vector<double> x(fam.constraints.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = integrate(mu, fam.constraints[j]);
    return x;
}

// Green-Kubo covariance matrix of the constraints at the equilibrium of
// sum z_j f_j; this is the exact Hessian of the pressure surface.
inline std::vector<double> covariance_matrix(const PotentialFamily& fam,
                                             const std::vector<double>& z) {
    SuitableMeasure mu = equilibrium(combine(fam, z));
    std::size_t m = fam.constraints.size();
    std::vector<double> c(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double v = asymptotic_covariance(mu, fam.constraints[i], fam.constraints[j]);
            c[i * m + j] = v;
            c[j * m + i] = v;
        }
    return c;
}

// Degenerate families (a combination of constraints cohomologous to a
// constant) show up as a near-null direction of the covariance matrix at the
// reference point; they make the MaxEnt problem ill-posed, so they are
// rejected up front.
inline void validate_family(const PotentialFamily& fam) {
    require(!fam.constraints.empty(), "family needs at least one constraint");
    require(fam.alphabet >= 1, "alphabet size must be >= 1");
    for (const FiniteMemoryFn& f : fam.constraints)
        require(f.alphabet == fam.alphabet, "constraint alphabet mismatch");
    if (fam.has_generator) {
        require(fam.gen_base.alphabet == fam.alphabet &&
                    fam.gen_direction.alphabet == fam.alphabet,
                "generator alphabet mismatch");
    }
    std::vector<double> z0(fam.constraints.size(), 0.0);
    std::vector<double> c = covariance_matrix(fam, z0);
    std::vector<double> ev = symmetric_eigenvalues(c, fam.constraints.size());
    require(ev.front() > 1e-10,
            "constraints are degenerate at the reference point "
            "(some combination is cohomologous to a constant)");
}

// Damped Newton on z until the equilibrium expectations hit x_target.
inline std::vector<double> maxent_solve(const PotentialFamily& fam,
                                        const std::vector<double>& x_target,
                                        double tol = 1e-12) {
    require(tol >= 1e-12, "tolerance must be >= 1e-12");
    require(x_target.size() == fam.constraints.size(),
            "target count must match constraints");
    validate_family(fam);
    std::size_t m = fam.constraints.size();
    for (std::size_t j = 0; j < m; ++j) {
        double lo = fam.constraints[j].table[0], hi = lo;
        for (double v : fam.constraints[j].table) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        require(x_target[j] > lo && x_target[j] < hi,
                "target " + std::to_string(j + 1) +
                    " is outside the open range of its constraint");
    }

    std::vector<double> z(m, 0.0);
    auto residual = [&](const std::vector<double>& zz) {
        std::vector<double> g = pressure_gradient(fam, zz);
        double r = 0;
        for (std::size_t j = 0; j < m; ++j) r = std::max(r, std::abs(g[j] - x_target[j]));
        return r;
    };
    double res = residual(z);
    for (unsigned it = 0; it < 100; ++it) {
        if (res < tol) return z;
        std::vector<double> g = pressure_gradient(fam, z);
        for (std::size_t j = 0; j < m; ++j) g[j] -= x_target[j];
        std::vector<double> step = solve_linear(covariance_matrix(fam, z), g);
        double t = 1;
        for (unsigned halving = 0;; ++halving) {
            std::vector<double> zn(m);
            for (std::size_t j = 0; j < m; ++j) zn[j] = z[j] - t * step[j];
            double rn = residual(zn);
            if (rn < res) {
                z = std::move(zn);
                res = rn;
                break;
            }
            if (halving >= 50)
                throw numeric_error(
                    "maxent_solve stalled at iteration " + std::to_string(it) +
                    " with residual " + std::to_string(res));
            t /= 2;
        }
    }
    throw numeric_error("maxent_solve did not converge in 100 iterations, residual " +
                        std::to_string(res));
}

// entropy of the constrained equilibrium as a function of x (Legendre dual
// of the pressure surface): alpha(x) = P(z*) - <x, z*>
inline double legendre_alpha(const PotentialFamily& fam, const std::vector<double>& x,
                             double tol = 1e-12) {
    std::vector<double> z = maxent_solve(fam, x, tol);
    double a = pressure_surface(fam, z);
    for (std::size_t j = 0; j < x.size(); ++j) a -= x[j] * z[j];
    return a;
}

struct SusceptibilityPair {
    std::size_t m = 0;
    std::vector<double> sp;  // Hessian of pressure in z (m x m, SPD)
    std::vector<double> se;  // Hessian of alpha in x (m x m, negative definite)
    double inverse_residual = 0;  // worst entry gap in SE = -SP^{-1}
};

inline SusceptibilityPair susceptibility(const PotentialFamily& fam,
                                         const std::vector<double>& z, double h = 1e-3) {
    validate_family(fam);
    std::size_t m = fam.constraints.size();
    require(z.size() == m, "coefficient count must match constraints");

    auto p_at = [&](std::vector<double> zz) { return pressure_surface(fam, zz); };
    double p0 = p_at(z);
    std::vector<double> sp(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double v;
            std::vector<double> zz = z;
            if (i == j) {
                zz[i] = z[i] + h;
                double pp = p_at(zz);
                zz[i] = z[i] - h;
                double pm = p_at(zz);
                v = (pp - 2 * p0 + pm) / (h * h);
            } else {
                double s = 0;
                for (int si : {+1, -1})
                    for (int sj : {+1, -1}) {
                        zz = z;
                        zz[i] += si * h;
                        zz[j] += sj * h;
                        s += si * sj * p_at(zz);
                    }
                v = s / (4 * h * h);
            }
            sp[i * m + j] = v;
            sp[j * m + i] = v;
        }

    // the exact Hessian must agree with the finite-difference one
    std::vector<double> cov = covariance_matrix(fam, z);
    for (std::size_t i = 0; i < m * m; ++i)
        require_numeric(std::abs(sp[i] - cov[i]) < 1e-6,
                        "pressure Hessian disagrees with the covariance matrix");

    // Hessian of alpha around the dual point x = grad P(z)
    std::vector<double> x0 = pressure_gradient(fam, z);
    auto a_at = [&](std::vector<double> xx) { return legendre_alpha(fam, xx); };
    double a0 = a_at(x0);
    std::vector<double> se(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double v;
            std::vector<double> xx = x0;
            if (i == j) {
                xx[i] = x0[i] + h;
                double ap = a_at(xx);
                xx[i] = x0[i] - h;
                double am = a_at(xx);
                v = (ap - 2 * a0 + am) / (h * h);
            } else {
                double s = 0;
                for (int si : {+1, -1})
                    for (int sj : {+1, -1}) {
                        xx = x0;
                        xx[i] += si * h;
                        xx[j] += sj * h;
                        s += si * sj * a_at(xx);
                    }
                v = s / (4 * h * h);
            }
            se[i * m + j] = v;
            se[j * m + i] = v;
        }

    // invert SP column by column and compare against -SE
    std::vector<double> inv(m * m);
    for (std::size_t c = 0; c < m; ++c) {
        std::vector<double> e(m, 0.0);
        e[c] = 1.0;
        std::vector<double> col = solve_linear(sp, e);
        for (std::size_t r = 0; r < m; ++r) inv[r * m + c] = col[r];
    }
    double worst = 0;
    for (std::size_t i = 0; i < m * m; ++i)
        worst = std::max(worst, std::abs(se[i] + inv[i]) / std::max(1.0, std::abs(inv[i])));
    require_numeric(worst < 1e-4, "susceptibility matrices are not mutual inverses");

    SusceptibilityPair out;
    out.m = m;
    out.sp = std::move(sp);
    out.se = std::move(se);
    out.inverse_residual = worst;
    return out;
}

struct GibbsRow {
    double beta = 0;
    double energy = 0;     // E(beta) = integral of H d mu_beta
    double entropy_v = 0;  // h(beta)
    double dh_de = 0;      // chain-rule slope along the curve; NaN when E is flat
};

// Sweep of the Gibbs fundamental relation dh/dE = beta for the family of
// equilibria of -beta H. Slopes use small centered steps in beta at each grid
// point rather than grid-neighbor chords.
inline std::vector<GibbsRow> gibbs_equation(const FiniteMemoryFn& H,
                                            const std::vector<double>& beta_grid,
                                            double h_beta = 1e-3) {
    require(!beta_grid.empty(), "beta grid is empty");
    for (double b : beta_grid)
        require(b >= 0.1 && b <= 10.0, "beta grid must lie within [0.1, 10]");
    for (std::size_t i = 1; i < beta_grid.size(); ++i) {
        double d0 = beta_grid[1] - beta_grid[0], di = beta_grid[i] - beta_grid[i - 1];
        require(di != 0 && (di > 0) == (d0 > 0), "beta grid must be strictly monotone");
    }
    auto state = [&](double b) {
        FiniteMemoryFn a = (-b) * H;
        PerronData pd = perron(a);
        SuitableMeasure mu = equilibrium_with(a, pd);
        struct Snap {
            double pressure_v, energy_v, entropy_v;
        };
        return Snap{std::log(pd.lambda), integrate(mu, H), entropy(mu)};
    };
    std::vector<GibbsRow> rows;
    for (double b : beta_grid) {
        auto s0 = state(b);
        auto sp = state(b + h_beta);
        auto sm = state(b - h_beta);
        // thermodynamic consistency: E = -dP/dbeta along the curve
        double dP = (sp.pressure_v - sm.pressure_v) / (2 * h_beta);
        require_numeric(std::abs(s0.energy_v + dP) < 1e-6,
                        "energy disagrees with the pressure slope");
        GibbsRow row;
        row.beta = b;
        row.energy = s0.energy_v;
        row.entropy_v = s0.entropy_v;
        row.dh_de = (sp.entropy_v - sm.entropy_v) / (sp.energy_v - sm.energy_v);
        rows.push_back(row);
    }
    return rows;
}

struct EnergyRate {
    double dW = 0;
    double dQ = 0;
    double dU = 0;
    double pressure_p = 0;  // -dW
};

// Work/heat/internal-energy rates in the external parameter v of the family's
// generated constraint. The two rates use the symmetrized discrete product
// rule (midpoint measure for dW, midpoint observable for dQ), which keeps
// dW + dQ = dU an identity of the four underlying integrals while each rate
// remains a second-order-accurate derivative estimate.
inline EnergyRate energy_rate_decomposition(const PotentialFamily& fam, std::size_t k_index,
                                            const std::optional<std::vector<double>>& x_target,
                                            const std::vector<double>& z_fixed, double v0,
                                            double h_v = 1e-3) {
    require(fam.has_generator, "family has no parametrized constraint");
    require(k_index < fam.constraints.size(), "constraint index out of range");
    validate_family(fam);

    auto at = [&](double v) {
        PotentialFamily f = fam;
        f.constraints[k_index] = f.gen_base + v * f.gen_direction;
        std::vector<double> z =
            x_target ? maxent_solve(f, *x_target, 1e-12) : z_fixed;
        require(z.size() == f.constraints.size(),
                "fixed coefficient count must match constraints");
        SuitableMeasure mu = equilibrium(combine(f, z));
        struct Snap {
            SuitableMeasure mu;
            FiniteMemoryFn f_k;
        };
        return Snap{std::move(mu), f.constraints[k_index]};
    };
    auto plus = at(v0 + h_v);
    auto minus = at(v0 - h_v);

    double a = integrate(plus.mu, plus.f_k);    // f+ against mu+
    double b = integrate(plus.mu, minus.f_k);   // f- against mu+
    double c = integrate(minus.mu, plus.f_k);   // f+ against mu-
    double e = integrate(minus.mu, minus.f_k);  // f- against mu-

    EnergyRate out;
    out.dW = (a - b + c - e) / (4 * h_v);
    out.dQ = (a + b - c - e) / (4 * h_v);
    out.dU = (a - e) / (2 * h_v);
    out.pressure_p = -out.dW;
    return out;
}

struct ThermoAccount {
    double E1 = 0;  // energy of mu1 between the two kernels
    double E3 = 0;  // energy of the pushed measure
    double dQ = 0;
    double dW = 0;
    double dU = 0;
};

// Discrete heat/work bookkeeping for the operation mu1 -> push through logJ2,
// with energies read against the pair (logJ1, logJ2). All five scalars
// recombine four integrals, so the First Law holds to rounding.
inline ThermoAccount thermo_operation_accounting(const FiniteMemoryFn& log_j1,
                                                 const FiniteMemoryFn& log_j2,
                                                 const SuitableMeasure& mu1) {
    require(is_jacobian(log_j1, 1e-10) && is_jacobian(log_j2, 1e-10),
            "thermo accounting requires normalized kernels");
    SuitableMeasure mu3 = dual_push(log_j2, mu1);
    double i11 = integrate(mu1, log_j1);
    double i21 = integrate(mu1, log_j2);
    double i13 = integrate(mu3, log_j1);
    double i23 = integrate(mu3, log_j2);
    ThermoAccount out;
    out.E1 = i11 - i21;
    out.E3 = i13 - i23;
    out.dQ = i23 - i21;
    out.dW = i11 - i13;
    out.dU = out.E1 - out.E3;
    return out;
}

} // namespace thermoform
