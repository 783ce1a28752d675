#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "function.hpp"
#include "linalg.hpp"

namespace thermoform {

// Transfer (Ruelle) operator for a potential A reading k coordinates:
//
//   (L_A f)(x) = sum_a e^{A(a x)} f(a x)
//
// On finite-memory functions this closes: if A and f read at most K
// coordinates, L_A f reads K-1.
inline FiniteMemoryFn apply_ruelle(const FiniteMemoryFn& A, const FiniteMemoryFn& f) {
    require(A.alphabet == f.alphabet, "alphabet mismatch");
    unsigned d = A.alphabet;
    unsigned K = std::max({A.depth, f.depth, 1u});
    FiniteMemoryFn a = extend_depth(A, K), g = extend_depth(f, K);
    index_t block = word_count(d, K - 1);
    std::vector<double> out(block, 0.0);
    for (index_t u = 0; u < block; ++u)
        for (unsigned s = 0; s < d; ++s) {
            index_t w = prepend_index(s, u, d, K - 1);
            out[u] += std::exp(a.table[w]) * g.table[w];
        }
    return FiniteMemoryFn(d, K - 1, std::move(out));
}

// n-fold application, used by decay estimates
inline FiniteMemoryFn apply_ruelle_n(const FiniteMemoryFn& A, FiniteMemoryFn f, unsigned n) {
    for (unsigned i = 0; i < n; ++i) f = apply_ruelle(A, f);
    return f;
}

// Dense matrix of L_A on the state space of length-(k-1) words. Entries are
// stored in the append convention: row r = current suffix state, column
// c = state after appending one symbol, weight e^{A(word)} where word = r
// followed by the appended symbol. Cylinder-weight vectors evolve by this
// matrix directly; functions evolve by its transpose.
struct TransferMatrix {
    unsigned alphabet = 0;
    unsigned depth = 0;            // k of the potential the matrix was built from
    index_t dim = 0;               // d^(k-1)
    std::vector<double> entries;   // row-major dim x dim

    double at(index_t r, index_t c) const { return entries[r * dim + c]; }
};

inline TransferMatrix transfer_matrix(const FiniteMemoryFn& A) {
    unsigned d = A.alphabet;
    unsigned k = std::max(A.depth, 1u);
    FiniteMemoryFn a = extend_depth(A, k);
    index_t n = word_count(d, k - 1);
    require(n <= 1024, "transfer matrix dimension d^(depth-1) exceeds 1024");
    TransferMatrix M;
    M.alphabet = d;
    M.depth = k;
    M.dim = n;
    M.entries.assign(n * n, 0.0);
    for (index_t r = 0; r < n; ++r)
        for (unsigned b = 0; b < d; ++b) {
            index_t w = append_index(r, b, d); // the length-k word r.b
            M.entries[r * n + w % n] += std::exp(a.table[w]);
        }
    return M;
}

// Leading eigendata of the transfer operator: lambda the spectral radius,
// phi the positive eigenfunction (a function of k-1 coordinates), nu the
// eigenprobability marginals on length-(k-1) words. Normalized so that
// sum(nu) = 1 and sum(phi * nu) = 1.
struct PerronData {
    double lambda = 0;
    FiniteMemoryFn phi;       // depth k-1
    std::vector<double> nu;   // size d^(k-1), nonnegative, sums to 1
};

namespace detail {

// power iteration for the leading eigenpair of a nonnegative matrix given as
// mat-vec; starts at all-ones, sup-norm renormalized
template <class MatVec>
std::pair<double, std::vector<double>> leading_pair(index_t n, MatVec mv,
                                                    const std::string& who) {
    std::vector<double> v(n, 1.0), w(n);
    double lam = 0;
    const unsigned cap = 100000;
    for (unsigned it = 1; it <= cap; ++it) {
        mv(v, w);
        double m = 0;
        for (double x : w) m = std::max(m, std::abs(x));
        require_numeric(m > 0 && std::isfinite(m),
                        who + ": iterate vanished or overflowed");
        for (index_t i = 0; i < n; ++i) v[i] = w[i] / m;
        if (std::abs(m - lam) <= 1e-14 * std::max(1.0, std::abs(m))) return {m, v};
        lam = m;
    }
    throw numeric_error(who + ": power iteration did not converge in 100000 steps");
}

} // namespace detail

inline PerronData perron(const FiniteMemoryFn& A) {
    TransferMatrix M = transfer_matrix(A);
    index_t n = M.dim;
    auto forward = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (index_t r = 0; r < n; ++r) {
            double s = 0;
            for (index_t c = 0; c < n; ++c) s += M.entries[r * n + c] * x[c];
            y[r] = s;
        }
    };
    auto transposed = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (index_t c = 0; c < n; ++c) y[c] = 0;
        for (index_t r = 0; r < n; ++r)
            for (index_t c = 0; c < n; ++c) y[c] += M.entries[r * n + c] * x[r];
    };
    auto [lam_nu, nu] = detail::leading_pair(n, forward, "perron(nu)");
    auto [lam_phi, phi] = detail::leading_pair(n, transposed, "perron(phi)");
    (void)lam_nu;
    (void)lam_phi;

    // Rayleigh quotient with both one-sided eigenvectors: error is the product
    // of the two iteration errors, which polishes lambda well past 1e-14.
    double num = 0, den = 0;
    std::vector<double> Mnu(n);
    forward(nu, Mnu);
    for (index_t i = 0; i < n; ++i) {
        num += phi[i] * Mnu[i];
        den += phi[i] * nu[i];
    }
    require_numeric(den > 0, "perron: degenerate eigenvector pairing");
    double lambda = num / den;

    double mass = 0;
    for (double x : nu) mass += x;
    require_numeric(mass > 0, "perron: eigenprobability has no mass");
    for (double& x : nu) x /= mass;
    double pairing = 0;
    for (index_t i = 0; i < n; ++i) pairing += phi[i] * nu[i];
    for (double& x : phi) x /= pairing;

    PerronData out;
    out.lambda = lambda;
    out.phi = FiniteMemoryFn(M.alphabet, M.depth - 1, std::move(phi));
    out.nu = std::move(nu);
    return out;
}

inline double pressure(const FiniteMemoryFn& A) { return std::log(perron(A).lambda); }

// true when exp(logJ) prepend-sums to one: sum_a J(a x) = 1 for every x
inline bool is_jacobian(const FiniteMemoryFn& log_j, double tol = 1e-10) {
    FiniteMemoryFn one = FiniteMemoryFn::constant(log_j.alphabet, 1.0);
    FiniteMemoryFn s = apply_ruelle(log_j, one);
    for (double v : s.table)
        if (std::abs(v - 1.0) > tol) return false;
    return true;
}

// Normalized potential: log J = A + log phi - log(phi o sigma) - log lambda.
// exp of the result prepend-sums to one exactly (up to rounding), making it
// the log of an inverse Radon-Nikodym derivative.
inline FiniteMemoryFn normalize(const FiniteMemoryFn& A) {
    PerronData pd = perron(A);
    FiniteMemoryFn log_phi = pointwise_log(pd.phi);
    FiniteMemoryFn log_j = A + log_phi - compose_shift(log_phi) + (-std::log(pd.lambda));
    require_numeric(is_jacobian(log_j, 1e-12), "normalize: result failed the Jacobian check");
    return log_j;
}

} // namespace thermoform
