#pragma once

#include <cmath>
#include <vector>

#include "measure.hpp"

namespace thermoform {

// Involution kernel of a finite-memory potential. W is a table over pairs of
// length-(k-1) words (past block y, future block x), gauge-fixed so that
// W(y | x_ref) = 0. The dual potential expresses the potential read backwards
// along the lattice as a one-sided function again.
struct InvolutionData {
    FiniteMemoryFn potential;       // A, depth k
    index_t x_ref = 0;              // reference word of length k-1
    std::vector<double> w;          // d^(2(k-1)); w[iy * d^(k-1) + ix]
    FiniteMemoryFn dual_potential;  // depth k
};

inline double involution_w(const InvolutionData& inv, index_t iy, index_t ix) {
    unsigned d = inv.potential.alphabet, k = inv.potential.depth;
    return inv.w[iy * word_count(d, k - 1) + ix];
}

inline InvolutionData involution_kernel(const FiniteMemoryFn& A, index_t x_ref = 0) {
    unsigned d = A.alphabet, k = A.depth;
    require(k >= 1, "involution kernel needs depth >= 1");
    index_t n = word_count(d, k - 1);
    require(x_ref < n, "reference word out of range");
    require(n <= 256, "involution kernel table d^(2(depth-1)) exceeds 65536");

    InvolutionData inv;
    inv.potential = A;
    inv.x_ref = x_ref;
    inv.w.assign(n * n, 0.0);

    if (k == 1) {
        // no past dependence: W vanishes and the potential is self-dual
        inv.dual_potential = A;
        return inv;
    }

    // W(y|x) telescopes over how much of the past block has crossed the
    // seam: each term swaps the tail of x against the reference word.
    for (index_t iy = 0; iy < n; ++iy)
        for (index_t ix = 0; ix < n; ++ix) {
            double s = 0;
            for (unsigned nn = 1; nn <= k - 1; ++nn) {
                index_t rev_y = reverse_index(prefix_index(iy, d, k - 1, nn), d, nn);
                index_t x_cut = prefix_index(ix, d, k - 1, k - nn);
                index_t ref_cut = prefix_index(x_ref, d, k - 1, k - nn);
                index_t block = word_count(d, k - nn);
                s += A.table[rev_y * block + x_cut] - A.table[rev_y * block + ref_cut];
            }
            inv.w[iy * n + ix] = s;
        }

    // dual potential from the seam identity at the reference block
    index_t nk = word_count(d, k);
    auto dual_at = [&](index_t y, index_t ix) {
        // y is a length-k word; x a length-(k-1) suffix context
        unsigned y1 = static_cast<unsigned>(prefix_index(y, d, k, 1));
        index_t y_tail = shift_index(y, d, k);                    // y2..yk
        index_t y_head = prefix_index(y, d, k, k - 1);            // y1..y_{k-1}
        index_t x_head = prefix_index(ix, d, k - 1, k - 2);       // x1..x_{k-2}
        index_t y1x = prepend_index(y1, x_head, d, k - 2);        // y1 x1..x_{k-2}
        double a_term = A.table[static_cast<index_t>(y1) * n + ix];
        return a_term + inv.w[y_tail * n + y1x] - inv.w[y_head * n + ix];
    };
    std::vector<double> dual(nk);
    for (index_t y = 0; y < nk; ++y) dual[y] = dual_at(y, x_ref);

    // the seam identity must not depend on the chosen suffix context
    double worst = 0;
    for (index_t y = 0; y < nk; ++y)
        for (index_t ix = 0; ix < n; ++ix)
            worst = std::max(worst, std::abs(dual_at(y, ix) - dual[y]));
    require_numeric(worst < 1e-12,
                    "involution kernel seam identity is context-dependent (internal error)");

    inv.dual_potential = FiniteMemoryFn(d, k, std::move(dual));
    return inv;
}

// sup |A(w) - A(reversed w)|: zero for palindromic-symmetric potentials
inline bool is_symmetric_potential(const FiniteMemoryFn& A, double tol = 1e-12) {
    unsigned k = std::max(A.depth, 1u);
    FiniteMemoryFn a = extend_depth(A, k);
    for (index_t w = 0; w < a.size(); ++w)
        if (std::abs(a.table[w] - a.table[reverse_index(w, A.alphabet, k)]) > tol)
            return false;
    return true;
}

// Entropy production of the equilibrium state of A: the mean gap between the
// potential and its dual. Equals the KL divergence rate between the
// equilibrium and its time reversal, so it is nonnegative and vanishes
// exactly for reversible (symmetric) systems.
inline double entropy_production(const FiniteMemoryFn& A) {
    unsigned k = std::max(A.depth, 1u);
    FiniteMemoryFn a = extend_depth(A, k);
    InvolutionData inv = involution_kernel(a, 0);
    SuitableMeasure mu = equilibrium(a);
    double e_p = integrate(mu, a - inv.dual_potential);
    require_numeric(e_p >= -1e-12, "entropy production came out negative");
    return e_p;
}

// Proportionality between the eigenfunction of A and the W-weighted
// eigenprobability of the dual operator: returns the relative deviation of
// g(x) = sum_y e^{W(y|x)} nu_dual([y]) from a constant multiple of phi_A.
// The depth-2 case is the contract-grade regime.
inline double duality_residual_any_depth(const FiniteMemoryFn& A) {
    unsigned d = A.alphabet, k = A.depth;
    require(k >= 2, "duality check needs depth >= 2");
    InvolutionData inv = involution_kernel(A, 0);
    PerronData pd_dual = perron(inv.dual_potential);
    PerronData pd = perron(A);
    index_t n = word_count(d, k - 1);
    double mean = 0;
    std::vector<double> ratio(n);
    for (index_t ix = 0; ix < n; ++ix) {
        double g = 0;
        for (index_t iy = 0; iy < n; ++iy)
            g += std::exp(inv.w[iy * n + ix]) * pd_dual.nu[iy];
        ratio[ix] = g / pd.phi.table[ix];
        mean += ratio[ix];
    }
    mean /= static_cast<double>(n);
    double worst = 0;
    for (double r : ratio) worst = std::max(worst, std::abs(r - mean));
    return worst / mean;
}

inline double duality_check(const FiniteMemoryFn& A) {
    require(A.depth == 2, "duality_check supports depth-2 potentials only");
    return duality_residual_any_depth(A);
}

// Length-m cylinder weights of the time reversal of equilibrium(A), i.e. the
// equilibrium state of the dual potential. For symmetric A this is the
// equilibrium itself.
inline std::vector<double> flip_pushforward_weights(const FiniteMemoryFn& A, unsigned m) {
    require(m >= 1 && m <= 5, "flip weights support lengths 1..5");
    unsigned k = std::max(A.depth, 1u);
    FiniteMemoryFn a = extend_depth(A, k);
    InvolutionData inv = involution_kernel(a, 0);
    return weights_at_depth(equilibrium(inv.dual_potential), m);
}

} // namespace thermoform
