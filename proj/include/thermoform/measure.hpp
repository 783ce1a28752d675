#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "rng.hpp"
#include "transfer.hpp"

namespace thermoform {

// A shift-space measure with finite-memory structure: cylinder weights are
// determined by a positive kernel J = exp(log_irn) reading k coordinates and
// a marginal `base` on length-(k-1) words, through
//
//   mu([w_1..w_m]) = J(w_1..w_k) J(w_2..w_{k+1}) ... J(w_{m-k+1}..w_m)
//                    * base(w_{m-k+2}..w_m)          for m >= k-1,
//
// i.e. prepending a symbol multiplies by J on the new leading block. The
// measure is sigma-invariant exactly when J prepend-sums to one (is_jacobian);
// non-invariant examples (eigenprobabilities, mass-shifted chains) carry a
// kernel without that property but still satisfy append-consistency below.
struct SuitableMeasure {
    unsigned alphabet = 0;
    unsigned depth = 0;          // k >= 1
    FiniteMemoryFn log_irn;      // depth k
    std::vector<double> base;    // size d^(k-1), positive, sums to 1
};

// Largest violation of base(w) = sum_b J(w b) base((sigma w) b); this is
// what makes the cylinder table of weights additively consistent, so it is
// the load-bearing structural check.
inline double append_consistency_residual(const SuitableMeasure& mu) {
    unsigned d = mu.alphabet, k = mu.depth;
    index_t n = word_count(d, k - 1);
    double worst = 0;
    for (index_t w = 0; w < n; ++w) {
        double s = 0;
        for (unsigned b = 0; b < d; ++b) {
            index_t wb = append_index(w, b, d);               // length k
            index_t tail = shift_index(wb, d, k);             // length k-1
            s += std::exp(mu.log_irn.table[wb]) * mu.base[tail];
        }
        worst = std::max(worst, std::abs(s - mu.base[w]));
    }
    return worst;
}

inline void validate(const SuitableMeasure& mu) {
    require(mu.depth >= 1, "measure depth must be >= 1");
    require(mu.alphabet >= 1, "alphabet size must be >= 1");
    require(mu.log_irn.alphabet == mu.alphabet && mu.log_irn.depth == mu.depth,
            "log_irn table does not match the measure's alphabet/depth");
    require(mu.base.size() == word_count(mu.alphabet, mu.depth - 1),
            "base marginal size must be d^(depth-1)");
    double mass = 0;
    for (double b : mu.base) {
        require(b > 0, "base marginal entries must be positive");
        mass += b;
    }
    require(std::abs(mass - 1.0) <= 1e-12, "base marginal must sum to 1");
    for (double v : mu.log_irn.table)
        require(std::isfinite(v), "log_irn entries must be finite");
    require(append_consistency_residual(mu) <= 1e-12,
            "base marginal is not append-consistent with the kernel");
}

// invariant <=> the kernel is a genuine Jacobian (prepend-sums to one)
inline bool is_invariant(const SuitableMeasure& mu, double tol = 1e-10) {
    return is_jacobian(mu.log_irn, tol);
}

// all cylinder weights of length-m words
inline std::vector<double> weights_at_depth(const SuitableMeasure& mu, unsigned m) {
    unsigned d = mu.alphabet, k = mu.depth;
    if (m < k - 1) {
        // coarse marginal: contiguous block sums of the base table
        index_t n = word_count(d, m);
        index_t block = word_count(d, k - 1 - m);
        std::vector<double> w(n, 0.0);
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < block; ++j) w[i] += mu.base[i * block + j];
        return w;
    }
    std::vector<double> w = mu.base;
    for (unsigned len = k - 1; len < m; ++len) {
        index_t n_next = word_count(d, len + 1);
        index_t drop = word_count(d, len);
        std::vector<double> nxt(n_next);
        for (index_t v = 0; v < n_next; ++v)
            nxt[v] = std::exp(mu.log_irn.on_prefix(v, len + 1)) * w[v % drop];
        w = std::move(nxt);
    }
    return w;
}

// weight of one cylinder without building the whole table
inline double cylinder_weight(const SuitableMeasure& mu, index_t word, unsigned m) {
    unsigned d = mu.alphabet, k = mu.depth;
    if (m < k - 1) {
        index_t block = word_count(d, k - 1 - m);
        double s = 0;
        for (index_t j = 0; j < block; ++j) s += mu.base[word * block + j];
        return s;
    }
    double log_w = 0;
    index_t rest = word;
    for (unsigned len = m; len > k - 1; --len) {
        log_w += mu.log_irn.on_prefix(rest, len);
        rest = shift_index(rest, d, len);
    }
    return std::exp(log_w) * mu.base[rest];
}

inline double integrate(const SuitableMeasure& mu, const FiniteMemoryFn& f) {
    require(f.alphabet == mu.alphabet, "alphabet mismatch");
    unsigned m = std::max(f.depth, mu.depth);
    std::vector<double> w = weights_at_depth(mu, m);
    FiniteMemoryFn g = extend_depth(f, m);
    double s = 0;
    for (index_t i = 0; i < w.size(); ++i) s += w[i] * g.table[i];
    return s;
}

// Kolmogorov-Sinai entropy when the measure is invariant; for non-invariant
// measures this is the same functional, reported unclamped (it can leave
// [0, log d]) and flagged downstream.
inline double entropy(const SuitableMeasure& mu) {
    return -integrate(mu, mu.log_irn);
}

// dynamical relative entropy (KL divergence rate) of mu1 with respect to mu2
inline double kl(const SuitableMeasure& mu1, const SuitableMeasure& mu2) {
    require(mu1.alphabet == mu2.alphabet, "alphabet mismatch");
    return integrate(mu1, mu1.log_irn - mu2.log_irn);
}

inline bool measures_equal(const SuitableMeasure& a, const SuitableMeasure& b,
                           double tol = 1e-12) {
    if (a.alphabet != b.alphabet) return false;
    unsigned m = std::max(a.depth, b.depth);
    std::vector<double> wa = weights_at_depth(a, m), wb = weights_at_depth(b, m);
    for (index_t i = 0; i < wa.size(); ++i)
        if (std::abs(wa[i] - wb[i]) > tol) return false;
    return true;
}

/// Detector for a corrupted kernel/base pair: rebuilds the depth-max(m,k)
// weight table by the prepend recursion, then checks each weight against the
// kernel times the *append-summed* continuation. A healthy measure telescopes
// to zero; a base that fails append-consistency shows up at full size.
inline double verify_irn(const SuitableMeasure& mu, unsigned m) {
    unsigned d = mu.alphabet, k = mu.depth;
    unsigned mm = std::max(m, k);
    std::vector<double> t = weights_at_depth(mu, mm);
    double worst = 0;
    for (index_t v = 0; v < t.size(); ++v) {
        index_t sv = shift_index(v, d, mm);
        double cont = 0;
        for (unsigned b = 0; b < d; ++b) {
            index_t svb = append_index(sv, b, d);
            double w = cylinder_weight(mu, svb, mm);
            cont += w;
        }
        double predicted = std::exp(mu.log_irn.on_prefix(v, mm)) * cont;
        worst = std::max(worst, std::abs(t[v] - predicted));
    }
    return worst;
}

// Checked accessor for the kernel: probes one level past the stored depth so
// a base that merely *looks* consistent at its own depth still gets caught
// before the kernel is handed to anything downstream.
inline FiniteMemoryFn irn_of(const SuitableMeasure& mu, double tol = 1e-10) {
    double r = verify_irn(mu, mu.depth + 1);
    require(r <= tol, "measure kernel fails its consistency probe");
    return mu.log_irn;
}

// independent (memory-1) measure with symbol probabilities p
inline SuitableMeasure bernoulli(const std::vector<double>& p) {
    unsigned d = static_cast<unsigned>(p.size());
    require(d >= 1, "bernoulli needs at least one symbol");
    double mass = 0;
    std::vector<double> log_p(d);
    for (unsigned i = 0; i < d; ++i) {
        require(p[i] > 0, "bernoulli probabilities must be positive");
        log_p[i] = std::log(p[i]);
        mass += p[i];
    }
    require(std::abs(mass - 1.0) <= 1e-12, "bernoulli probabilities must sum to 1");
    SuitableMeasure mu;
    mu.alphabet = d;
    mu.depth = 1;
    mu.log_irn = FiniteMemoryFn(d, 1, std::move(log_p));
    mu.base = {1.0};
    return mu;
}

namespace detail {

// stationary distribution of a column-stochastic matrix (q(i->j) = P[j][i]):
// solve (P - I) pi = 0 with the normalization row sum(pi) = 1
inline std::vector<double> stationary(const std::vector<double>& p, unsigned d) {
    std::vector<double> a(static_cast<std::size_t>(d) * d), b(d, 0.0);
    for (unsigned r = 0; r < d; ++r)
        for (unsigned c = 0; c < d; ++c)
            a[r * d + c] = p[r * d + c] - (r == c ? 1.0 : 0.0);
    for (unsigned c = 0; c < d; ++c) a[(d - 1) * d + c] = 1.0;
    b[d - 1] = 1.0;
    std::vector<double> pi = solve_linear(std::move(a), std::move(b));
    for (double x : pi)
        require_numeric(x > 0, "stationary distribution has a non-positive entry");
    return pi;
}

inline void check_markov_matrix(const std::vector<double>& p, unsigned d) {
    require(d >= 1 && p.size() == static_cast<std::size_t>(d) * d,
            "transition matrix must be d x d");
    for (double x : p)
        require(x > 0, "transition probabilities must be strictly positive on a full shift");
    for (unsigned i = 0; i < d; ++i) {
        double col = 0;
        for (unsigned j = 0; j < d; ++j) col += p[j * d + i];
        require(std::abs(col - 1.0) <= 1e-12, "transition matrix columns must sum to 1");
    }
}

} // namespace detail

// Stationary Markov measure of a column-stochastic transition matrix P,
// q(i->j) = P[j][i]. The kernel weights the *incoming* transition against the
// stationary masses, J(i, j) = q(i->j) pi_i / pi_j, which prepend-sums to one
// precisely because pi is stationary; cylinder weights come out as
// mu([i, j]) = q(i->j) pi_i.
inline SuitableMeasure markov_invariant(const std::vector<double>& p, unsigned d) {
    detail::check_markov_matrix(p, d);
    std::vector<double> pi = detail::stationary(p, d);
    std::vector<double> log_j(static_cast<std::size_t>(d) * d);
    for (unsigned i = 0; i < d; ++i)
        for (unsigned j = 0; j < d; ++j)
            log_j[i * d + j] = std::log(p[j * d + i] * pi[i] / pi[j]);
    SuitableMeasure mu;
    mu.alphabet = d;
    mu.depth = 2;
    mu.log_irn = FiniteMemoryFn(d, 2, std::move(log_j));
    mu.base = std::move(pi);
    return mu;
}

// Same chain but weighted by an arbitrary positive mass vector z instead of
// the stationary one: J^z(i, j) = q(i->j) z_i / z_j, base = z. Append-
// consistency survives for any z; invariance holds only at z = pi.
inline SuitableMeasure markov_noninvariant(const std::vector<double>& p,
                                           const std::vector<double>& z, unsigned d) {
    detail::check_markov_matrix(p, d);
    require(z.size() == d, "mass vector must have d entries");
    double mass = 0;
    for (double x : z) {
        require(x > 0, "mass vector entries must be positive");
        mass += x;
    }
    require(std::abs(mass - 1.0) <= 1e-12, "mass vector must sum to 1");
    std::vector<double> log_j(static_cast<std::size_t>(d) * d);
    for (unsigned i = 0; i < d; ++i)
        for (unsigned j = 0; j < d; ++j)
            log_j[i * d + j] = std::log(p[j * d + i] * z[i] / z[j]);
    SuitableMeasure mu;
    mu.alphabet = d;
    mu.depth = 2;
    mu.log_irn = FiniteMemoryFn(d, 2, std::move(log_j));
    mu.base = z;
    return mu;
}

// Equilibrium (Gibbs) state of a potential: kernel is the normalized
// potential, base is the eigenfunction-weighted eigenprobability marginal.
// The overload taking PerronData lets grid sweeps reuse one eigensolve for
// both the pressure and the measure.
inline SuitableMeasure equilibrium_with(const FiniteMemoryFn& A, const PerronData& pd) {
    unsigned k = std::max(A.depth, 1u);
    FiniteMemoryFn log_phi = pointwise_log(pd.phi);
    FiniteMemoryFn log_j = A + log_phi - compose_shift(log_phi) + (-std::log(pd.lambda));
    // sanity gate only: unit-range tables normalize to ~1e-13, but wide-range
    // potentials legitimately lose a few digits in the eigenvector, so reject
    // only solves that are visibly broken
    require_numeric(is_jacobian(log_j, 1e-9), "equilibrium: kernel failed the Jacobian check");
    SuitableMeasure mu;
    mu.alphabet = A.alphabet;
    mu.depth = k;
    mu.log_irn = std::move(log_j);
    mu.base.resize(pd.nu.size());
    for (index_t i = 0; i < pd.nu.size(); ++i) mu.base[i] = pd.phi.table[i] * pd.nu[i];
    return mu;
}

inline SuitableMeasure equilibrium(const FiniteMemoryFn& A) {
    return equilibrium_with(A, perron(A));
}

// Eigenprobability of the dual operator as a suitable measure: kernel
// e^{A - log lambda}, base the eigen-marginals. Non-invariant unless the
// eigenfunction is constant.
inline SuitableMeasure eigenprobability(const FiniteMemoryFn& A) {
    PerronData pd = perron(A);
    unsigned k = std::max(A.depth, 1u);
    SuitableMeasure mu;
    mu.alphabet = A.alphabet;
    mu.depth = k;
    mu.log_irn = extend_depth(A, k) + (-std::log(pd.lambda));
    mu.base = pd.nu;
    return mu;
}

// i.i.d. uniform[-1,1) log-table; the seed fully determines the table
inline FiniteMemoryFn random_potential(unsigned d, unsigned k, Rng& rng) {
    index_t n = word_count(d, k);
    std::vector<double> t(n);
    for (index_t i = 0; i < n; ++i) t[i] = rng.symmetric();
    return FiniteMemoryFn(d, k, std::move(t));
}

// normalized random potential — the stock way to draw a random Jacobian
inline FiniteMemoryFn random_jacobian(unsigned d, unsigned k, Rng& rng) {
    return normalize(random_potential(d, k, rng));
}

// Time reversal of an invariant measure: cylinder weights of reversed words.
// The reversed measure is again suitable with the same depth; its kernel
// divides adjacent reversed-cylinder weights.
inline SuitableMeasure reverse_measure(const SuitableMeasure& mu) {
    require(is_invariant(mu), "reverse_measure needs an invariant measure");
    unsigned d = mu.alphabet, k = mu.depth;
    std::vector<double> wk = weights_at_depth(mu, k);
    std::vector<double> wk1 = weights_at_depth(mu, k - 1);
    index_t nk = word_count(d, k), nb = word_count(d, k - 1);
    std::vector<double> log_j(nk);
    for (index_t w = 0; w < nk; ++w) {
        index_t rw = reverse_index(w, d, k);
        // reversed word minus its leading symbol = reverse of w minus last
        index_t rtail = prefix_index(rw, d, k, k - 1);
        log_j[w] = std::log(wk[rw]) - std::log(wk1[rtail]);
    }
    std::vector<double> rb(nb);
    for (index_t u = 0; u < nb; ++u) rb[u] = wk1[reverse_index(u, d, k - 1)];
    SuitableMeasure out;
    out.alphabet = d;
    out.depth = k;
    out.log_irn = FiniteMemoryFn(d, k, std::move(log_j));
    out.base = std::move(rb);
    return out;
}

} // namespace thermoform
