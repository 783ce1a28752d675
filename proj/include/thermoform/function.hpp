#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "word.hpp"

namespace thermoform {

// A function on the full shift that only reads the first `depth` symbols,
// stored as a dense table over length-`depth` words. depth 0 is a constant.
struct FiniteMemoryFn {
    unsigned alphabet = 0;   // d
    unsigned depth = 0;      // k, number of coordinates read
    std::vector<double> table; // size d^k, index = word index

    FiniteMemoryFn() = default;

    FiniteMemoryFn(unsigned d, unsigned k, std::vector<double> values)
        : alphabet(d), depth(k), table(std::move(values)) {
        require(alphabet >= 1, "alphabet size must be >= 1");
        require(table.size() == word_count(alphabet, depth),
                "table size does not match d^depth");
    }

    static FiniteMemoryFn constant(unsigned d, double c) {
        return FiniteMemoryFn(d, 0, std::vector<double>{c});
    }

    index_t size() const { return table.size(); }

    // value on the cylinder of a length-m word, m >= depth
    double on_prefix(index_t idx, unsigned m) const {
        return table[prefix_index(idx, alphabet, m, depth)];
    }

    double operator()(index_t idx) const { return table[idx]; }
};

// present f as a table over length-k2 words, k2 >= f.depth
inline FiniteMemoryFn extend_depth(const FiniteMemoryFn& f, unsigned k2) {
    require(k2 >= f.depth, "extend_depth cannot shrink depth");
    if (k2 == f.depth) return f;
    index_t n = word_count(f.alphabet, k2);
    std::vector<double> t(n);
    for (index_t i = 0; i < n; ++i) t[i] = f.on_prefix(i, k2);
    return FiniteMemoryFn(f.alphabet, k2, std::move(t));
}

// f o sigma: reads one more coordinate, ignores the first
inline FiniteMemoryFn compose_shift(const FiniteMemoryFn& f) {
    index_t n = word_count(f.alphabet, f.depth + 1);
    index_t block = word_count(f.alphabet, f.depth);
    std::vector<double> t(n);
    for (index_t i = 0; i < n; ++i) t[i] = f.table[i % block];
    return FiniteMemoryFn(f.alphabet, f.depth + 1, std::move(t));
}

namespace detail {
template <class Op>
FiniteMemoryFn zip(const FiniteMemoryFn& f, const FiniteMemoryFn& g, Op op) {
    require(f.alphabet == g.alphabet, "alphabet mismatch");
    unsigned k = std::max(f.depth, g.depth);
    FiniteMemoryFn a = extend_depth(f, k), b = extend_depth(g, k);
    for (index_t i = 0; i < a.size(); ++i) a.table[i] = op(a.table[i], b.table[i]);
    return a;
}
} // namespace detail

inline FiniteMemoryFn operator+(const FiniteMemoryFn& f, const FiniteMemoryFn& g) {
    return detail::zip(f, g, [](double x, double y) { return x + y; });
}

inline FiniteMemoryFn operator-(const FiniteMemoryFn& f, const FiniteMemoryFn& g) {
    return detail::zip(f, g, [](double x, double y) { return x - y; });
}

inline FiniteMemoryFn operator*(const FiniteMemoryFn& f, const FiniteMemoryFn& g) {
    return detail::zip(f, g, [](double x, double y) { return x * y; });
}

inline FiniteMemoryFn operator*(double c, FiniteMemoryFn f) {
    for (double& v : f.table) v *= c;
    return f;
}

inline FiniteMemoryFn operator+(FiniteMemoryFn f, double c) {
    for (double& v : f.table) v += c;
    return f;
}

inline double sup_norm(const FiniteMemoryFn& f) {
    double m = 0;
    for (double v : f.table) m = std::max(m, std::abs(v));
    return m;
}

inline double sup_diff(const FiniteMemoryFn& f, const FiniteMemoryFn& g) {
    return sup_norm(f - g);
}

inline FiniteMemoryFn pointwise_exp(FiniteMemoryFn f) {
    for (double& v : f.table) v = std::exp(v);
    return f;
}

inline FiniteMemoryFn pointwise_log(FiniteMemoryFn f) {
    for (double& v : f.table) {
        require(v > 0, "log of non-positive table entry");
        v = std::log(v);
    }
    return f;
}

} // namespace thermoform
