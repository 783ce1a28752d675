#pragma once

#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace thermoform {

// Words over the alphabet {1,...,d} are stored as flat indices with the first
// coordinate most significant:
//
//   index(w_1 ... w_m) = sum_i (w_i - 1) * d^(m-i)
//
// so tables of length-m words have size d^m and the word (1,1,...,1) sits at
// index 0. Symbols are 1-based at the boundary (files, CLI, error text) and
// 0-based internally.

using index_t = std::uint64_t;

// all full-shift tables are capped at this many entries
inline constexpr index_t max_table_size = 65536;

inline index_t pow_int(index_t base, unsigned exp) {
    index_t r = 1;
    while (exp--) {
        require(r <= max_table_size, "table size overflow: d^m exceeds 65536");
        r *= base;
    }
    require(r <= max_table_size, "table size overflow: d^m exceeds 65536");
    return r;
}

// number of length-m words, checked against the envelope
inline index_t word_count(unsigned d, unsigned m) {
    require(d >= 1, "alphabet size must be >= 1");
    return pow_int(d, m);
}

// first k symbols of a length-m word: integer division peels trailing symbols
inline index_t prefix_index(index_t idx, unsigned d, unsigned m, unsigned k) {
    require(k <= m, "prefix longer than word");
    return idx / pow_int(d, m - k);
}

// drop the first symbol (the shift map on words): keep the low m-1 digits
inline index_t shift_index(index_t idx, unsigned d, unsigned m) {
    require(m >= 1, "cannot shift the empty word");
    return idx % pow_int(d, m - 1);
}

// prepend symbol a (0-based) to a length-m word
inline index_t prepend_index(unsigned a, index_t idx, unsigned d, unsigned m) {
    return static_cast<index_t>(a) * pow_int(d, m) + idx;
}

// append symbol b (0-based) to a word
inline index_t append_index(index_t idx, unsigned b, unsigned d) {
    return idx * d + static_cast<index_t>(b);
}

// last symbol of a length-m word, 0-based
inline unsigned last_symbol(index_t idx, unsigned d) {
    return static_cast<unsigned>(idx % d);
}

// word as 1-based symbol list, mostly for error messages and JSON echo
inline std::vector<unsigned> index_to_word(index_t idx, unsigned d, unsigned m) {
    std::vector<unsigned> w(m);
    for (unsigned i = m; i-- > 0;) {
        w[i] = static_cast<unsigned>(idx % d) + 1;
        idx /= d;
    }
    return w;
}

inline index_t word_to_index(const std::vector<unsigned>& w, unsigned d) {
    index_t idx = 0;
    for (unsigned s : w) {
        require(s >= 1 && s <= d, "symbol out of range 1..d");
        idx = idx * d + (s - 1);
    }
    return idx;
}

// reverse the symbols of a length-m word
inline index_t reverse_index(index_t idx, unsigned d, unsigned m) {
    index_t r = 0;
    for (unsigned i = 0; i < m; ++i) {
        r = r * d + idx % d;
        idx /= d;
    }
    return r;
}

} // namespace thermoform
