#include <catch2/catch_amalgamated.hpp>

#include <thermoform/errors.hpp>
#include <thermoform/function.hpp>
#include <thermoform/rng.hpp>
#include <thermoform/word.hpp>

#include <cmath>
#include <vector>

using namespace thermoform;
using Catch::Matchers::WithinAbs;

TEST_CASE("word indices round-trip through digit vectors", "[word]") {
    const unsigned d = 3, m = 3;
    for (index_t idx = 0; idx < word_count(d, m); ++idx) {
        std::vector<unsigned> w = index_to_word(idx, d, m);
        REQUIRE(w.size() == m);
        for (unsigned s : w) {
            REQUIRE(s >= 1);
            REQUIRE(s <= d);
        }
        REQUIRE(word_to_index(w, d) == idx);
    }
    // symbols are 1-based; the first coordinate is the most significant digit
    REQUIRE(word_to_index({1, 2, 3}, 3) == 5);
    REQUIRE(word_to_index({3, 2, 1}, 3) == 21);
    REQUIRE(word_to_index({2, 1, 1, 1}, 2) == 8);
}

TEST_CASE("prefix, shift, append, prepend act on the expected coordinates", "[word]") {
    const unsigned d = 3, m = 3;
    const index_t idx = word_to_index({1, 2, 3}, d);  // = 5

    REQUIRE(prefix_index(idx, d, m, 2) == word_to_index({1, 2}, d));
    REQUIRE(prefix_index(idx, d, m, 1) == 0);
    REQUIRE(prefix_index(idx, d, m, 3) == idx);

    REQUIRE(shift_index(idx, d, m) == word_to_index({2, 3}, d));
    // appended/prepended symbols are 0-based internally
    REQUIRE(append_index(word_to_index({1, 2}, d), 2, d) == idx);
    REQUIRE(prepend_index(0, word_to_index({2, 3}, d), d, 2) == idx);
    REQUIRE(last_symbol(idx, d) == 2);
    REQUIRE(reverse_index(idx, d, m) == word_to_index({3, 2, 1}, d));

    // reversal is an involution on every word
    for (index_t i = 0; i < word_count(2, 5); ++i)
        REQUIRE(reverse_index(reverse_index(i, 2, 5), 2, 5) == i);
}

TEST_CASE("table sizes respect the envelope", "[word]") {
    REQUIRE(word_count(2, 16) == 65536);
    REQUIRE_THROWS_AS(word_count(2, 17), validation_error);
    REQUIRE_THROWS_AS(word_count(4, 9), validation_error);
    REQUIRE_THROWS_AS(prefix_index(0, 2, 3, 4), validation_error);
    REQUIRE_THROWS_AS(shift_index(0, 2, 0), validation_error);
}

TEST_CASE("extend_depth repeats values over deeper cylinders", "[function]") {
    FiniteMemoryFn f(2, 1, {10.0, 20.0});
    FiniteMemoryFn g = extend_depth(f, 2);
    REQUIRE(g.depth == 2);
    REQUIRE(g.table == std::vector<double>{10.0, 10.0, 20.0, 20.0});
    // extending twice equals extending once to the final depth
    REQUIRE(sup_diff(extend_depth(g, 3), extend_depth(f, 3)) == 0.0);
    REQUIRE_THROWS_AS(extend_depth(g, 1), validation_error);
}

TEST_CASE("compose_shift reads the word one step later", "[function]") {
    FiniteMemoryFn f(2, 1, {10.0, 20.0});
    FiniteMemoryFn g = compose_shift(f);
    REQUIRE(g.depth == 2);
    REQUIRE(g.table == std::vector<double>{10.0, 20.0, 10.0, 20.0});

    // f(sigma x) at word (a b c) ignores a entirely
    FiniteMemoryFn h(2, 2, {1.0, 2.0, 3.0, 4.0});
    FiniteMemoryFn hs = compose_shift(h);
    for (index_t i = 0; i < word_count(2, 3); ++i)
        REQUIRE(hs.table[i] == h.table[shift_index(i, 2, 3)]);
}

TEST_CASE("arithmetic aligns mismatched depths", "[function]") {
    FiniteMemoryFn f(2, 1, {10.0, 20.0});
    FiniteMemoryFn g(2, 2, {1.0, 2.0, 3.0, 4.0});
    FiniteMemoryFn s = f + g;
    REQUIRE(s.depth == 2);
    REQUIRE(s.table == std::vector<double>{11.0, 12.0, 23.0, 24.0});

    FiniteMemoryFn diff = s - g;
    REQUIRE(sup_diff(diff, extend_depth(f, 2)) == 0.0);

    FiniteMemoryFn scaled = 2.0 * f + 1.0;
    REQUIRE(scaled.table == std::vector<double>{21.0, 41.0});

    REQUIRE_THROWS_AS(f + FiniteMemoryFn(3, 1, {0.0, 0.0, 0.0}), validation_error);
}

TEST_CASE("sup norms and pointwise transforms behave", "[function]") {
    FiniteMemoryFn f(2, 1, {-3.0, 2.0});
    REQUIRE(sup_norm(f) == 3.0);
    REQUIRE(sup_diff(f, f) == 0.0);
    REQUIRE_THAT(sup_diff(pointwise_log(pointwise_exp(f)), f), WithinAbs(0.0, 1e-15));

    // a constant has no memory at all: depth 0, one table entry
    FiniteMemoryFn c = FiniteMemoryFn::constant(3, 0.5);
    REQUIRE(c.depth == 0);
    REQUIRE(c.size() == 1);
    REQUIRE(sup_norm(c) == 0.5);
    REQUIRE(extend_depth(c, 2).size() == 9);
}

TEST_CASE("on_prefix evaluates the function on longer words", "[function]") {
    FiniteMemoryFn f(2, 2, {1.0, 2.0, 3.0, 4.0});
    for (index_t i = 0; i < word_count(2, 4); ++i)
        REQUIRE(f.on_prefix(i, 4) == f.table[prefix_index(i, 2, 4, 2)]);
}

TEST_CASE("seeded generator reproduces its stream exactly", "[rng]") {
    Rng a(12345), b(12345), c(54321);
    bool all_equal = true, any_differ = false;
    for (int i = 0; i < 1000; ++i) {
        double x = a.uniform(), y = b.uniform(), z = c.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        all_equal = all_equal && (x == y);
        any_differ = any_differ || (x != z);
    }
    REQUIRE(all_equal);
    REQUIRE(any_differ);
}
