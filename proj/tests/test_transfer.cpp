#include <catch2/catch_amalgamated.hpp>

#include <thermoform/measure.hpp>
#include <thermoform/rng.hpp>
#include <thermoform/transfer.hpp>

#include <cmath>
#include <vector>

using namespace thermoform;
using Catch::Matchers::WithinAbs;

TEST_CASE("pressure of the flat potential is the log alphabet size", "[transfer]") {
    REQUIRE_THAT(pressure(FiniteMemoryFn(2, 1, {0.0, 0.0})),
                 WithinAbs(std::log(2.0), 1e-14));
    REQUIRE_THAT(pressure(FiniteMemoryFn(3, 1, {0.0, 0.0, 0.0})),
                 WithinAbs(std::log(3.0), 1e-14));
    // depth does not matter for a constant table
    REQUIRE_THAT(pressure(FiniteMemoryFn(2, 3, std::vector<double>(8, 0.0))),
                 WithinAbs(std::log(2.0), 1e-13));
}

TEST_CASE("pressure of a memoryless potential is its log-sum-exp", "[transfer]") {
    REQUIRE_THAT(pressure(FiniteMemoryFn(2, 1, {1.0, 0.0})),
                 WithinAbs(std::log(std::exp(1.0) + 1.0), 1e-13));

    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(3);
        for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
        double lse = std::log(std::exp(v[0]) + std::exp(v[1]) + std::exp(v[2]));
        REQUIRE_THAT(pressure(FiniteMemoryFn(3, 1, v)), WithinAbs(lse, 1e-13));
    }
}

TEST_CASE("transfer matrix rows follow the append convention", "[transfer]") {
    FiniteMemoryFn a(2, 2, {0.1, 0.2, 0.3, 0.4});
    TransferMatrix m = transfer_matrix(a);
    REQUIRE(m.dim == 2);
    REQUIRE_THAT(m.at(0, 0), WithinAbs(std::exp(0.1), 1e-15));
    REQUIRE_THAT(m.at(0, 1), WithinAbs(std::exp(0.2), 1e-15));
    REQUIRE_THAT(m.at(1, 0), WithinAbs(std::exp(0.3), 1e-15));
    REQUIRE_THAT(m.at(1, 1), WithinAbs(std::exp(0.4), 1e-15));

    // depth 3 on two symbols: rows and columns are the four length-2 words
    FiniteMemoryFn b(2, 3, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7});
    TransferMatrix m3 = transfer_matrix(b);
    REQUIRE(m3.dim == 4);
    // from word (1,2), appending the symbol 1 lands on word (2,1)
    REQUIRE_THAT(m3.at(1, 2), WithinAbs(std::exp(b.table[word_to_index({1, 2, 1}, 2)]), 1e-15));
    // appending cannot reach a state whose first symbol differs from our last
    REQUIRE(m3.at(1, 0) == 0.0);
    REQUIRE(m3.at(1, 1) == 0.0);
}

TEST_CASE("apply_ruelle sums weighted one-symbol extensions", "[transfer]") {
    FiniteMemoryFn a(2, 1, {0.5, -0.25});
    FiniteMemoryFn f(2, 1, {2.0, 3.0});
    FiniteMemoryFn lf = apply_ruelle(a, f);
    REQUIRE(lf.depth == 0);
    REQUIRE_THAT(lf.table[0],
                 WithinAbs(std::exp(0.5) * 2.0 + std::exp(-0.25) * 3.0, 1e-14));

    // with a depth-2 potential the sum depends on the first remaining symbol
    FiniteMemoryFn a2(2, 2, {0.1, 0.2, 0.3, 0.4});
    FiniteMemoryFn lf2 = apply_ruelle(a2, f);
    REQUIRE(lf2.depth == 1);
    REQUIRE_THAT(lf2.table[0],
                 WithinAbs(std::exp(0.1) * 2.0 + std::exp(0.3) * 3.0, 1e-14));
    REQUIRE_THAT(lf2.table[1],
                 WithinAbs(std::exp(0.2) * 2.0 + std::exp(0.4) * 3.0, 1e-14));

    // applying twice equals the two-step helper
    REQUIRE_THAT(sup_diff(apply_ruelle(a2, apply_ruelle(a2, f)), apply_ruelle_n(a2, f, 2)),
                 WithinAbs(0.0, 1e-14));
}

TEST_CASE("perron data satisfies both eigenvalue problems", "[transfer]") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        unsigned d = 2 + trial % 3;
        unsigned k = 1 + trial % 3;
        FiniteMemoryFn a = random_potential(d, k, rng);
        PerronData pd = perron(a);
        REQUIRE(pd.lambda > 0.0);

        // right eigenfunction of the operator
        FiniteMemoryFn lphi = apply_ruelle(a, pd.phi);
        REQUIRE(sup_diff(lphi, pd.lambda * pd.phi) <= 1e-12 * pd.lambda);

        // nu is a probability and the weight-evolution eigenvector: M nu = lambda nu
        TransferMatrix m = transfer_matrix(a);
        double mass = 0.0, pairing = 0.0;
        for (index_t i = 0; i < m.dim; ++i) {
            mass += pd.nu[i];
            pairing += pd.phi.table[i] * pd.nu[i];
        }
        REQUIRE_THAT(mass, WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(pairing, WithinAbs(1.0, 1e-12));
        for (index_t r = 0; r < m.dim; ++r) {
            double s = 0.0;
            for (index_t c = 0; c < m.dim; ++c) s += m.at(r, c) * pd.nu[c];
            REQUIRE_THAT(s, WithinAbs(pd.lambda * pd.nu[r], 1e-11 * pd.lambda));
        }
    }
}

TEST_CASE("normalize produces a flat-unit kernel with zero pressure", "[transfer]") {
    Rng rng(123);
    for (int trial = 0; trial < 30; ++trial) {
        unsigned d = 2 + trial % 3;
        unsigned k = 1 + trial % 4;
        FiniteMemoryFn a = random_potential(d, k, rng);
        FiniteMemoryFn j = normalize(a);
        REQUIRE(is_jacobian(j, 1e-12));
        REQUIRE_THAT(pressure(j), WithinAbs(0.0, 1e-12));
        // a kernel is its own normalization
        REQUIRE(sup_diff(normalize(j), j) <= 1e-11);
    }
}

TEST_CASE("pressure is blind to coboundaries and shifts by constants", "[transfer]") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        unsigned d = 2 + trial % 2;
        FiniteMemoryFn a = random_potential(d, 2, rng);
        FiniteMemoryFn c = random_potential(d, 1, rng);
        double p = pressure(a);
        REQUIRE_THAT(pressure(a + c - compose_shift(c)), WithinAbs(p, 1e-11));
        REQUIRE_THAT(pressure(a + 0.37), WithinAbs(p + 0.37, 1e-12));
    }
}

TEST_CASE("is_jacobian distinguishes kernels from plain potentials", "[transfer]") {
    REQUIRE(is_jacobian(FiniteMemoryFn(2, 1, {std::log(0.5), std::log(0.5)})));
    REQUIRE(is_jacobian(FiniteMemoryFn(2, 1, {std::log(0.3), std::log(0.7)})));
    REQUIRE_FALSE(is_jacobian(FiniteMemoryFn(2, 1, {0.0, 0.0})));
    REQUIRE_FALSE(is_jacobian(FiniteMemoryFn(2, 1, {std::log(0.3), std::log(0.6)})));
}

TEST_CASE("power iteration reports rather than spins on periodic tables", "[transfer]") {
    // two-cycle dynamics: the eigenvalue estimate oscillates forever
    FiniteMemoryFn per(2, 2, {-745.0, 0.0, std::log(2.0), -745.0});
    REQUIRE_THROWS_AS(pressure(per), numeric_error);
}

TEST_CASE("dimension guard rejects oversized transfer matrices", "[transfer]") {
    // depth 7 on 4 symbols would need a 4096-state matrix
    REQUIRE_THROWS_AS(transfer_matrix(FiniteMemoryFn(4, 7, std::vector<double>(16384, 0.0))),
                      validation_error);
}
