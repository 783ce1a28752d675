#pragma once

#include <cstdint>
#include <random>

namespace thermoform {

// Deterministic RNG for reproducible reports. Uniform doubles are derived
// from the raw 64-bit stream directly (not via std::uniform_real_distribution,
// whose output is implementation-defined), so a seed pins the exact bytes of
// every generated table on any platform.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    }

    // uniform in [-1,1)
    double symmetric() { return 2.0 * uniform() - 1.0; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return gen() % n; }
};

} // namespace thermoform
