#pragma once

#include <cstdint>
#include <random>

namespace temponet {

// Thin wrapper over mt19937_64 whose derived draws do not depend on the
// standard library's distribution implementations, so a seed reproduces the
// same graph on every toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform real in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Number of failures before the first success, success probability p in (0, 1].
    std::uint64_t geometric(double p) {
        std::uint64_t failures = 0;
        while (!bernoulli(p)) ++failures;
        return failures;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace temponet
