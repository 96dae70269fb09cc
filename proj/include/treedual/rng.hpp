#pragma once

#include <cstdint>
#include <random>

namespace treedual {

// Deterministic RNG used for probe generation and randomized trials.
// std::uniform_real_distribution is implementation-defined, so uniforms
// are derived from raw mt19937_64 output to keep reports bit-identical
// across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    int below(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

private:
    std::mt19937_64 engine_;
};

}  // namespace treedual
