#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace linemark::detail {

// mt19937_64 has a fully specified output sequence; the distributions below
// are spelled out so draws are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }
    /// Integer in [lo, hi].
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    double normal(double sigma) { return sigma > 0.0 ? sigma * normal() : 0.0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace linemark::detail
