#pragma once

#include <cstdint>
#include <random>

namespace spreadnet {

/// Deterministic random source. Wraps std::mt19937_64 (bit-exact across
/// platforms by the standard) with hand-rolled uniform helpers, because the
/// std:: distributions are implementation-defined and would break
/// reproducibility of seeded runs across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + uniform01() * (hi - lo);
    }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling over full 64-bit words keeps the result unbiased.
        for (;;) {
            const std::uint64_t x = engine_();
            const std::uint64_t r = x % bound;
            if (x - r <= UINT64_MAX - (bound - 1)) return r;
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace spreadnet
