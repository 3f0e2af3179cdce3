#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sagaze {

// Deterministic random source for the synthetic generator. std::mt19937_64
// has a pinned output sequence, but the standard *distributions* do not, so
// uniform and normal variates are derived here with fixed arithmetic:
// identical (seed, call sequence) gives identical doubles on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0, 1]: 53 random bits, never 0 (safe under log).
    double uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, n). The modulo bias is below 2^-59 for the
    // small n used here.
    int below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace sagaze
