#pragma once

#include <cstdint>

namespace dris {

// splitmix64. Self-contained so traces do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Inclusive range; modulo bias is acceptable for simulation purposes.
    std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
        if (hi <= lo) return lo;
        return lo + next_u64() % (hi - lo + 1);
    }

    // Uniform in [0, 1) with 53 significant bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return next_unit() < p;
    }

private:
    std::uint64_t state_;
};

}  // namespace dris
