#pragma once

#include <cstdint>

namespace qsched {

// SplitMix64: splittable 64-bit PRNG (Steele et al.). Chosen for exact
// cross-platform reproducibility; std::random distributions are not
// guaranteed to produce identical streams across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is fine here; n is tiny compared to 2^64.
        return next_u64() % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed from (seed, tag). Used to give every
// iteration / restart / grid point its own deterministic generator.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    SplitMix64 g(seed ^ (0x632be59bd9b4e019ULL * (tag + 1)));
    return g.next_u64();
}

} // namespace qsched
