#pragma once

// Deterministic random number generation.
//
// All sampling in this library flows through Xoshiro256ss seeded from an
// explicit 64-bit Seed, so equal seeds give bit-identical streams on any
// platform with IEEE-754 doubles. Normal variates use the Marsaglia polar
// method (polar Box-Muller) rather than std::normal_distribution, whose
// output is implementation-defined.

#include <cstdint>
#include <cmath>

namespace lecam {

// ============================================================================
// SEEDS
// ============================================================================

struct Seed {
    std::uint64_t value = 0;
};

inline bool operator==(Seed a, Seed b) { return a.value == b.value; }

// splitmix64 step (Steele, Lea & Flood 2014). Used for seeding the main
// generator and for child-seed derivation; the finalizer is bijective.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
    std::uint64_t s = z;
    return splitmix64_next(s);
}

// 64-bit avalanche mix of (base, stream, index). Each input is first spread
// by an odd multiplier, then the combination is passed through the splitmix64
// finalizer twice. Collisions among derived seeds occur only at the birthday
// bound of the 64-bit space.
inline Seed derive_child_seed(Seed base, std::uint64_t stream_id, std::uint64_t index) {
    std::uint64_t h = mix64(base.value);
    h = mix64(h ^ (stream_id * 0xA24BAED4963EE407ULL));
    h = mix64(h ^ (index * 0x9FB21C651E98DF25ULL));
    return Seed{h};
}

// ============================================================================
// GENERATOR
// ============================================================================

// xoshiro256** 1.0 (Blackman & Vigna 2018), an xorshift-family generator.
// State is seeded through splitmix64 as the authors recommend.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(Seed seed) {
        std::uint64_t sm = seed.value;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Standard normal via the Marsaglia polar method; the spare variate of
    // each accepted pair is cached, so draws come in a fixed order.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lecam
