#pragma once

#include <array>
#include <cstdint>

namespace snn {

/// splitmix64 step. Used only to expand a 64-bit seed into generator state.
constexpr std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** (Blackman & Vigna), seeded by four splitmix64 outputs.
/// The draw sequence depends only on the seed, never on the platform.
class Xoshiro256 {
public:
    using State = std::array<std::uint64_t, 4>;

    explicit Xoshiro256(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    static Xoshiro256 from_state(const State& s) {
        Xoshiro256 g;
        g.s_ = s;
        return g;
    }

    const State& state() const { return s_; }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t bounded(std::uint64_t bound) {
        // Reject the low remainder so every residue is equally likely.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    bool operator==(const Xoshiro256&) const = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    State s_{};
};

inline Xoshiro256 random_stream(std::uint64_t seed) { return Xoshiro256(seed); }

} // namespace snn
