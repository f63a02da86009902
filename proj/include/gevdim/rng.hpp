#pragma once

#include <cstdint>

namespace gevdim {

// SplitMix64: advances `state` by the golden-ratio increment and returns a
// mixed output. Used for seeding and for counter-based key derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ stream. Streams seeded from distinct 64-bit keys via SplitMix64
// are statistically independent; identical keys give bit-identical draws.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t s_[4];
};

// Counter-based key derivation: the child seed depends only on the root seed
// and the key tuple, never on draw order, so any parallel schedule of jobs
// sees identical randomness. Keys are absorbed in order through SplitMix64.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t k1,
                                 std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
    std::uint64_t h = root;
    h = splitmix64(h);
    h ^= k1;
    h = splitmix64(h);
    h ^= k2;
    h = splitmix64(h);
    h ^= k3;
    h = splitmix64(h);
    return h;
}

inline RngStream derive_stream(std::uint64_t root, std::uint64_t k1,
                               std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
    return RngStream(derive_seed(root, k1, k2, k3));
}

}  // namespace gevdim
