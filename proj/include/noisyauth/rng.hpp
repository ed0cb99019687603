#pragma once

#include <cstdint>
#include <random>

namespace noisyauth {

// splitmix64 step; also used as a stateless mixer for stream derivation
// and lazy (element, block) membership hashing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b * 0x9e3779b97f4a7c15ULL);
    std::uint64_t x = splitmix64(s);
    return splitmix64(s) ^ x;
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b), c);
}

// Seedable stream of pseudorandom values. Streams are derived, never
// shared: every sampling operation takes an explicit stream and two
// streams derived from distinct indices are independent for all
// practical purposes.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed_sequence(seed)) {}

    // Derives the `index`-th child stream of `master`.
    static RngStream derive(std::uint64_t master, std::uint64_t index) {
        return RngStream(mix64(master, index));
    }

    RngStream derive_child(std::uint64_t index) const {
        return RngStream::derive(base_seed_, index);
    }

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 seed_sequence(std::uint64_t seed) {
        base_seed_ = seed;
        std::uint64_t s = seed;
        std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s))};
        return std::mt19937_64(seq);
    }

    std::uint64_t base_seed_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace noisyauth
