#pragma once

#include <cstdint>

// Counter-based pseudo-randomness. Every draw is a pure function of the seed
// and the coordinates that identify the draw, so results never depend on
// evaluation order and are reproducible across platforms.
namespace rolesim::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output stage. The additive constant keeps 0 from mapping to 0.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ b);
}

inline constexpr std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(hash2(a, b) ^ c);
}

inline constexpr std::uint64_t hash4(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                     std::uint64_t d) {
    return mix64(hash3(a, b, c) ^ d);
}

// Uniform double in [0, 1) from the top 53 bits.
inline constexpr double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Sequential SplitMix64 stream, used where a stateful generator is simpler
// (start vectors, test-case generation).
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double unit() { return to_unit(next()); }

    // Uniform in [-1, 1).
    double sym() { return 2.0 * unit() - 1.0; }

    // Uniform integer in [0, bound). Modulo bias is irrelevant at test scale.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

}  // namespace rolesim::rng
