#pragma once

#include <cstdint>
#include <string_view>

#include "cspace/common.hpp"

namespace cspace {

// SplitMix64. All randomness in the project flows from explicit seeds through
// named substreams, so results are byte-reproducible across platforms and
// thread counts. No std:: distributions (their outputs are
// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

// Substream derivation: (seed, purpose tag, index) -> independent stream.
inline std::uint64_t substream_state(std::uint64_t seed, std::string_view tag,
                                     std::uint64_t index = 0) {
    std::uint64_t h = fnv1a64(tag);
    std::uint64_t z = seed ^ (h + 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z ^= index * 0xD6E8FEB86659FD93ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline Rng substream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
    return Rng(substream_state(seed, tag, index));
}

// Shoemake's method: uniform random unit quaternion.
inline Quat random_quaternion(Rng& rng) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    const double u3 = rng.next_double();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    return {a * std::sin(two_pi * u2), a * std::cos(two_pi * u2), b * std::sin(two_pi * u3),
            b * std::cos(two_pi * u3)};
}

}  // namespace cspace
