#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace kuznets {

/// Name recorded in output metadata. Bump the suffix if the stream
/// derivation or sampling below ever changes.
inline constexpr std::string_view kRngName = "kuznets-rng-v1";

inline constexpr std::uint64_t kDefaultSeed = 20170501;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent engine for stream `stream` of `seed`. Streams do not depend on
/// the order in which they are created.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51A7E1ULL)));
}

/// Uniform integer in [0, n), unbiased (rejection on the raw 64-bit output).
inline std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n);
    std::uint64_t v = eng();
    while (v >= limit) v = eng();
    return v % n;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

/// Standard normal by Box-Muller (one value per call).
inline double standard_normal(std::mt19937_64& eng) {
    double u1 = uniform_unit(eng);
    while (u1 <= 0.0) u1 = uniform_unit(eng);
    const double u2 = uniform_unit(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace kuznets
