#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bivruin {

// One splitmix64-style mixing round; used to derive engine seeds for
// independent substreams.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Keeps draws of different estimators decoupled even when they share a seed
// and path indices.
enum class StreamRole : std::uint64_t {
    survival = 1,
    transform_joint = 2,
    transform_line1 = 3,
    transform_line2 = 4,
    wh_left = 5,
    wh_right = 6,
    ladder = 7,
    generic = 8,
};

// Engine for one (seed, role, path index) substream. mt19937_64 seeded from a
// single value is fully specified by the standard, so results are
// reproducible for any worker count and platform.
inline std::mt19937_64 substream(std::uint64_t seed, StreamRole role, std::uint64_t index) {
    return std::mt19937_64(mix64(mix64(seed, static_cast<std::uint64_t>(role)), index));
}

// Uniform on (0,1] with 53-bit resolution. The std distributions are
// implementation-defined, so draws are derived from raw engine output.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>((g() >> 11) + 1) * 0x1.0p-53;
}

inline double exponential_draw(std::mt19937_64& g, double rate) {
    return -std::log(uniform01(g)) / rate;
}

// Knuth product method; fine for the small means used here.
inline std::uint64_t poisson_draw(std::mt19937_64& g, double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(g);
    } while (p > limit);
    return k - 1;
}

}  // namespace bivruin
