#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace heraldsim::rng {

// splitmix64 step; used both as a mixer and for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream-splitting rule: child seed for stream `index` of a base seed.
// Streams used by the pipeline: 0..W-1 per-window sampling, W vacuum
// calibration, W+1 phase trajectory.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t state = base ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return splitmix64(state);
}

// Uniform double in [0, 1) with explicit 53-bit conversion.
inline double uniform01(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// One standard normal draw (Box-Muller, cosine branch).
inline double gaussian(std::mt19937_64& engine) {
    double u1 = uniform01(engine);
    double u2 = uniform01(engine);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
}

} // namespace heraldsim::rng
