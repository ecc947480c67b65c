#ifndef UAVSIM_RNG_HPP
#define UAVSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace uavsim {

// All randomness in the simulator flows through one of these streams.
// Distributions are hand-mapped from raw engine output instead of the
// <random> distribution classes, whose value sequences differ between
// standard library implementations; mt19937_64 itself is specified
// bit-exactly, so a (seed, draw order) pair pins every output byte.
using RngStream = std::mt19937_64;

// Uniform on [0, 1), 53-bit resolution.
inline double uniform01(RngStream& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1]; safe as a log() argument.
inline double uniform01_open_low(RngStream& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller. Two engine draws per sample, no
// cached spare, so the consumption count is predictable.
inline double normal01(RngStream& rng) {
    const double u1 = uniform01_open_low(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

inline bool bernoulli(RngStream& rng, double p) {
    return uniform01(rng) < p;
}

} // namespace uavsim

#endif
