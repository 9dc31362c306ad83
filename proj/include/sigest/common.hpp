#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "sigest/types.hpp"

namespace sigest {

/// Reduce to [0, 1).
inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

/// Reduce to [-0.5, 0.5).
inline double wrap_half(double x) {
    double r = x - std::floor(x + 0.5);
    return r >= 0.5 ? -0.5 : r;
}

/// Circular distance on the unit torus, in [0, 0.5].
inline double circ_dist(double a, double b) {
    return std::abs(wrap_half(a - b));
}

/// i mod q with a nonnegative result for any i.
inline int mod_index(int i, int q) {
    int r = i % q;
    return r < 0 ? r + q : r;
}

/// Circular bin distance |a - b| mod q, in [0, q/2].
inline int mod_bin_dist(int a, int b, int q) {
    int d = mod_index(a - b, q);
    return d > q - d ? q - d : d;
}

/// Nearest integer, halves away from minus infinity (round-half-up).
inline int round_half_up(double x) {
    return static_cast<int>(std::floor(x + 0.5));
}

/// e^{+j 2 pi cycles}, with the argument reduced modulo 1 first so large
/// phase accumulations keep full precision.
inline cplx cis_cycles(double cycles) {
    return std::polar(1.0, 2.0 * std::numbers::pi * wrap_half(cycles));
}

/// Phase of the wideband (beam-squint) term for antenna m, subcarrier n and
/// normalized angle phi, in cycles. Synthesis and conjugation both go through
/// this expression so an exact hypothesis cancels the term exactly.
inline double wideband_cycles(const SystemConfig& cfg, int m, int n, double phi) {
    return (cfg.alpha / cfg.num_subcarriers) * m * n * phi;
}

/// SplitMix64 mixing step; used to derive per-trial seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace sigest
