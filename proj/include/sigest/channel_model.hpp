#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "sigest/types.hpp"

namespace sigest {

/// Deterministic 64-bit PRNG with the uniform/complex-Gaussian draws the
/// synthesis pipeline needs. The Gaussian uses the polar Box-Muller form, so
/// identical seeds give bit-identical streams on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    /// Circularly-symmetric complex Gaussian CN(0, variance).
    cplx circular_gaussian(double variance);

  private:
    std::mt19937_64 eng_;
};

/// Noiseless space-frequency response of a scene:
///   H(m,n) = sum_i gain_i * e^{-j2pi n tau_i} * e^{-j2pi m phi_i}
///                         * e^{-j2pi (alpha/N) m n phi_i}
/// The last factor is the spatial-wideband (beam squint) term; it is exactly
/// 1 when alpha = 0.
SpaceFrequencyResponse synthesize_response(const RadioScene& scene,
                                           const SystemConfig& config);

/// H plus i.i.d. CN(0, sigma^2) noise with sigma^2 chosen so that the mean
/// per-sample signal power over the grid divided by sigma^2 equals the
/// requested SNR. snr_db = +inf returns H unchanged. Throws ConfigError for
/// a zero-power H at finite SNR.
SpaceFrequencyResponse add_noise(const SpaceFrequencyResponse& H, double snr_db,
                                 std::uint64_t seed);

/// Physical (angle in degrees, delay in seconds) -> normalized signature:
/// phi = (d/lambda) sin(angle) mod 1, tau = delta_f * delay mod 1.
/// Throws ConfigError for angle outside [-90, 90], negative delay, or a
/// positive delay with alpha = 0 (no bandwidth, normalization undefined).
std::pair<double, double> normalize_signature(double angle_deg, double delay_s,
                                              const SystemConfig& config);

/// Inverse of normalize_signature. Normalized angles in [0.5, 1) are read as
/// negative frequencies ([0.5,1) -> [-0.5,0)). Throws ConfigError when the
/// angle is outside the arcsin domain (|phi'| > d/lambda) or when a nonzero
/// delay is denormalized at alpha = 0.
std::pair<double, double> denormalize_signature(double norm_angle, double norm_delay,
                                                const SystemConfig& config);

} // namespace sigest
