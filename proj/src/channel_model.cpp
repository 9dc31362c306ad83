#include "sigest/channel_model.hpp"

#include <cmath>
#include <limits>

#include "sigest/common.hpp"

namespace sigest {

void SystemConfig::validate() const {
    if (num_antennas < 2)
        throw ConfigError("num_antennas must be >= 2, got " + std::to_string(num_antennas));
    if (num_subcarriers < 2)
        throw ConfigError("num_subcarriers must be >= 2, got " + std::to_string(num_subcarriers));
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw ConfigError("alpha must lie in [0, 1), got " + std::to_string(alpha));
    if (!(carrier_freq_hz > 0.0))
        throw ConfigError("carrier_freq_hz must be positive");
    if (!(d_over_lambda > 0.0))
        throw ConfigError("d_over_lambda must be positive");
}

void RadioScene::validate() const {
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        if (!(p.norm_angle >= 0.0 && p.norm_angle < 1.0) ||
            !(p.norm_delay >= 0.0 && p.norm_delay < 1.0))
            throw ConfigError("path signatures must lie in [0, 1)");
        if (std::abs(p.gain) == 0.0)
            throw ConfigError("scene paths must have nonzero gain");
        for (std::size_t j = 0; j < i; ++j)
            if (paths[j].norm_angle == p.norm_angle && paths[j].norm_delay == p.norm_delay)
                throw ConfigError("two paths share the same (angle, delay) signature");
    }
}

double SpaceFrequencyResponse::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data)
        s += std::norm(v);
    return std::sqrt(s);
}

double AngleDelayMap::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data)
        s += std::norm(v);
    return std::sqrt(s);
}

void SpaceFrequencyResponse::validate() const {
    config.validate();
    const auto expected =
        static_cast<std::size_t>(config.num_antennas) * config.num_subcarriers;
    if (data.size() != expected)
        throw ConfigError("response dimensions do not match the config");
    for (const auto& v : data)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ConfigError("response contains non-finite entries");
}

cplx Rng::circular_gaussian(double variance) {
    // Polar Box-Muller: radius from one uniform, phase from another.
    double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
    double u2 = uniform();
    double r = std::sqrt(-variance * std::log(u1));
    return std::polar(r, 2.0 * std::numbers::pi * u2);
}

SpaceFrequencyResponse synthesize_response(const RadioScene& scene,
                                           const SystemConfig& config) {
    config.validate();
    scene.validate();

    SpaceFrequencyResponse H(config);
    const int M = config.num_antennas;
    const int N = config.num_subcarriers;
    for (const auto& p : scene.paths) {
        for (int m = 0; m < M; ++m) {
            for (int n = 0; n < N; ++n) {
                double cycles = n * p.norm_delay + m * p.norm_angle +
                                wideband_cycles(config, m, n, p.norm_angle);
                H.at(m, n) += p.gain * cis_cycles(-cycles);
            }
        }
    }
    return H;
}

SpaceFrequencyResponse add_noise(const SpaceFrequencyResponse& H, double snr_db,
                                 std::uint64_t seed) {
    H.validate();
    if (snr_db == std::numeric_limits<double>::infinity())
        return H;

    double signal_power = 0.0;
    for (const auto& v : H.data)
        signal_power += std::norm(v);
    signal_power /= static_cast<double>(H.data.size());
    if (signal_power == 0.0)
        throw ConfigError("cannot add finite-SNR noise to an all-zero response");

    const double variance = signal_power * std::pow(10.0, -snr_db / 10.0);
    Rng rng(seed);
    SpaceFrequencyResponse out = H;
    for (auto& v : out.data)
        v += rng.circular_gaussian(variance);
    return out;
}

std::pair<double, double> normalize_signature(double angle_deg, double delay_s,
                                              const SystemConfig& config) {
    config.validate();
    if (!(angle_deg >= -90.0 && angle_deg <= 90.0))
        throw ConfigError("angle must lie in [-90, 90] degrees");
    if (!(delay_s >= 0.0))
        throw ConfigError("delay must be nonnegative");
    if (config.alpha == 0.0 && delay_s > 0.0)
        throw ConfigError("delay normalization is undefined at alpha = 0");

    double phi = config.d_over_lambda *
                 std::sin(angle_deg * std::numbers::pi / 180.0);
    double tau = config.subcarrier_spacing_hz() * delay_s;
    return {wrap_unit(phi), wrap_unit(tau)};
}

std::pair<double, double> denormalize_signature(double norm_angle, double norm_delay,
                                                const SystemConfig& config) {
    config.validate();
    // [0.5, 1) reads as a negative spatial frequency.
    double phi = norm_angle >= 0.5 ? norm_angle - 1.0 : norm_angle;
    double x = phi / config.d_over_lambda;
    if (std::abs(x) > 1.0)
        throw ConfigError("normalized angle outside the arcsin domain");
    double angle_deg = std::asin(x) * 180.0 / std::numbers::pi;

    double delay_s = 0.0;
    if (norm_delay != 0.0) {
        if (config.alpha == 0.0)
            throw ConfigError("delay denormalization is undefined at alpha = 0");
        delay_s = norm_delay / config.subcarrier_spacing_hz();
    }
    return {angle_deg, delay_s};
}

} // namespace sigest
