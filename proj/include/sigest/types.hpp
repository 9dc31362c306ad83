#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigest {

using cplx = std::complex<double>;

/// Invalid parameters, model misuse, or degenerate inputs. The CLI maps this
/// to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input/output files. The CLI maps this to exit
/// code 1.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Array/waveform geometry shared by every transform.
///
/// The system bandwidth is f_s = alpha * carrier_freq_hz; alpha = 0 selects
/// the exact spatial-narrowband model. Subcarrier spacing is always derived,
/// never stored.
struct SystemConfig {
    int num_antennas = 128;    // M, ULA elements
    int num_subcarriers = 128; // N, OFDM tones
    double alpha = 0.0;        // bandwidth selection parameter, in [0, 1)
    double carrier_freq_hz = 73e9;
    double d_over_lambda = 0.5; // element spacing in wavelengths

    double subcarrier_spacing_hz() const {
        return alpha * carrier_freq_hz / num_subcarriers;
    }

    /// Throws ConfigError on any invariant violation (M,N >= 2, alpha in
    /// [0,1), positive carrier and spacing).
    void validate() const;

    bool operator==(const SystemConfig&) const = default;
};

/// One scatterer in normalized units: angle in cycles per antenna index,
/// delay in cycles per subcarrier index, both stored modulo 1.
struct PathSignature {
    double norm_angle = 0.0; // [0, 1)
    double norm_delay = 0.0; // [0, 1)
    cplx gain = {1.0, 0.0};
};

struct RadioScene {
    std::vector<PathSignature> paths;

    /// Throws ConfigError if two paths share an identical (angle, delay)
    /// pair, a path has zero gain, or a signature lies outside [0, 1).
    void validate() const;
};

/// M x N complex channel response H(m, n), row-major over (antenna,
/// subcarrier).
struct SpaceFrequencyResponse {
    std::vector<cplx> data;
    SystemConfig config;

    SpaceFrequencyResponse() = default;
    explicit SpaceFrequencyResponse(const SystemConfig& cfg)
        : data(static_cast<std::size_t>(cfg.num_antennas) * cfg.num_subcarriers),
          config(cfg) {}

    cplx& at(int m, int n) {
        return data[static_cast<std::size_t>(m) * config.num_subcarriers + n];
    }
    const cplx& at(int m, int n) const {
        return data[static_cast<std::size_t>(m) * config.num_subcarriers + n];
    }

    double frobenius_norm() const;

    /// Dimensions must match the config and every entry must be finite.
    void validate() const;
};

/// M x N angle-delay spectrum G(k, l), the normalized 2-D inverse DFT of a
/// SpaceFrequencyResponse. Same storage layout, indexed (angle bin k,
/// delay bin l).
struct AngleDelayMap {
    std::vector<cplx> data;
    SystemConfig config;

    AngleDelayMap() = default;
    explicit AngleDelayMap(const SystemConfig& cfg)
        : data(static_cast<std::size_t>(cfg.num_antennas) * cfg.num_subcarriers),
          config(cfg) {}

    cplx& at(int k, int l) {
        return data[static_cast<std::size_t>(k) * config.num_subcarriers + l];
    }
    const cplx& at(int k, int l) const {
        return data[static_cast<std::size_t>(k) * config.num_subcarriers + l];
    }

    double frobenius_norm() const;
};

/// Fractional rotation applied to a space-frequency response: d_angle in
/// cycles/antenna pairs with the antenna index, d_delay in cycles/subcarrier
/// with the subcarrier index.
struct RotationOffset {
    double d_angle = 0.0;
    double d_delay = 0.0;
};

} // namespace sigest
