#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sigest/evaluation.hpp"
#include "sigest/types.hpp"

namespace sigest {

/// Shortest round-trip decimal rendering (via std::to_chars); "inf"/"nan"
/// spelled out. Used for every CSV field so reruns are byte-identical.
std::string format_double(double v);

/// Scene file: JSON with an optional "config" object {M, N, alpha, fc_hz,
/// d_over_lambda} and a "paths" array; each path gives either normalized
/// {norm_angle, norm_delay} or physical {angle_deg, delay_s} coordinates,
/// plus {gain_re, gain_im}.
struct SceneEntry {
    bool physical = false; // true: (angle_deg, delay_s); false: normalized
    double angle = 0.0;
    double delay = 0.0;
    cplx gain = {1.0, 0.0};
};

struct SceneFile {
    std::vector<SceneEntry> entries;
    std::optional<SystemConfig> config; // present when the file carries one
};

SceneFile load_scene_file(const std::string& path);

/// Convert entries to a scene; physical coordinates are normalized against
/// the given config.
RadioScene resolve_scene(const SceneFile& file, const SystemConfig& config);

/// `# key=value` header lines echoing the fully resolved configuration,
/// followed by the rows. Every writer below emits this block first.
void write_config_header(std::ostream& os, const SystemConfig& config,
                         const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Space-frequency CSV: header block, then `m,n,re,im`.
void write_response_csv(std::ostream& os, const SpaceFrequencyResponse& H,
                        const std::vector<std::pair<std::string, std::string>>& extra = {});
SpaceFrequencyResponse read_response_csv(const std::string& path);

/// Angle-delay CSV: `k,l,re,im`, or `k,l,mag_db` with magnitude_only (zero
/// magnitude renders as -inf dB).
void write_map_csv(std::ostream& os, const AngleDelayMap& G, bool magnitude_only,
                   const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Estimation report CSV:
/// `path_idx,k_raw,l_raw,k_corr,l_corr,phi_norm,tau_norm,gain_re,gain_im,peak_power`.
void write_report_csv(std::ostream& os, const EstimationReport& report,
                      const SystemConfig& config,
                      const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Sweep aggregate CSV:
/// `alpha,K,snr_db,mode,trials,hit_rate,false_rate,rmse_angle_rad,rmse_delay_s,rmse_gain`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const SystemConfig& config,
                     const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Sweep definition file: JSON with a base "config", axis arrays "alpha",
/// "targets", "snr_db" (numbers or "inf"), "mode" (["two-stage","one-stage"]),
/// scalar "trials" and "seed", an optional "estimator" object {rot_m, rot_n,
/// nbr_m, nbr_n, gamma, max_paths: int|"auto"|"targets", cancellation} and an
/// optional "enforce_separation" flag.
struct SweepSpec {
    SystemConfig base_config;
    std::vector<double> alphas;
    std::vector<int> targets;
    std::vector<double> snrs_db;
    std::vector<EstimatorMode> modes;
    int trials = 50;
    std::uint64_t seed = 0;
    EstimatorOptions opts;
    bool max_paths_from_targets = true; // detection budget = K per cell
    bool enforce_separation = true;
};

SweepSpec load_sweep_file(const std::string& path);

/// Expand a sweep into per-trial specs. Trial t of every cell shares the
/// derived seed splitmix64(seed XOR t), so cells are comparable per seed.
std::vector<TrialSpec> expand_sweep(const SweepSpec& sweep);

const char* mode_name(EstimatorMode mode); // "two-stage" / "one-stage"
EstimatorMode parse_mode(const std::string& name);

} // namespace sigest
