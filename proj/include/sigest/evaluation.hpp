#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "sigest/estimator.hpp"
#include "sigest/types.hpp"

namespace sigest {

/// One Monte Carlo trial. The seed fully determines the scene, the gains and
/// the noise realization.
struct TrialSpec {
    SystemConfig config;
    int num_targets = 5;
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    EstimatorOptions opts;
    bool enforce_separation = true; // rejection-sample a minimum cluster spacing
};

/// Detection and accuracy scores for one trial. RMSEs are over hits only and
/// NaN when there are none; angle and delay are reported both in physical
/// units (radians, seconds) and in normalized cycles.
struct ScoreReport {
    int hits = 0;
    int falses = 0;
    int misses = 0;
    double rmse_angle_rad = 0.0;
    double rmse_angle_norm = 0.0;
    double rmse_delay_s = 0.0;
    double rmse_delay_norm = 0.0;
    double rmse_gain = 0.0;
};

/// Uniform random scene: angles and delays U[0,1), unit-magnitude gains with
/// U[0,2pi) phase. With enforce_separation, draws are rejected until every
/// pair is at least 2*round(alpha*M)+1 bins apart in modular Chebyshev
/// distance; more than 10^4 rejected draws throw ConfigError.
RadioScene random_scene(const TrialSpec& spec);

/// Greedy one-to-one matching in decreasing estimate power; an estimate hits
/// an unmatched truth path when both modular errors are within one bin
/// (|d_phi| < 1/M and |d_tau| < 1/N). RMSEs are computed over the matched
/// pairs.
ScoreReport match_and_score(const RadioScene& truth, const EstimationReport& report,
                            const SystemConfig& config);

/// scene -> synthesize -> noise -> estimate -> score, all from spec.seed.
ScoreReport run_single_trial(const TrialSpec& spec);

/// One aggregated sweep cell.
struct SweepRow {
    double alpha = 0.0;
    int num_targets = 0;
    double snr_db = 0.0;
    EstimatorMode mode = EstimatorMode::two_stage;
    int trials = 0;
    double hit_rate = 0.0;
    double false_rate = 0.0;
    double rmse_angle_rad = 0.0;
    double rmse_delay_s = 0.0;
    double rmse_gain = 0.0;
};

/// Run every trial (optionally across `parallelism` threads) and aggregate
/// per (alpha, targets, snr, mode) cell in first-appearance order. Hit rate
/// is hits/(K*trials), false rate is falses/total detections, RMSEs are the
/// mean of per-trial RMSEs over trials with at least one hit. The aggregate
/// is reduced in trial order, so the output does not depend on parallelism.
std::vector<SweepRow> run_trials(const std::vector<TrialSpec>& specs,
                                 int parallelism);

} // namespace sigest
