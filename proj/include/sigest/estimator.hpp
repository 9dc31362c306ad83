#pragma once

#include <vector>

#include "sigest/types.hpp"

namespace sigest {

enum class EstimatorMode {
    two_stage, // coarse-bin correction, then fine rotation
    one_stage, // direct rotation around the raw peak (no coarse correction)
};

enum class Cancellation {
    none,       // clusters processed independently (reference behaviour)
    successive, // subtract each reconstructed path before the next cluster
};

struct EstimatorOptions {
    static constexpr int kAuto = -1;

    int rotation_count_m = 16; // R_M, fine-search grid points per axis
    int rotation_count_n = 16; // R_N
    int neighborhood_m = kAuto; // stage-1 half-width; kAuto = ceil(alpha*M)
    int neighborhood_n = kAuto; // kAuto = ceil(alpha*M) as well
    int max_paths = kAuto;      // detection budget; kAuto = threshold only
    double detection_threshold_factor = 12.0; // gamma, vs median |G|^2
    EstimatorMode mode = EstimatorMode::two_stage;
    Cancellation cancellation = Cancellation::none;

    /// Neighborhood with kAuto resolved to the maximum squint shift
    /// ceil(alpha*M). Used by cluster detection (exclusion windows) in both
    /// modes; the physical cluster extent does not depend on the mode.
    int resolved_neighborhood_m(const SystemConfig& config) const;
    int resolved_neighborhood_n(const SystemConfig& config) const;

    /// Stage-1 scan half-width: the resolved neighborhood, forced to 0 in
    /// one_stage mode (which is exactly two_stage with no coarse search).
    int scan_neighborhood_m(const SystemConfig& config) const;
    int scan_neighborhood_n(const SystemConfig& config) const;

    void validate() const; // rotation counts >= 2, gamma > 0
};

struct ClusterPeak {
    int k = 0;
    int l = 0;
    double power = 0.0; // |G(k,l)|^2
};

/// One estimated path with its detection bookkeeping.
struct EstimatedSignature {
    int raw_k = 0, raw_l = 0;       // detected cluster peak
    int coarse_k = 0, coarse_l = 0; // stage-1 corrected coarse bin
    double norm_angle = 0.0;        // fine estimate, [0, 1)
    double norm_delay = 0.0;        // fine estimate, [0, 1)
    cplx gain = {0.0, 0.0};
    double peak_power = 0.0; // |G|^2 at the detected peak
};

struct EstimationReport {
    std::vector<EstimatedSignature> paths;
};

/// Iterative peak picking on |G|^2: take the strongest unmasked bin, mask a
/// modular window of half-width (nbr_m + 1, nbr_n + 1) around it, repeat.
/// Stops when the budget is reached or the next peak drops below
/// gamma * median of the unmasked power. Peaks return in decreasing power;
/// exact ties break by ascending (k, l).
std::vector<ClusterPeak> detect_clusters(const AngleDelayMap& G,
                                         const EstimatorOptions& opts);

/// Multiply elementwise by e^{+j2pi (alpha/N) m n angle_hyp}, the conjugate
/// of the wideband term for a hypothesized normalized angle. Removes the
/// squint exactly when the hypothesis matches the path angle; identity for
/// alpha = 0. Norm-preserving.
SpaceFrequencyResponse conjugate_wideband(const SpaceFrequencyResponse& H,
                                          double angle_hyp);

struct Stage1Result {
    int k = 0, l = 0;                  // corrected coarse bin
    double power = 0.0;                // winning |G_rem(k,l)|^2
    SpaceFrequencyResponse conjugated; // H conjugated with the winning k/M
};

/// Stage 1 of the two-stage rotation: scan angle candidates k in a modular
/// window around the raw peak, conjugating with each hypothesis k/M (the
/// squint depends only on the angle), and pick the (k, l) in the window
/// maximizing the conjugated map power. Each candidate pair costs one O(MN)
/// projection. Ties break by modular Chebyshev distance to the raw peak,
/// then ascending (k, l).
Stage1Result stage1_correct_coarse(const SpaceFrequencyResponse& H,
                                   const ClusterPeak& raw_peak,
                                   const EstimatorOptions& opts);

/// Stage 2: grid search of the rotation offset over
///   d in { -1/(2Q) + r * (1/Q)/(R-1) : r = 0..R-1 }
/// per axis, maximizing |G_rot(coarse_k, coarse_l)|^2 evaluated by direct
/// projection of the rotated response. Ties break by (|d_angle|, |d_delay|,
/// d_angle, d_delay) ascending. Throws ConfigError for rotation counts < 2.
RotationOffset stage2_fine_rotation(const SpaceFrequencyResponse& conjugated,
                                    int coarse_k, int coarse_l,
                                    const EstimatorOptions& opts);

/// Complex path coefficient via the rotated bilinear form
///   f_k^H R(d_angle) (H o conj(Theta(k/M))) R(d_delay) f_l / sqrt(MN),
/// i.e. the conjugated map projected at the fine estimate, scaled so an
/// on-grid noiseless path returns its gain exactly. The wideband conjugation
/// uses the stage-1 hypothesis coarse_k/M.
cplx estimate_coefficient(const SpaceFrequencyResponse& H,
                          const EstimatedSignature& est);

/// Full pipeline: transform, detect clusters, and per cluster run stage 1,
/// stage 2 and the coefficient estimate. With Cancellation::successive the
/// reconstructed path is subtracted from the working response before the
/// next cluster. Never fails on noisy data; only configuration errors throw.
EstimationReport estimate_scene(const SpaceFrequencyResponse& H,
                                const EstimatorOptions& opts);

} // namespace sigest
