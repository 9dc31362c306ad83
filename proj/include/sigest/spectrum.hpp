#pragma once

#include "sigest/types.hpp"

namespace sigest {

/// Normalized 2-D inverse DFT of the space-frequency response:
///   G(k,l) = (1/sqrt(MN)) sum_m sum_n H(m,n) e^{+j2pi mk/M} e^{+j2pi nl/N}
/// Unitary, so the Frobenius norm is preserved.
AngleDelayMap angle_delay_map(const SpaceFrequencyResponse& H);

/// Value of the same normalized inverse transform at a single, possibly
/// fractional, bin position (angle_cycles, delay_cycles):
///   (1/sqrt(MN)) sum_m sum_n H(m,n) e^{+j2pi m*angle_cycles} e^{+j2pi n*delay_cycles}
/// project_bin(H, k/M, l/N) equals angle_delay_map(H).at(k, l). One call is
/// O(MN); the rotation searches rely on that cost being per-candidate.
cplx project_bin(const SpaceFrequencyResponse& H, double angle_cycles,
                 double delay_cycles);

/// Complex Dirichlet kernel with its linear phase,
///   D_Q(x) = e^{-j pi x (Q-1)} sin(Q pi x) / sin(pi x)
///          = sum_{m=0}^{Q-1} e^{-j 2 pi x m},
/// 1-periodic in x, equal to Q at integer x (removable singularity).
cplx dirichlet(int length, double x);

/// Closed-form narrowband leakage at bin (k, l):
///   G(k,l) = sum_i gain_i / sqrt(MN) * D_M(phi_i - k/M) * D_N(tau_i - l/N).
/// Matches angle_delay_map(synthesize_response(scene)) for alpha = 0; throws
/// ConfigError when called with alpha != 0, where the closed form does not
/// hold.
cplx predict_leakage_narrowband(const RadioScene& scene, const SystemConfig& config,
                                int k, int l);

/// Predicted squint spread, in bins, of a path at normalized angle phi:
/// round(alpha * M * phi), the same amount in the angle and delay domains.
int predicted_spread_bins(double norm_angle, const SystemConfig& config);

/// Elementwise unimodular rotation
///   H_rot(m,n) = e^{+j2pi m d_angle} H(m,n) e^{+j2pi n d_delay}.
/// For a single narrowband path at (phi, tau), the offset
/// (phi - k/M, tau - l/N) concentrates the whole map onto bin (k, l), and the
/// estimate assembly k/M + d_angle recovers phi. Norm-preserving.
SpaceFrequencyResponse rotate_response(const SpaceFrequencyResponse& H,
                                       const RotationOffset& offset);

} // namespace sigest
