#include "sigest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "sigest/channel_model.hpp"
#include "sigest/common.hpp"
#include "sigest/spectrum.hpp"

namespace sigest {

namespace {

double median(std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n == 0)
        return 0.0;
    auto mid = v.begin() + n / 2;
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1)
        return *mid;
    double hi = *mid;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace

int EstimatorOptions::resolved_neighborhood_m(const SystemConfig& config) const {
    if (neighborhood_m != kAuto)
        return neighborhood_m;
    return static_cast<int>(std::ceil(config.alpha * config.num_antennas));
}

int EstimatorOptions::resolved_neighborhood_n(const SystemConfig& config) const {
    if (neighborhood_n != kAuto)
        return neighborhood_n;
    // The squint spread is ceil(alpha*M) bins in the delay domain too.
    return static_cast<int>(std::ceil(config.alpha * config.num_antennas));
}

int EstimatorOptions::scan_neighborhood_m(const SystemConfig& config) const {
    return mode == EstimatorMode::one_stage ? 0 : resolved_neighborhood_m(config);
}

int EstimatorOptions::scan_neighborhood_n(const SystemConfig& config) const {
    return mode == EstimatorMode::one_stage ? 0 : resolved_neighborhood_n(config);
}

void EstimatorOptions::validate() const {
    if (rotation_count_m < 2 || rotation_count_n < 2)
        throw ConfigError("rotation counts must be >= 2");
    if (!(detection_threshold_factor > 0.0))
        throw ConfigError("detection threshold factor must be positive");
    if (neighborhood_m < kAuto || neighborhood_n < kAuto)
        throw ConfigError("neighborhood half-widths must be nonnegative or auto");
    if (max_paths != kAuto && max_paths < 1)
        throw ConfigError("max_paths must be positive or auto");
}

std::vector<ClusterPeak> detect_clusters(const AngleDelayMap& G,
                                         const EstimatorOptions& opts) {
    opts.validate();
    const int M = G.config.num_antennas;
    const int N = G.config.num_subcarriers;
    const int excl_m = opts.resolved_neighborhood_m(G.config) + 1;
    const int excl_n = opts.resolved_neighborhood_n(G.config) + 1;

    std::vector<double> power(G.data.size());
    for (std::size_t i = 0; i < G.data.size(); ++i)
        power[i] = std::norm(G.data[i]);
    std::vector<char> masked(G.data.size(), 0);
    std::size_t remaining = G.data.size();

    std::vector<ClusterPeak> peaks;
    while (remaining > 0) {
        int best_k = -1, best_l = -1;
        double best = -1.0;
        for (int k = 0; k < M; ++k)
            for (int l = 0; l < N; ++l) {
                std::size_t i = static_cast<std::size_t>(k) * N + l;
                if (!masked[i] && power[i] > best) {
                    best = power[i];
                    best_k = k;
                    best_l = l;
                }
            }

        std::vector<double> rest;
        rest.reserve(remaining);
        for (std::size_t i = 0; i < power.size(); ++i)
            if (!masked[i])
                rest.push_back(power[i]);
        const double med = median(rest);
        if (best < opts.detection_threshold_factor * med || best <= 0.0)
            break;
        // Transform round-off on noiseless on-grid scenes leaves a dust floor
        // ~1e-26 of the peak that still clears a purely relative threshold.
        if (!peaks.empty() && best < 1e-18 * peaks.front().power)
            break;

        peaks.push_back({best_k, best_l, best});
        for (int dk = -excl_m; dk <= excl_m; ++dk)
            for (int dl = -excl_n; dl <= excl_n; ++dl) {
                std::size_t i = static_cast<std::size_t>(mod_index(best_k + dk, M)) * N +
                                mod_index(best_l + dl, N);
                if (!masked[i]) {
                    masked[i] = 1;
                    --remaining;
                }
            }
        if (opts.max_paths != EstimatorOptions::kAuto &&
            static_cast<int>(peaks.size()) >= opts.max_paths)
            break;
    }
    return peaks;
}

SpaceFrequencyResponse conjugate_wideband(const SpaceFrequencyResponse& H,
                                          double angle_hyp) {
    const int M = H.config.num_antennas;
    const int N = H.config.num_subcarriers;
    SpaceFrequencyResponse out(H.config);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
            out.at(m, n) =
                H.at(m, n) * cis_cycles(wideband_cycles(H.config, m, n, angle_hyp));
    return out;
}

Stage1Result stage1_correct_coarse(const SpaceFrequencyResponse& H,
                                   const ClusterPeak& raw_peak,
                                   const EstimatorOptions& opts) {
    opts.validate();
    const int M = H.config.num_antennas;
    const int N = H.config.num_subcarriers;
    const int nbr_m = opts.scan_neighborhood_m(H.config);
    const int nbr_n = opts.scan_neighborhood_n(H.config);

    Stage1Result best;
    best.power = -1.0;
    int best_dist = 0;
    bool have_conjugated_best = false;
    SpaceFrequencyResponse candidate;

    for (int dk = -nbr_m; dk <= nbr_m; ++dk) {
        const int k = mod_index(raw_peak.k + dk, M);
        candidate = conjugate_wideband(H, static_cast<double>(k) / M);
        bool candidate_won = false;
        for (int dl = -nbr_n; dl <= nbr_n; ++dl) {
            const int l = mod_index(raw_peak.l + dl, N);
            const double val = std::norm(project_bin(
                candidate, static_cast<double>(k) / M, static_cast<double>(l) / N));
            const int dist = std::max(mod_bin_dist(k, raw_peak.k, M),
                                      mod_bin_dist(l, raw_peak.l, N));
            const bool better =
                val > best.power ||
                (val == best.power && std::tuple{dist, k, l} <
                                          std::tuple{best_dist, best.k, best.l});
            if (better) {
                best.k = k;
                best.l = l;
                best.power = val;
                best_dist = dist;
                candidate_won = true;
            }
        }
        if (candidate_won) {
            best.conjugated = std::move(candidate);
            have_conjugated_best = true;
        }
    }
    if (!have_conjugated_best) // empty scan window cannot happen, but be safe
        best.conjugated = conjugate_wideband(H, static_cast<double>(best.k) / M);
    return best;
}

RotationOffset stage2_fine_rotation(const SpaceFrequencyResponse& conjugated,
                                    int coarse_k, int coarse_l,
                                    const EstimatorOptions& opts) {
    opts.validate();
    const int M = conjugated.config.num_antennas;
    const int N = conjugated.config.num_subcarriers;
    const int rm = opts.rotation_count_m;
    const int rn = opts.rotation_count_n;

    RotationOffset best;
    double best_val = -1.0;
    for (int r = 0; r < rm; ++r) {
        const double d_angle = -0.5 / M + r * (1.0 / M) / (rm - 1);
        for (int s = 0; s < rn; ++s) {
            const double d_delay = -0.5 / N + s * (1.0 / N) / (rn - 1);
            const double val = std::norm(
                project_bin(conjugated, static_cast<double>(coarse_k) / M + d_angle,
                            static_cast<double>(coarse_l) / N + d_delay));
            const bool better =
                val > best_val ||
                (val == best_val &&
                 std::tuple{std::abs(d_angle), std::abs(d_delay), d_angle, d_delay} <
                     std::tuple{std::abs(best.d_angle), std::abs(best.d_delay),
                                best.d_angle, best.d_delay});
            if (better) {
                best = {d_angle, d_delay};
                best_val = val;
            }
        }
    }
    return best;
}

cplx estimate_coefficient(const SpaceFrequencyResponse& H,
                          const EstimatedSignature& est) {
    const int M = H.config.num_antennas;
    const int N = H.config.num_subcarriers;
    SpaceFrequencyResponse removed =
        conjugate_wideband(H, static_cast<double>(est.coarse_k) / M);
    return project_bin(removed, est.norm_angle, est.norm_delay) /
           std::sqrt(static_cast<double>(M) * N);
}

EstimationReport estimate_scene(const SpaceFrequencyResponse& H,
                                const EstimatorOptions& opts) {
    H.validate();
    opts.validate();
    const int M = H.config.num_antennas;
    const int N = H.config.num_subcarriers;

    const AngleDelayMap G = angle_delay_map(H);
    const std::vector<ClusterPeak> peaks = detect_clusters(G, opts);

    EstimationReport report;
    SpaceFrequencyResponse working = H;
    for (const auto& peak : peaks) {
        const Stage1Result s1 = stage1_correct_coarse(working, peak, opts);
        const RotationOffset off = stage2_fine_rotation(s1.conjugated, s1.k, s1.l, opts);

        EstimatedSignature est;
        est.raw_k = peak.k;
        est.raw_l = peak.l;
        est.coarse_k = s1.k;
        est.coarse_l = s1.l;
        est.norm_angle = wrap_unit(static_cast<double>(s1.k) / M + off.d_angle);
        est.norm_delay = wrap_unit(static_cast<double>(s1.l) / N + off.d_delay);
        est.peak_power = peak.power;
        est.gain = estimate_coefficient(working, est);
        report.paths.push_back(est);

        if (opts.cancellation == Cancellation::successive && std::abs(est.gain) > 0.0) {
            RadioScene single;
            single.paths.push_back({est.norm_angle, est.norm_delay, est.gain});
            const SpaceFrequencyResponse recon = synthesize_response(single, H.config);
            for (std::size_t i = 0; i < working.data.size(); ++i)
                working.data[i] -= recon.data[i];
        }
    }
    return report;
}

} // namespace sigest
