#include "sigest/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "sigest/channel_model.hpp"
#include "sigest/common.hpp"
#include "sigest/spectrum.hpp"

namespace sigest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int max_spread_bins(const SystemConfig& config) {
    // Worst case over norm_angle in [0, 1).
    return round_half_up(config.alpha * config.num_antennas);
}

} // namespace

RadioScene random_scene(const TrialSpec& spec) {
    spec.config.validate();
    if (spec.num_targets < 1)
        throw ConfigError("num_targets must be >= 1");

    const int M = spec.config.num_antennas;
    const int N = spec.config.num_subcarriers;
    const int min_sep = 2 * max_spread_bins(spec.config) + 1;

    Rng rng(spec.seed);
    RadioScene scene;
    int attempts = 0;
    while (static_cast<int>(scene.paths.size()) < spec.num_targets) {
        if (++attempts > 10000)
            throw ConfigError("scene rejection sampling failed; too many targets "
                              "for the required separation");
        const double phi = rng.uniform();
        const double tau = rng.uniform();
        if (spec.enforce_separation) {
            bool ok = true;
            for (const auto& p : scene.paths) {
                const double dk = circ_dist(phi, p.norm_angle) * M;
                const double dl = circ_dist(tau, p.norm_delay) * N;
                if (std::max(dk, dl) < min_sep) {
                    ok = false;
                    break;
                }
            }
            if (!ok)
                continue;
        }
        const double psi = 2.0 * std::numbers::pi * rng.uniform();
        scene.paths.push_back({phi, tau, std::polar(1.0, psi)});
    }
    return scene;
}

ScoreReport match_and_score(const RadioScene& truth, const EstimationReport& report,
                            const SystemConfig& config) {
    config.validate();
    const int M = config.num_antennas;
    const int N = config.num_subcarriers;

    std::vector<std::size_t> order(report.paths.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.paths[a].peak_power > report.paths[b].peak_power;
    });

    std::vector<char> matched(truth.paths.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (estimate, truth)
    for (std::size_t idx : order) {
        const auto& est = report.paths[idx];
        std::size_t best_truth = truth.paths.size();
        double best_err = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < truth.paths.size(); ++t) {
            if (matched[t])
                continue;
            const double ea = circ_dist(est.norm_angle, truth.paths[t].norm_angle);
            const double ed = circ_dist(est.norm_delay, truth.paths[t].norm_delay);
            if (ea < 1.0 / M && ed < 1.0 / N) {
                const double err = std::max(ea * M, ed * N);
                if (err < best_err) {
                    best_err = err;
                    best_truth = t;
                }
            }
        }
        if (best_truth < truth.paths.size()) {
            matched[best_truth] = 1;
            pairs.emplace_back(idx, best_truth);
        }
    }

    ScoreReport score;
    score.hits = static_cast<int>(pairs.size());
    score.falses = static_cast<int>(report.paths.size()) - score.hits;
    score.misses = static_cast<int>(truth.paths.size()) - score.hits;

    if (pairs.empty()) {
        score.rmse_angle_rad = score.rmse_angle_norm = kNaN;
        score.rmse_delay_s = score.rmse_delay_norm = kNaN;
        score.rmse_gain = kNaN;
        return score;
    }

    double se_angle_rad = 0.0, se_angle_norm = 0.0;
    double se_delay_s = 0.0, se_delay_norm = 0.0, se_gain = 0.0;
    bool physical_ok = config.alpha > 0.0;
    for (const auto& [e, t] : pairs) {
        const auto& est = report.paths[e];
        const auto& tru = truth.paths[t];
        const double ea = wrap_half(est.norm_angle - tru.norm_angle);
        const double ed = wrap_half(est.norm_delay - tru.norm_delay);
        se_angle_norm += ea * ea;
        se_delay_norm += ed * ed;
        se_gain += std::norm(est.gain - tru.gain);
        if (physical_ok) {
            const auto [ae, de] = denormalize_signature(est.norm_angle, est.norm_delay, config);
            const auto [at, dt] = denormalize_signature(tru.norm_angle, tru.norm_delay, config);
            const double da = (ae - at) * std::numbers::pi / 180.0;
            se_angle_rad += da * da;
            se_delay_s += (de - dt) * (de - dt);
        }
    }
    const double inv = 1.0 / static_cast<double>(pairs.size());
    score.rmse_angle_norm = std::sqrt(se_angle_norm * inv);
    score.rmse_delay_norm = std::sqrt(se_delay_norm * inv);
    score.rmse_gain = std::sqrt(se_gain * inv);
    score.rmse_angle_rad = physical_ok ? std::sqrt(se_angle_rad * inv) : kNaN;
    score.rmse_delay_s = physical_ok ? std::sqrt(se_delay_s * inv) : kNaN;
    return score;
}

ScoreReport run_single_trial(const TrialSpec& spec) {
    const RadioScene scene = random_scene(spec);
    SpaceFrequencyResponse H = synthesize_response(scene, spec.config);
    H = add_noise(H, spec.snr_db, splitmix64(spec.seed ^ 0x6E6F697365ULL)); // "noise"
    const EstimationReport report = estimate_scene(H, spec.opts);
    return match_and_score(scene, report, spec.config);
}

std::vector<SweepRow> run_trials(const std::vector<TrialSpec>& specs, int parallelism) {
    if (specs.empty())
        throw ConfigError("empty trial grid");
    if (parallelism < 1)
        parallelism = 1;

    std::vector<ScoreReport> scores(specs.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size())
                return;
            try {
                scores[i] = run_single_trial(specs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                return;
            }
        }
    };

    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < parallelism; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    // Aggregate per cell in first-appearance order; reduction runs in trial
    // order, so the result is independent of which thread ran what.
    struct Cell {
        double alpha;
        int targets;
        double snr_db;
        EstimatorMode mode;
        long hits = 0, falses = 0, detections = 0;
        int trials = 0, trials_with_hits = 0;
        double sum_angle_rad = 0.0, sum_delay_s = 0.0, sum_gain = 0.0;
    };
    std::vector<Cell> cells;
    auto cell_for = [&](const TrialSpec& s) -> Cell& {
        for (auto& c : cells)
            if (c.alpha == s.config.alpha && c.targets == s.num_targets &&
                (c.snr_db == s.snr_db || (std::isinf(c.snr_db) && std::isinf(s.snr_db))) &&
                c.mode == s.opts.mode)
                return c;
        cells.push_back({s.config.alpha, s.num_targets, s.snr_db, s.opts.mode});
        return cells.back();
    };
    for (std::size_t i = 0; i < specs.size(); ++i) {
        Cell& c = cell_for(specs[i]);
        const ScoreReport& r = scores[i];
        c.trials += 1;
        c.hits += r.hits;
        c.falses += r.falses;
        c.detections += r.hits + r.falses;
        if (r.hits > 0) {
            c.trials_with_hits += 1;
            c.sum_angle_rad += r.rmse_angle_rad;
            c.sum_delay_s += r.rmse_delay_s;
            c.sum_gain += r.rmse_gain;
        }
    }

    std::vector<SweepRow> rows;
    rows.reserve(cells.size());
    for (const auto& c : cells) {
        SweepRow row;
        row.alpha = c.alpha;
        row.num_targets = c.targets;
        row.snr_db = c.snr_db;
        row.mode = c.mode;
        row.trials = c.trials;
        row.hit_rate = static_cast<double>(c.hits) /
                       (static_cast<double>(c.targets) * c.trials);
        row.false_rate = c.detections > 0
                             ? static_cast<double>(c.falses) / c.detections
                             : 0.0;
        if (c.trials_with_hits > 0) {
            row.rmse_angle_rad = c.sum_angle_rad / c.trials_with_hits;
            row.rmse_delay_s = c.sum_delay_s / c.trials_with_hits;
            row.rmse_gain = c.sum_gain / c.trials_with_hits;
        } else {
            row.rmse_angle_rad = row.rmse_delay_s = row.rmse_gain = kNaN;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace sigest
