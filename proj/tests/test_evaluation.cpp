#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sigest/common.hpp"
#include "sigest/evaluation.hpp"
#include "sigest/io.hpp"
#include "test_support.hpp"

using namespace sigest;
using namespace sigest::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TrialSpec make_trial(int M, int N, double alpha, int targets, double snr,
                     std::uint64_t seed) {
    TrialSpec spec;
    spec.config = make_config(M, N, alpha);
    spec.num_targets = targets;
    spec.snr_db = snr;
    spec.seed = seed;
    spec.opts.rotation_count_m = spec.opts.rotation_count_n = 9;
    spec.opts.max_paths = targets;
    return spec;
}

} // namespace

TEST_CASE("random_scene basics") {
    auto spec = make_trial(64, 64, 0.1, 1, kInf, 42);
    const auto scene = random_scene(spec);
    REQUIRE(scene.paths.size() == 1);
    CHECK(std::abs(std::abs(scene.paths[0].gain) - 1.0) < 1e-15);
    CHECK(scene.paths[0].norm_angle >= 0.0);
    CHECK(scene.paths[0].norm_angle < 1.0);

    const auto again = random_scene(spec);
    CHECK(again.paths[0].norm_angle == scene.paths[0].norm_angle);
    CHECK(again.paths[0].norm_delay == scene.paths[0].norm_delay);
    CHECK(again.paths[0].gain == scene.paths[0].gain);

    spec.seed = 43;
    const auto different = random_scene(spec);
    CHECK(different.paths[0].norm_angle != scene.paths[0].norm_angle);
}

TEST_CASE("random_scene enforces the minimum cluster separation") {
    auto spec = make_trial(64, 64, 0.1, 5, kInf, 0);
    const int min_sep = 2 * round_half_up(0.1 * 64) + 1; // 13 bins
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        spec.seed = seed;
        const auto scene = random_scene(spec);
        for (std::size_t i = 0; i < scene.paths.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) {
                const double dk =
                    circ_dist(scene.paths[i].norm_angle, scene.paths[j].norm_angle) * 64;
                const double dl =
                    circ_dist(scene.paths[i].norm_delay, scene.paths[j].norm_delay) * 64;
                CHECK(std::max(dk, dl) >= min_sep);
            }
    }
}

TEST_CASE("random_scene angle marginal stays uniform under rejection") {
    auto spec = make_trial(64, 64, 0.1, 5, kInf, 0);
    double sum = 0.0;
    long count = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        spec.seed = seed;
        for (const auto& p : random_scene(spec).paths) {
            sum += p.norm_angle;
            ++count;
        }
    }
    CHECK(std::abs(sum / count - 0.5) < 0.01);
}

TEST_CASE("random_scene reports rejection failure") {
    // 16 bins with a 2*round(0.3*16)+1 = 11-bin Chebyshev separation cannot
    // host 10 targets.
    auto spec = make_trial(16, 16, 0.3, 10, kInf, 7);
    CHECK_THROWS_AS(random_scene(spec), ConfigError);
}

TEST_CASE("match_and_score on an exact report") {
    const auto config = make_config(64, 64, 0.1);
    auto spec = make_trial(64, 64, 0.1, 4, kInf, 5);
    const auto truth = random_scene(spec);
    EstimationReport report;
    for (const auto& p : truth.paths) {
        EstimatedSignature est;
        est.norm_angle = p.norm_angle;
        est.norm_delay = p.norm_delay;
        est.gain = p.gain;
        est.peak_power = 1.0;
        report.paths.push_back(est);
    }
    const auto score = match_and_score(truth, report, config);
    CHECK(score.hits == 4);
    CHECK(score.falses == 0);
    CHECK(score.misses == 0);
    CHECK(score.rmse_angle_rad == 0.0);
    CHECK(score.rmse_delay_s == 0.0);
    CHECK(score.rmse_gain == 0.0);
}

TEST_CASE("match_and_score on an empty report") {
    const auto config = make_config(64, 64, 0.1);
    auto spec = make_trial(64, 64, 0.1, 3, kInf, 6);
    const auto truth = random_scene(spec);
    const auto score = match_and_score(truth, {}, config);
    CHECK(score.hits == 0);
    CHECK(score.misses == 3);
    CHECK(score.falses == 0);
    CHECK(std::isnan(score.rmse_angle_rad));
}

TEST_CASE("an estimate outside the bin resolution is a false alarm") {
    const auto config = make_config(64, 64, 0.1);
    RadioScene truth;
    truth.paths.push_back({0.25, 0.5, {1.0, 0.0}});
    EstimationReport report;
    EstimatedSignature est;
    est.norm_angle = 0.25 + 1.5 / 64; // angle off by 1.5 bins
    est.norm_delay = 0.5;
    est.peak_power = 1.0;
    report.paths.push_back(est);
    const auto score = match_and_score(truth, report, config);
    CHECK(score.hits == 0);
    CHECK(score.falses == 1);
    CHECK(score.misses == 1);
}

TEST_CASE("scoring is symmetric under path reordering") {
    const auto config = make_config(64, 64, 0.1);
    auto spec = make_trial(64, 64, 0.1, 4, kInf, 11);
    const auto truth = random_scene(spec);
    EstimationReport report;
    Rng rng(3);
    for (const auto& p : truth.paths) {
        EstimatedSignature est;
        est.norm_angle = wrap_unit(p.norm_angle + (rng.uniform() - 0.5) * 0.8 / 64);
        est.norm_delay = wrap_unit(p.norm_delay + (rng.uniform() - 0.5) * 0.8 / 64);
        est.gain = p.gain;
        est.peak_power = 1.0 + rng.uniform();
        report.paths.push_back(est);
    }
    const auto base = match_and_score(truth, report, config);

    RadioScene truth_shuffled = truth;
    std::reverse(truth_shuffled.paths.begin(), truth_shuffled.paths.end());
    EstimationReport report_shuffled = report;
    std::reverse(report_shuffled.paths.begin(), report_shuffled.paths.end());
    const auto shuffled = match_and_score(truth_shuffled, report_shuffled, config);

    CHECK(base.hits == shuffled.hits);
    CHECK(base.falses == shuffled.falses);
    CHECK(base.rmse_angle_norm == doctest::Approx(shuffled.rmse_angle_norm).epsilon(1e-12));
    CHECK(base.rmse_gain == doctest::Approx(shuffled.rmse_gain).epsilon(1e-12));
}

TEST_CASE("an absurd threshold produces no detections and no falses") {
    auto spec = make_trial(64, 64, 0.1, 3, 20.0, 17);
    spec.opts.detection_threshold_factor = 1e15;
    spec.opts.max_paths = EstimatorOptions::kAuto;
    const auto score = run_single_trial(spec);
    CHECK(score.hits == 0);
    CHECK(score.falses == 0);
    CHECK(score.misses == 3);
}

TEST_CASE("a noiseless trial scores a perfect hit rate") {
    std::vector<TrialSpec> grid{make_trial(64, 64, 0.1, 3, kInf, 2)};
    const auto rows = run_trials(grid, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].trials == 1);
    CHECK(rows[0].hit_rate == 1.0);
    CHECK(rows[0].false_rate == 0.0);
}

TEST_CASE("run_trials aggregates independently of parallelism") {
    std::vector<TrialSpec> grid;
    for (int t = 0; t < 6; ++t) {
        auto spec = make_trial(32, 32, 0.1, 2, 15.0, splitmix64(99 ^ t));
        grid.push_back(spec);
        spec.opts.mode = EstimatorMode::one_stage;
        grid.push_back(spec);
    }
    const auto seq = run_trials(grid, 1);
    const auto par = run_trials(grid, 4);
    REQUIRE(seq.size() == par.size());

    std::ostringstream a, b;
    write_sweep_csv(a, seq, grid[0].config);
    write_sweep_csv(b, par, grid[0].config);
    CHECK(a.str() == b.str());
}

TEST_CASE("two-stage and one-stage agree per seed at alpha 0.01") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto two = make_trial(64, 64, 0.01, 5, 20.0, splitmix64(1234 ^ seed));
        auto one = two;
        one.opts.mode = EstimatorMode::one_stage;
        const auto st = run_single_trial(two);
        const auto so = run_single_trial(one);
        CHECK(st.hits == so.hits);
        CHECK(st.falses == so.falses);
    }
}
