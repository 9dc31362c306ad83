#include <doctest.h>

#include <cmath>

#include "sigest/channel_model.hpp"
#include "sigest/common.hpp"
#include "sigest/spectrum.hpp"
#include "test_support.hpp"

using namespace sigest;
using namespace sigest::testing;

TEST_CASE("map of zeros is zero") {
    SpaceFrequencyResponse H(make_config(6, 9, 0.0));
    const auto G = angle_delay_map(H);
    for (const auto& v : G.data)
        CHECK(v == cplx{0.0, 0.0});
}

TEST_CASE("on-grid narrowband path maps to a single delta") {
    const auto config = make_config(128, 128, 0.0);
    const auto H = synthesize_response(single_path(35.0 / 128, 15.0 / 128), config);
    const auto G = angle_delay_map(H);
    const double expected_peak = std::sqrt(128.0 * 128.0);
    CHECK(std::abs(G.at(35, 15)) == doctest::Approx(expected_peak).epsilon(1e-10));
    for (int k = 0; k < 128; ++k)
        for (int l = 0; l < 128; ++l)
            if (k != 35 || l != 15)
                CHECK(std::abs(G.at(k, l)) < 1e-9);
}

TEST_CASE("fast transform equals the direct double sum") {
    for (auto [M, N] : {std::pair{8, 8}, std::pair{5, 7}, std::pair{12, 6}}) {
        const auto H = random_response(make_config(M, N, 0.0), 100 + M + N);
        const auto fast = angle_delay_map(H);
        const auto direct = direct_map(H);
        for (std::size_t i = 0; i < fast.data.size(); ++i)
            CHECK(rel_err(fast.data[i], direct.data[i]) < 1e-10);
    }
}

TEST_CASE("transform is unitary") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto H = random_response(make_config(24, 36, 0.0), seed);
        const auto G = angle_delay_map(H);
        CHECK(G.frobenius_norm() ==
              doctest::Approx(H.frobenius_norm()).epsilon(1e-10));
    }
}

TEST_CASE("project_bin matches the map at integer bins") {
    const auto H = random_response(make_config(9, 11, 0.0), 55);
    const auto G = angle_delay_map(H);
    for (int k = 0; k < 9; ++k)
        for (int l = 0; l < 11; ++l)
            CHECK(rel_err(project_bin(H, k / 9.0, l / 11.0), G.at(k, l)) < 1e-10);
}

TEST_CASE("dirichlet kernel values") {
    CHECK(dirichlet(7, 0.0) == cplx{7.0, 0.0});
    CHECK(dirichlet(128, 3.0) == cplx{128.0, 0.0}); // periodic singularity
    CHECK(std::abs(dirichlet(128, 1.0 / 128)) < 1e-9); // first kernel zero

    // Geometric-sum oracle: D_Q(x) = sum_m e^{-j2pi x m}.
    auto geometric = [](int Q, double x) {
        cplx s{0.0, 0.0};
        for (int m = 0; m < Q; ++m)
            s += cis_cycles(-x * m);
        return s;
    };
    CHECK(std::abs(std::abs(dirichlet(8, 0.07)) - std::abs(geometric(8, 0.07))) <
          1e-12);
    Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const int Q = 2 + static_cast<int>(rng.uniform() * 30);
        const double x = 4.0 * rng.uniform() - 2.0;
        CHECK(std::abs(dirichlet(Q, x) - geometric(Q, x)) < 1e-12 * Q);
    }
}

TEST_CASE("dirichlet kernel is 1-periodic") {
    for (double x : {0.013, 0.37, 0.499}) {
        CHECK(std::abs(dirichlet(16, x) - dirichlet(16, x + 1.0)) < 1e-11);
        CHECK(std::abs(dirichlet(16, x) - dirichlet(16, x - 2.0)) < 1e-11);
    }
}

TEST_CASE("narrowband leakage closed form") {
    const auto config = make_config(128, 128, 0.0);

    SUBCASE("integer-bin path") {
        const auto scene = single_path(35.0 / 128, 15.0 / 128, {0.5, -0.25});
        const cplx at_peak = predict_leakage_narrowband(scene, config, 35, 15);
        CHECK(rel_err(at_peak, cplx{0.5, -0.25} * 128.0) < 1e-12);
        CHECK(std::abs(predict_leakage_narrowband(scene, config, 36, 15)) < 1e-9);
        CHECK(std::abs(predict_leakage_narrowband(scene, config, 35, 99)) < 1e-9);
    }

    SUBCASE("fractional path matches the transform at sampled bins") {
        const auto scene = single_path(35.25 / 128, 15.25 / 128);
        const auto G = angle_delay_map(synthesize_response(scene, config));
        for (auto [k, l] : {std::pair{35, 15}, std::pair{36, 16}, std::pair{0, 0},
                            std::pair{100, 42}})
            CHECK(rel_err(predict_leakage_narrowband(scene, config, k, l),
                          G.at(k, l)) < 1e-9);
    }

    SUBCASE("full-map equivalence on a random small scene") {
        const auto small = make_config(16, 16, 0.0);
        Rng rng(77);
        RadioScene scene;
        for (int i = 0; i < 3; ++i)
            scene.paths.push_back({rng.uniform(), rng.uniform(),
                                   {2 * rng.uniform() - 1, 2 * rng.uniform() - 1}});
        const auto G = angle_delay_map(synthesize_response(scene, small));
        for (int k = 0; k < 16; ++k)
            for (int l = 0; l < 16; ++l)
                CHECK(rel_err(predict_leakage_narrowband(scene, small, k, l),
                              G.at(k, l)) < 1e-9);
    }

    SUBCASE("wideband input is rejected") {
        CHECK_THROWS_AS(predict_leakage_narrowband(single_path(0.1, 0.1),
                                                   make_config(16, 16, 0.1), 0, 0),
                        ConfigError);
    }
}

TEST_CASE("predicted squint spread") {
    CHECK(predicted_spread_bins(0.73, make_config(128, 128, 0.0)) == 0);
    CHECK(predicted_spread_bins(0.0, make_config(128, 128, 0.2)) == 0);
    CHECK(predicted_spread_bins(80.25 / 128, make_config(128, 128, 0.1)) == 8);
    CHECK(predicted_spread_bins(80.25 / 128, make_config(128, 128, 0.01)) == 1);
    CHECK_THROWS_AS(predicted_spread_bins(1.5, make_config(128, 128, 0.1)),
                    ConfigError);
}

TEST_CASE("rotation with zero offset is the identity") {
    const auto H = random_response(make_config(8, 8, 0.0), 4);
    const auto rot = rotate_response(H, {0.0, 0.0});
    for (std::size_t i = 0; i < H.data.size(); ++i)
        CHECK(rel_err(rot.data[i], H.data[i]) < 1e-15);
}

TEST_CASE("rotation preserves the Frobenius norm") {
    const auto H = random_response(make_config(13, 21, 0.0), 9);
    const auto rot = rotate_response(H, {0.371 / 13, -0.442 / 21});
    CHECK(rot.frobenius_norm() == doctest::Approx(H.frobenius_norm()).epsilon(1e-12));
}

TEST_CASE("optimal rotation concentrates a narrowband path onto its bin") {
    const auto config = make_config(64, 64, 0.0);
    const double phi = (20.0 + 0.37) / 64;
    const double tau = (30.0 + 0.81) / 64;
    const cplx gain{0.7, -0.3};
    const auto H = synthesize_response(single_path(phi, tau, gain), config);

    // Offset equal to the fractional part: tone lands exactly on bin (20, 31)
    // only for its own fraction, so aim at the nearest bin per axis.
    const int k = 20, l = 31;
    const RotationOffset off{phi - static_cast<double>(k) / 64,
                             tau - static_cast<double>(l) / 64};
    const auto G = angle_delay_map(rotate_response(H, off));

    const double expected_peak = 64.0 * std::abs(gain);
    CHECK(std::abs(G.at(k, l)) == doctest::Approx(expected_peak).epsilon(1e-10));
    double off_peak = 0.0;
    for (int a = 0; a < 64; ++a)
        for (int b = 0; b < 64; ++b)
            if (a != k || b != l)
                off_peak += std::norm(G.at(a, b));
    CHECK(off_peak <= 1e-12 * std::norm(G.at(k, l)));
}
