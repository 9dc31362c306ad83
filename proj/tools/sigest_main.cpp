// sigest: synthesize spatial-wideband MIMO-OFDM channel responses, inspect
// their angle-delay spectra, and run the two-stage rotation signature
// estimator and its Monte Carlo harness from the command line.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "sigest/channel_model.hpp"
#include "sigest/estimator.hpp"
#include "sigest/evaluation.hpp"
#include "sigest/io.hpp"
#include "sigest/spectrum.hpp"

namespace {

using namespace sigest;

struct ConfigFlags {
    std::optional<int> M, N;
    std::optional<double> alpha, fc_hz, d_over_lambda;

    void attach(CLI::App* cmd) {
        cmd->add_option("--M", M, "number of antennas");
        cmd->add_option("--N", N, "number of subcarriers");
        cmd->add_option("--alpha", alpha, "bandwidth selection parameter, f_s = alpha*f_c");
        cmd->add_option("--fc", fc_hz, "carrier frequency [Hz]");
        cmd->add_option("--d-over-lambda", d_over_lambda, "element spacing in wavelengths");
    }

    SystemConfig apply(SystemConfig base) const {
        if (M) base.num_antennas = *M;
        if (N) base.num_subcarriers = *N;
        if (alpha) base.alpha = *alpha;
        if (fc_hz) base.carrier_freq_hz = *fc_hz;
        if (d_over_lambda) base.d_over_lambda = *d_over_lambda;
        return base;
    }
};

struct EstimatorFlags {
    int rot_m = 16, rot_n = 16;
    std::optional<int> nbr, nbr_n;
    int max_paths = EstimatorOptions::kAuto;
    double gamma = 12.0;
    std::string mode = "two-stage";
    bool successive = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--rot-m", rot_m, "rotation grid points per angle axis (R_M)");
        cmd->add_option("--rot-n", rot_n, "rotation grid points per delay axis (R_N)");
        cmd->add_option("--nbr", nbr, "stage-1 neighborhood half-width (default: auto)");
        cmd->add_option("--nbr-n", nbr_n, "delay-axis half-width when different from --nbr");
        cmd->add_option("--gamma", gamma, "detection threshold factor vs median power");
        cmd->add_option("--max-paths", max_paths, "detection budget (-1 = threshold only)");
        cmd->add_option("--mode", mode, "two-stage | one-stage");
        cmd->add_flag("--successive", successive, "subtract each estimated path before the next");
    }

    EstimatorOptions to_options() const {
        EstimatorOptions opts;
        opts.rotation_count_m = rot_m;
        opts.rotation_count_n = rot_n;
        opts.neighborhood_m = nbr.value_or(EstimatorOptions::kAuto);
        opts.neighborhood_n = nbr_n ? *nbr_n : opts.neighborhood_m;
        opts.max_paths = max_paths;
        opts.detection_threshold_factor = gamma;
        opts.mode = parse_mode(mode);
        opts.cancellation = successive ? Cancellation::successive : Cancellation::none;
        return opts;
    }
};

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    return out;
}

std::vector<std::pair<std::string, std::string>> seed_snr_header(std::uint64_t seed,
                                                                 double snr_db) {
    return {{"seed", std::to_string(seed)}, {"snr_db", format_double(snr_db)}};
}

SpaceFrequencyResponse synth_from_scene(const std::string& scene_path,
                                        const ConfigFlags& flags, double snr_db,
                                        std::uint64_t seed, SystemConfig* out_config) {
    const SceneFile file = load_scene_file(scene_path);
    SystemConfig config = flags.apply(file.config.value_or(SystemConfig{}));
    config.validate();
    const RadioScene scene = resolve_scene(file, config);
    SpaceFrequencyResponse H = synthesize_response(scene, config);
    if (snr_db != std::numeric_limits<double>::infinity())
        H = add_noise(H, snr_db, seed);
    *out_config = config;
    return H;
}

int run(int argc, char** argv) {
    CLI::App app{"spatial-wideband angle/delay signature estimation toolkit"};
    app.require_subcommand(1);

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "synthesize a space-frequency response CSV");
    std::string synth_scene, synth_out;
    double synth_snr = std::numeric_limits<double>::infinity();
    std::uint64_t synth_seed = 0;
    ConfigFlags synth_cfg;
    synth->add_option("--scene", synth_scene, "scene JSON file")->required();
    synth->add_option("--out", synth_out, "output CSV path")->required();
    synth->add_option("--snr", synth_snr, "SNR in dB (default: noiseless)");
    synth->add_option("--seed", synth_seed, "noise seed");
    synth_cfg.attach(synth);

    // --- spectrum ---
    auto* spectrum = app.add_subcommand("spectrum", "angle-delay map of a response CSV");
    std::string spec_in, spec_out;
    bool spec_mag = false;
    spectrum->add_option("--in", spec_in, "input response CSV")->required();
    spectrum->add_option("--out", spec_out, "output CSV path")->required();
    spectrum->add_flag("--mag-db", spec_mag, "emit k,l,mag_db instead of k,l,re,im");

    // --- estimate ---
    auto* estimate = app.add_subcommand("estimate", "run the signature estimator");
    std::string est_in, est_scene, est_out;
    double est_snr = std::numeric_limits<double>::infinity();
    std::uint64_t est_seed = 0;
    ConfigFlags est_cfg;
    EstimatorFlags est_flags;
    estimate->add_option("--in", est_in, "input response CSV");
    estimate->add_option("--scene", est_scene, "scene JSON to synthesize instead of --in");
    estimate->add_option("--out", est_out, "output report CSV")->required();
    estimate->add_option("--snr", est_snr, "SNR in dB when synthesizing from --scene");
    estimate->add_option("--seed", est_seed, "noise seed");
    est_cfg.attach(estimate);
    est_flags.attach(estimate);

    // --- table1 ---
    auto* table1 = app.add_subcommand(
        "table1", "raw peak bins vs bandwidth for the (80.25/128, 88.50/128) path");
    std::vector<double> table1_alphas{0.01, 0.05, 0.1, 0.2};
    std::string table1_out;
    table1->add_option("--alpha-list", table1_alphas, "alpha values to evaluate");
    table1->add_option("--out", table1_out, "output CSV path")->required();

    // --- sweep ---
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo parameter sweep");
    std::string sweep_in, sweep_out;
    int sweep_jobs = 1;
    sweep->add_option("--in", sweep_in, "sweep definition JSON")->required();
    sweep->add_option("--out", sweep_out, "output aggregate CSV")->required();
    sweep->add_option("--jobs", sweep_jobs, "trial-level parallelism");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the usage message
        return 2;    // flag misuse is a configuration error
    }

    if (synth->parsed()) {
        SystemConfig config;
        const SpaceFrequencyResponse H =
            synth_from_scene(synth_scene, synth_cfg, synth_snr, synth_seed, &config);
        auto out = open_output(synth_out);
        write_response_csv(out, H, seed_snr_header(synth_seed, synth_snr));
    } else if (spectrum->parsed()) {
        const SpaceFrequencyResponse H = read_response_csv(spec_in);
        const AngleDelayMap G = angle_delay_map(H);
        auto out = open_output(spec_out);
        write_map_csv(out, G, spec_mag);
        int best_k = 0, best_l = 0;
        double best = -1.0;
        for (int k = 0; k < G.config.num_antennas; ++k)
            for (int l = 0; l < G.config.num_subcarriers; ++l)
                if (std::norm(G.at(k, l)) > best) {
                    best = std::norm(G.at(k, l));
                    best_k = k;
                    best_l = l;
                }
        std::cout << "peak_bin " << best_k << " " << best_l << "\n";
    } else if (estimate->parsed()) {
        if (est_in.empty() == est_scene.empty())
            throw ConfigError("estimate needs exactly one of --in or --scene");
        SystemConfig config;
        SpaceFrequencyResponse H;
        if (!est_in.empty()) {
            H = read_response_csv(est_in);
            H.config = est_cfg.apply(H.config);
            H.config.validate();
            config = H.config;
        } else {
            H = synth_from_scene(est_scene, est_cfg, est_snr, est_seed, &config);
        }
        const EstimatorOptions opts = est_flags.to_options();
        const EstimationReport report = estimate_scene(H, opts);
        auto out = open_output(est_out);
        write_report_csv(out, report, config,
                         {{"seed", std::to_string(est_seed)},
                          {"snr_db", format_double(est_snr)},
                          {"mode", mode_name(opts.mode)}});
    } else if (table1->parsed()) {
        auto out = open_output(table1_out);
        SystemConfig config; // 128 x 128 reference geometry
        config.num_antennas = config.num_subcarriers = 128;
        RadioScene scene;
        scene.paths.push_back({80.25 / 128.0, 88.50 / 128.0, {1.0, 0.0}});
        write_config_header(out, config);
        out << "alpha,angle_bin,delay_bin\n";
        for (double alpha : table1_alphas) {
            config.alpha = alpha;
            config.validate();
            const AngleDelayMap G = angle_delay_map(synthesize_response(scene, config));
            int best_k = 0, best_l = 0;
            double best = -1.0;
            for (int k = 0; k < config.num_antennas; ++k)
                for (int l = 0; l < config.num_subcarriers; ++l)
                    if (std::norm(G.at(k, l)) > best) {
                        best = std::norm(G.at(k, l));
                        best_k = k;
                        best_l = l;
                    }
            out << format_double(alpha) << ',' << best_k << ',' << best_l << "\n";
        }
    } else if (sweep->parsed()) {
        const SweepSpec spec = load_sweep_file(sweep_in);
        const std::vector<TrialSpec> trials = expand_sweep(spec);
        const std::vector<SweepRow> rows = run_trials(trials, sweep_jobs);
        auto out = open_output(sweep_out);
        auto join = [](const auto& values, auto render) {
            std::string s;
            for (const auto& v : values) {
                if (!s.empty())
                    s += ' ';
                s += render(v);
            }
            return s;
        };
        write_sweep_csv(
            out, rows, spec.base_config,
            {{"alpha_axis", join(spec.alphas, format_double)},
             {"targets_axis", join(spec.targets, [](int k) { return std::to_string(k); })},
             {"snr_axis", join(spec.snrs_db, format_double)},
             {"mode_axis", join(spec.modes, [](EstimatorMode m) {
                  return std::string(mode_name(m));
              })},
             {"seed", std::to_string(spec.seed)},
             {"trials", std::to_string(spec.trials)}});
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sigest::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const sigest::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
