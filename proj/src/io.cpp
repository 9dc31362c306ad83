#include "sigest/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sigest/channel_model.hpp"
#include "sigest/common.hpp"

namespace sigest {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

namespace {

double parse_double(const std::string& s) {
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size())
            throw IoError("trailing characters in number: " + s);
        return v;
    } catch (const std::exception&) {
        throw IoError("cannot parse number: " + s);
    }
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw IoError("malformed JSON in " + path);
    return j;
}

SystemConfig config_from_json(const json& j, SystemConfig base = {}) {
    if (j.contains("M"))
        base.num_antennas = j.at("M").get<int>();
    if (j.contains("N"))
        base.num_subcarriers = j.at("N").get<int>();
    if (j.contains("alpha"))
        base.alpha = j.at("alpha").get<double>();
    if (j.contains("fc_hz"))
        base.carrier_freq_hz = j.at("fc_hz").get<double>();
    if (j.contains("d_over_lambda"))
        base.d_over_lambda = j.at("d_over_lambda").get<double>();
    return base;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep))
        out.push_back(field);
    return out;
}

} // namespace

SceneFile load_scene_file(const std::string& path) {
    json j = load_json(path);
    SceneFile file;
    if (j.contains("config"))
        file.config = config_from_json(j.at("config"));
    if (!j.contains("paths") || !j.at("paths").is_array())
        throw IoError("scene file needs a \"paths\" array: " + path);

    for (const auto& p : j.at("paths")) {
        SceneEntry entry;
        entry.gain = {p.value("gain_re", 1.0), p.value("gain_im", 0.0)};
        if (p.contains("norm_angle") && p.contains("norm_delay")) {
            entry.angle = p.at("norm_angle").get<double>();
            entry.delay = p.at("norm_delay").get<double>();
        } else if (p.contains("angle_deg") && p.contains("delay_s")) {
            entry.physical = true;
            entry.angle = p.at("angle_deg").get<double>();
            entry.delay = p.at("delay_s").get<double>();
        } else {
            throw IoError("each path needs norm_angle/norm_delay or "
                          "angle_deg/delay_s: " + path);
        }
        file.entries.push_back(entry);
    }
    return file;
}

RadioScene resolve_scene(const SceneFile& file, const SystemConfig& config) {
    RadioScene out;
    for (const auto& e : file.entries) {
        if (e.physical) {
            auto [phi, tau] = normalize_signature(e.angle, e.delay, config);
            out.paths.push_back({phi, tau, e.gain});
        } else {
            out.paths.push_back({e.angle, e.delay, e.gain});
        }
    }
    return out;
}

void write_config_header(std::ostream& os, const SystemConfig& config,
                         const std::vector<std::pair<std::string, std::string>>& extra) {
    os << "# M=" << config.num_antennas << "\n";
    os << "# N=" << config.num_subcarriers << "\n";
    os << "# alpha=" << format_double(config.alpha) << "\n";
    os << "# fc_hz=" << format_double(config.carrier_freq_hz) << "\n";
    os << "# d_over_lambda=" << format_double(config.d_over_lambda) << "\n";
    for (const auto& [key, value] : extra)
        os << "# " << key << "=" << value << "\n";
}

void write_response_csv(std::ostream& os, const SpaceFrequencyResponse& H,
                        const std::vector<std::pair<std::string, std::string>>& extra) {
    write_config_header(os, H.config, extra);
    os << "m,n,re,im\n";
    for (int m = 0; m < H.config.num_antennas; ++m)
        for (int n = 0; n < H.config.num_subcarriers; ++n) {
            const cplx v = H.at(m, n);
            os << m << ',' << n << ',' << format_double(v.real()) << ','
               << format_double(v.imag()) << "\n";
        }
}

SpaceFrequencyResponse read_response_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);

    SystemConfig config;
    std::string line;
    bool saw_header = false;
    SpaceFrequencyResponse H;
    bool allocated = false;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = line.substr(eq + 1);
            if (key == "M")
                config.num_antennas = static_cast<int>(parse_double(value));
            else if (key == "N")
                config.num_subcarriers = static_cast<int>(parse_double(value));
            else if (key == "alpha")
                config.alpha = parse_double(value);
            else if (key == "fc_hz")
                config.carrier_freq_hz = parse_double(value);
            else if (key == "d_over_lambda")
                config.d_over_lambda = parse_double(value);
            continue;
        }
        if (!saw_header) { // the m,n,re,im column row
            saw_header = true;
            continue;
        }
        if (!allocated) {
            config.validate();
            H = SpaceFrequencyResponse(config);
            allocated = true;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw IoError("bad row in " + path + ": " + line);
        const int m = static_cast<int>(parse_double(fields[0]));
        const int n = static_cast<int>(parse_double(fields[1]));
        if (m < 0 || m >= config.num_antennas || n < 0 || n >= config.num_subcarriers)
            throw IoError("row index out of range in " + path + ": " + line);
        H.at(m, n) = {parse_double(fields[2]), parse_double(fields[3])};
    }
    if (!allocated)
        throw IoError("no data rows in " + path);
    return H;
}

void write_map_csv(std::ostream& os, const AngleDelayMap& G, bool magnitude_only,
                   const std::vector<std::pair<std::string, std::string>>& extra) {
    write_config_header(os, G.config, extra);
    os << (magnitude_only ? "k,l,mag_db\n" : "k,l,re,im\n");
    for (int k = 0; k < G.config.num_antennas; ++k)
        for (int l = 0; l < G.config.num_subcarriers; ++l) {
            const cplx v = G.at(k, l);
            if (magnitude_only) {
                const double mag = std::abs(v);
                os << k << ',' << l << ','
                   << format_double(20.0 * std::log10(mag)) << "\n";
            } else {
                os << k << ',' << l << ',' << format_double(v.real()) << ','
                   << format_double(v.imag()) << "\n";
            }
        }
}

void write_report_csv(std::ostream& os, const EstimationReport& report,
                      const SystemConfig& config,
                      const std::vector<std::pair<std::string, std::string>>& extra) {
    write_config_header(os, config, extra);
    os << "path_idx,k_raw,l_raw,k_corr,l_corr,phi_norm,tau_norm,gain_re,gain_im,"
          "peak_power\n";
    for (std::size_t i = 0; i < report.paths.size(); ++i) {
        const auto& p = report.paths[i];
        os << i << ',' << p.raw_k << ',' << p.raw_l << ',' << p.coarse_k << ','
           << p.coarse_l << ',' << format_double(p.norm_angle) << ','
           << format_double(p.norm_delay) << ',' << format_double(p.gain.real())
           << ',' << format_double(p.gain.imag()) << ','
           << format_double(p.peak_power) << "\n";
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const SystemConfig& config,
                     const std::vector<std::pair<std::string, std::string>>& extra) {
    write_config_header(os, config, extra);
    os << "alpha,K,snr_db,mode,trials,hit_rate,false_rate,rmse_angle_rad,"
          "rmse_delay_s,rmse_gain\n";
    for (const auto& r : rows) {
        os << format_double(r.alpha) << ',' << r.num_targets << ','
           << format_double(r.snr_db) << ',' << mode_name(r.mode) << ','
           << r.trials << ',' << format_double(r.hit_rate) << ','
           << format_double(r.false_rate) << ','
           << format_double(r.rmse_angle_rad) << ','
           << format_double(r.rmse_delay_s) << ','
           << format_double(r.rmse_gain) << "\n";
    }
}

const char* mode_name(EstimatorMode mode) {
    return mode == EstimatorMode::two_stage ? "two-stage" : "one-stage";
}

EstimatorMode parse_mode(const std::string& name) {
    if (name == "two-stage" || name == "two_stage")
        return EstimatorMode::two_stage;
    if (name == "one-stage" || name == "one_stage")
        return EstimatorMode::one_stage;
    throw ConfigError("unknown mode: " + name + " (expected two-stage or one-stage)");
}

namespace {

double snr_from_json(const json& v) {
    if (v.is_string())
        return parse_double(v.get<std::string>());
    return v.get<double>();
}

} // namespace

SweepSpec load_sweep_file(const std::string& path) {
    json j = load_json(path);
    SweepSpec sweep;
    if (j.contains("config"))
        sweep.base_config = config_from_json(j.at("config"));

    auto read_axis = [&](const char* key, auto& out, auto convert) {
        if (!j.contains(key))
            return;
        for (const auto& v : j.at(key))
            out.push_back(convert(v));
    };
    read_axis("alpha", sweep.alphas, [](const json& v) { return v.get<double>(); });
    read_axis("targets", sweep.targets, [](const json& v) { return v.get<int>(); });
    read_axis("snr_db", sweep.snrs_db, snr_from_json);
    read_axis("mode", sweep.modes,
              [](const json& v) { return parse_mode(v.get<std::string>()); });
    if (sweep.alphas.empty())
        sweep.alphas.push_back(sweep.base_config.alpha);
    if (sweep.targets.empty())
        sweep.targets.push_back(5);
    if (sweep.snrs_db.empty())
        sweep.snrs_db.push_back(std::numeric_limits<double>::infinity());
    if (sweep.modes.empty())
        sweep.modes.push_back(EstimatorMode::two_stage);

    sweep.trials = j.value("trials", 50);
    sweep.seed = j.value("seed", std::uint64_t{0});
    sweep.enforce_separation = j.value("enforce_separation", true);

    if (j.contains("estimator")) {
        const json& e = j.at("estimator");
        sweep.opts.rotation_count_m = e.value("rot_m", sweep.opts.rotation_count_m);
        sweep.opts.rotation_count_n = e.value("rot_n", sweep.opts.rotation_count_n);
        sweep.opts.neighborhood_m = e.value("nbr_m", sweep.opts.neighborhood_m);
        sweep.opts.neighborhood_n = e.value("nbr_n", sweep.opts.neighborhood_n);
        sweep.opts.detection_threshold_factor =
            e.value("gamma", sweep.opts.detection_threshold_factor);
        if (e.contains("cancellation"))
            sweep.opts.cancellation =
                e.at("cancellation").get<std::string>() == "successive"
                    ? Cancellation::successive
                    : Cancellation::none;
        if (e.contains("max_paths")) {
            const json& mp = e.at("max_paths");
            if (mp.is_string()) {
                const std::string s = mp.get<std::string>();
                if (s == "targets")
                    sweep.max_paths_from_targets = true;
                else if (s == "auto")
                    sweep.max_paths_from_targets = false;
                else
                    throw IoError("max_paths must be an integer, \"auto\" or "
                                  "\"targets\"");
            } else {
                sweep.max_paths_from_targets = false;
                sweep.opts.max_paths = mp.get<int>();
            }
        }
    }
    if (sweep.trials < 1)
        throw ConfigError("sweep needs at least one trial");
    return sweep;
}

std::vector<TrialSpec> expand_sweep(const SweepSpec& sweep) {
    std::vector<TrialSpec> specs;
    for (double alpha : sweep.alphas)
        for (int targets : sweep.targets)
            for (double snr : sweep.snrs_db)
                for (EstimatorMode mode : sweep.modes)
                    for (int t = 0; t < sweep.trials; ++t) {
                        TrialSpec spec;
                        spec.config = sweep.base_config;
                        spec.config.alpha = alpha;
                        spec.num_targets = targets;
                        spec.snr_db = snr;
                        spec.seed = splitmix64(sweep.seed ^ static_cast<std::uint64_t>(t));
                        spec.opts = sweep.opts;
                        spec.opts.mode = mode;
                        if (sweep.max_paths_from_targets)
                            spec.opts.max_paths = targets;
                        spec.enforce_separation = sweep.enforce_separation;
                        specs.push_back(spec);
                    }
    return specs;
}

} // namespace sigest
