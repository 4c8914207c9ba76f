#include "afc/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace afc {

namespace {

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& v, const std::string& key) {
    std::istringstream in(v);
    std::vector<double> out;
    double x;
    while (in >> x) out.push_back(x);
    if (out.empty()) throw std::invalid_argument("config: key '" + key + "' wants numbers");
    return out;
}

double one_double(const std::string& v, const std::string& key) {
    auto xs = parse_doubles(v, key);
    if (xs.size() != 1) throw std::invalid_argument("config: key '" + key + "' wants one number");
    return xs[0];
}

}  // namespace

double ExperimentConfig::carrier_mhz() const {
    if (carrier_explicit) return pulse.carrier_detuning_mhz;
    return comb_center_mhz + 0.5 * (n_peaks - 1) * delta_mhz;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = strip(line);
        if (t.empty()) continue;
        if (t.front() == '[' && t.back() == ']') {
            section = strip(t.substr(1, t.size() - 2));
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = strip(t.substr(0, eq));
        const std::string value = strip(t.substr(eq + 1));
        cfg.raw[section.empty() ? key : section + "." + key] = value;

        if (section == "scheme") {
            if (key == "ground_spacings_mhz") {
                auto v = parse_doubles(value, key);
                if (v.size() != 2) throw std::invalid_argument("config: ground_spacings_mhz wants 2");
                cfg.scheme.ground_spacings_mhz = {v[0], v[1]};
            } else if (key == "excited_spacings_mhz") {
                auto v = parse_doubles(value, key);
                if (v.size() != 2)
                    throw std::invalid_argument("config: excited_spacings_mhz wants 2");
                cfg.scheme.excited_spacings_mhz = {v[0], v[1]};
            } else if (key == "excited_lifetime_us") {
                cfg.scheme.excited_lifetime_us = one_double(value, key);
            } else if (key == "homogeneous_linewidth_khz") {
                cfg.scheme.homogeneous_linewidth_khz = one_double(value, key);
            } else if (key == "oscillator_strengths") {
                auto v = parse_doubles(value, key);
                if (v.size() != 9)
                    throw std::invalid_argument("config: oscillator_strengths wants 9 (row-major)");
                for (int g = 0; g < 3; ++g)
                    for (int e = 0; e < 3; ++e)
                        cfg.scheme.oscillator_strengths[g][e] = v[3 * g + e];
            } else {
                throw std::invalid_argument("config: unknown scheme key '" + key + "'");
            }
        } else if (section == "grid") {
            if (key == "class_window_mhz") {
                auto v = parse_doubles(value, key);
                if (v.size() != 2) throw std::invalid_argument("config: class_window_mhz wants 2");
                cfg.class_grid.nu_min_mhz = v[0];
                cfg.class_grid.nu_max_mhz = v[1];
            } else if (key == "step_mhz") {
                cfg.class_grid.step_mhz = one_double(value, key);
            } else if (key == "lorentzian_kernel") {
                cfg.lorentzian_kernel = one_double(value, key) != 0.0;
            } else {
                throw std::invalid_argument("config: unknown grid key '" + key + "'");
            }
        } else if (section == "pit") {
            if (key == "sequence") {
                std::filesystem::path p(value);
                cfg.sequence_path =
                    p.is_absolute() ? value : (std::filesystem::path(base_dir) / p).string();
            } else if (key == "d0") {
                cfg.d0 = one_double(value, key);
            } else if (key == "check_window_mhz") {
                auto v = parse_doubles(value, key);
                if (v.size() != 2) throw std::invalid_argument("config: check_window_mhz wants 2");
                cfg.pit_check_lo_mhz = v[0];
                cfg.pit_check_hi_mhz = v[1];
            } else {
                throw std::invalid_argument("config: unknown pit key '" + key + "'");
            }
        } else if (section == "pumping") {
            if (key == "saturation_kappa") cfg.pumping.saturation_kappa = one_double(value, key);
            else if (key == "edge_margin_mhz") cfg.pumping.edge_margin_mhz = one_double(value, key);
            else if (key == "profile_scale") cfg.pumping.profile_scale = one_double(value, key);
            else if (key == "burnback_order") cfg.pumping.burnback_order = one_double(value, key);
            else if (key == "background_per_power")
                cfg.pumping.background_per_power = one_double(value, key);
            else throw std::invalid_argument("config: unknown pumping key '" + key + "'");
        } else if (section == "comb") {
            if (key == "n_peaks") cfg.n_peaks = static_cast<int>(one_double(value, key));
            else if (key == "delta_mhz") cfg.delta_mhz = one_double(value, key);
            else if (key == "chirp_width_khz") cfg.chirp_width_khz = one_double(value, key);
            else if (key == "power") cfg.power = one_double(value, key);
            else if (key == "center_mhz") cfg.comb_center_mhz = one_double(value, key);
            else throw std::invalid_argument("config: unknown comb key '" + key + "'");
        } else if (section == "pulse") {
            if (key == "fwhm_ns") cfg.pulse.fwhm_duration_ns = one_double(value, key);
            else if (key == "carrier_mhz") {
                cfg.pulse.carrier_detuning_mhz = one_double(value, key);
                cfg.carrier_explicit = true;
            } else if (key == "amplitude") cfg.pulse.amplitude = one_double(value, key);
            else throw std::invalid_argument("config: unknown pulse key '" + key + "'");
        } else if (section == "windows") {
            if (key == "time_window_us") cfg.windows.time_window_us = one_double(value, key);
            else if (key == "span_mhz") cfg.windows.min_span_mhz = one_double(value, key);
            else if (key == "input_center_us") cfg.windows.input_center_us = one_double(value, key);
            else if (key == "dispersion")
                cfg.windows.include_dispersion = one_double(value, key) != 0.0;
            else if (key == "alias_threshold")
                cfg.windows.alias_energy_threshold = one_double(value, key);
            else throw std::invalid_argument("config: unknown windows key '" + key + "'");
        } else if (section == "probe") {
            if (key == "scan_lo_mhz") cfg.scan_lo_mhz = one_double(value, key);
            else if (key == "scan_hi_mhz") cfg.scan_hi_mhz = one_double(value, key);
            else if (key == "n_points") cfg.scan_points = static_cast<int>(one_double(value, key));
            else if (key == "transition") cfg.scan_transition = parse_transition_label(value);
            else throw std::invalid_argument("config: unknown probe key '" + key + "'");
        } else if (section == "sweep") {
            if (key == "powers") cfg.sweep_powers = parse_doubles(value, key);
            else if (key == "theory_finesse") cfg.theory_finesses = parse_doubles(value, key);
            else if (key == "workers") cfg.workers = static_cast<int>(one_double(value, key));
            else throw std::invalid_argument("config: unknown sweep key '" + key + "'");
        } else if (section == "output") {
            if (key == "seed")
                cfg.seed = static_cast<unsigned long long>(one_double(value, key));
            else throw std::invalid_argument("config: unknown output key '" + key + "'");
        } else {
            throw std::invalid_argument("config: unknown section '" + section + "'");
        }
    }
    cfg.scheme.validate();
    cfg.class_grid.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace afc
