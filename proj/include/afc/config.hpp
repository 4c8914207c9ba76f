#ifndef AFC_CONFIG_HPP
#define AFC_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "afc/levels.hpp"
#include "afc/population.hpp"
#include "afc/propagation.hpp"
#include "afc/pumping.hpp"

namespace afc {

// One experiment description: INI-style sections, '#' comments.
struct ExperimentConfig {
    HyperfineScheme scheme;

    SpectralGrid class_grid{-60.0, 60.0, 0.01};
    bool lorentzian_kernel = false;  // homogeneous-lineshape kernel in synthesis
    double d0 = 60.0;
    std::string sequence_path;  // resolved relative to the config file
    // interval the finished pit must keep below 1% of d0 (bundled-table layout)
    double pit_check_lo_mhz = -1.1;
    double pit_check_hi_mhz = 16.0;

    PumpingModel pumping;

    // comb
    int n_peaks = 4;
    double delta_mhz = 1.2;
    double chirp_width_khz = 180.0;
    double power = 0.36;
    double comb_center_mhz = 0.0;

    InputPulse pulse{PulseEnvelope::Gaussian, 200.0, /*carrier*/ 1.8, 1.0};
    bool carrier_explicit = false;  // otherwise placed at the comb center

    PropagationSettings windows{64.0, 64.0, 2.0, true, 1e-4};

    // probe scan
    double scan_lo_mhz = -1.0;
    double scan_hi_mhz = 4.6;
    int scan_points = 561;
    TransitionLabel scan_transition{GroundLevel::g12, ExcitedLevel::e12};

    // sweep
    std::vector<double> sweep_powers;
    std::vector<double> theory_finesses{4.0, 5.0, 7.0};
    int workers = 4;

    unsigned long long seed = 12345;

    // raw key/value echo for the manifest
    std::map<std::string, std::string> raw;

    double carrier_mhz() const;
};

ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir);

}  // namespace afc

#endif
