#ifndef AFC_PUMPING_HPP
#define AFC_PUMPING_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "afc/population.hpp"

namespace afc {

enum class PulseKind { ChirpScan, BurnbackPair };

struct PulseSpec {
    std::string name;
    PulseKind kind = PulseKind::ChirpScan;

    // chirp_scan
    double nu_start_mhz = 0.0;
    double nu_end_mhz = 0.0;
    TransitionLabel target{GroundLevel::g12, ExcitedLevel::e12};  // intensity-matching hint
    double relative_power = 1.0;

    // burnback_pair
    double center_mhz = 0.0;
    double chirp_width_khz = 0.0;
    double transfer_efficiency = 1.0;

    void validate() const;
};

struct SequenceBlock {
    int repeat_count = 1;
    std::vector<std::string> pulse_names;
};

struct SequenceProgram {
    std::vector<SequenceBlock> blocks;
    double inter_pulse_wait_ms = 1.0;  // >> T1, so full decay between pulses
};

struct PulseTable {
    std::vector<PulseSpec> pulses;

    const PulseSpec& at(const std::string& name) const;
    bool contains(const std::string& name) const;
};

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& what, int line_, int column_ = 0)
        : std::runtime_error(what + " (line " + std::to_string(line_) +
                             (column_ > 0 ? ", column " + std::to_string(column_) : "") + ")"),
          line(line_),
          column(column_) {}
};

// Plain-text format, '#' comments. Pulse rows:
//   <name> <nu_start> <nu_end> <target>         chirped hole-burning scan
//   <name> burnback <center> <chirp_kHz> <transfer> [power]
// Schedule lines:
//   Repeat <N>: <name>, <name>, ...
//   wait_ms <value>
std::pair<PulseTable, SequenceProgram> parse_sequence(std::string_view text);
std::pair<PulseTable, SequenceProgram> load_sequence_file(const std::string& path);

// Canonical serialization; parse(serialize(x)) == x.
std::string serialize_sequence(const PulseTable& table, const SequenceProgram& program);

// Rate-equation knobs of the optical-pumping model.
struct PumpingModel {
    // p_exc(x) = 1 - exp(-kappa x), x = relative_power * strength / strength(target)
    double saturation_kappa = 6.0;
    // scans excite transitions within [start - m, end + m]; models the
    // power-broadened edges of the chirp
    double edge_margin_mhz = 0.08;
    // burn-back spectral profile FWHM = profile_scale * chirp_width
    double profile_scale = 0.85;
    // super-Gaussian order of the burn-back profile (1 = Gaussian)
    double burnback_order = 1.0;
    // transferred fraction at profile center = transfer * (1 - exp(-power))
    // additive background depth added per unit burn-back power (off-resonant
    // excitation residue), default off
    double background_per_power = 0.0;
};

// One chirped scan: every (class, ground level, excited level) whose
// transition lies in the swept band loses an excitation fraction, which
// relaxes back through the branching ratios (full decay between pulses).
// When several transitions from the same ground level are in band the take
// is split proportionally, so the sweep direction drops out.
void apply_chirp_scan(PopulationField& field, const HyperfineScheme& scheme,
                      const PulseSpec& pulse, const PumpingModel& model = {},
                      std::vector<std::string>* warnings = nullptr);

// Coherent two-pulse burn-back: moves a spectrally shaped slice of the 5/2g
// reservoir into 1/2g for classes near `center` (no spontaneous-decay step).
void apply_burnback(PopulationField& field, const HyperfineScheme& scheme,
                    const PulseSpec& pulse, const PumpingModel& model = {});

// Runs the parsed program in order.
void run_program(PopulationField& field, const HyperfineScheme& scheme, const PulseTable& table,
                 const SequenceProgram& program, const PumpingModel& model = {},
                 std::vector<std::string>* warnings = nullptr);

// n_peaks burn-backs at centers center0 + k*delta. Warns when the comb span
// exceeds the AFC bandwidth limit; errors when it does not fit in the pit.
void create_afc(PopulationField& field, const HyperfineScheme& scheme, int n_peaks,
                double delta_mhz, double chirp_width_khz, double power,
                const PumpingModel& model = {}, std::vector<std::string>* warnings = nullptr,
                double center0_mhz = 0.0);

}  // namespace afc

#endif
