#include "afc/pumping.hpp"

#include "afc/propagation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace afc {

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

void PulseSpec::validate() const {
    if (name.empty()) throw std::invalid_argument("pulse: empty name");
    if (!(relative_power >= 0)) throw std::invalid_argument("pulse: relative power must be >= 0");
    if (kind == PulseKind::ChirpScan) {
        if (nu_start_mhz == nu_end_mhz)
            throw std::invalid_argument("pulse '" + name + "': chirp scan needs nu_start != nu_end");
    } else {
        if (!(chirp_width_khz > 0))
            throw std::invalid_argument("pulse '" + name + "': burnback chirp width must be > 0");
        if (transfer_efficiency < 0.0 || transfer_efficiency > 1.0)
            throw std::invalid_argument("pulse '" + name +
                                        "': transfer efficiency must lie in [0,1]");
    }
}

const PulseSpec& PulseTable::at(const std::string& name) const {
    for (const auto& p : pulses)
        if (p.name == name) return p;
    throw std::out_of_range("no pulse named '" + name + "'");
}

bool PulseTable::contains(const std::string& name) const {
    for (const auto& p : pulses)
        if (p.name == name) return true;
    return false;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tok;
    std::string cur;
    for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
            if (!cur.empty()) {
                tok.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) tok.push_back(cur);
    return tok;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

double parse_number(const std::string& tok, int line, int column) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + tok + "'", line, column);
    }
    if (pos != tok.size()) throw ParseError("malformed number '" + tok + "'", line, column);
    return v;
}

long parse_int(const std::string& tok, int line, int column) {
    std::size_t pos = 0;
    long v;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("malformed integer '" + tok + "'", line, column);
    }
    if (pos != tok.size()) throw ParseError("malformed integer '" + tok + "'", line, column);
    return v;
}

}  // namespace

std::pair<PulseTable, SequenceProgram> parse_sequence(std::string_view text) {
    PulseTable table;
    SequenceProgram program;
    std::set<std::string> names;

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::vector<std::string> tok = tokenize(line);
        if (tok.empty()) continue;

        if (iequals(tok[0], "wait_ms")) {
            if (tok.size() != 2) throw ParseError("wait_ms wants one value", lineno);
            program.inter_pulse_wait_ms = parse_number(tok[1], lineno, 2);
            continue;
        }

        if (iequals(tok[0], "repeat")) {
            // "Repeat N [times] : name, name, ..." -- ':' may stick to N or times
            std::string head = tok.size() > 1 ? tok[1] : "";
            std::size_t colon_in_line = line.find(':');
            if (colon_in_line == std::string::npos)
                throw ParseError("repeat block wants 'Repeat N: pulses...'", lineno);
            std::string count_part = line.substr(0, colon_in_line);
            std::vector<std::string> ct = tokenize(count_part);
            if (ct.size() < 2) throw ParseError("repeat block missing count", lineno);
            if (ct.size() == 3 && !iequals(ct[2], "times"))
                throw ParseError("repeat block wants 'Repeat N: pulses...'", lineno);
            if (ct.size() > 3) throw ParseError("repeat block wants 'Repeat N: pulses...'", lineno);
            long count = parse_int(ct[1], lineno, 2);
            if (count < 1) throw ParseError("repeat count must be >= 1", lineno, 2);
            SequenceBlock block;
            block.repeat_count = static_cast<int>(count);
            block.pulse_names = tokenize(line.substr(colon_in_line + 1));
            if (block.pulse_names.empty())
                throw ParseError("repeat block lists no pulses", lineno);
            for (const auto& nm : block.pulse_names)
                if (!names.count(nm))
                    throw ParseError("repeat block references undefined pulse '" + nm + "'",
                                     lineno);
            program.blocks.push_back(std::move(block));
            continue;
        }

        // pulse definition row
        PulseSpec p;
        p.name = tok[0];
        if (names.count(p.name))
            throw ParseError("duplicate pulse definition '" + p.name + "'", lineno, 1);
        if (tok.size() >= 2 && iequals(tok[1], "burnback")) {
            if (tok.size() < 5 || tok.size() > 6)
                throw ParseError("burnback row wants: name burnback center chirp_kHz transfer "
                                 "[power]",
                                 lineno);
            p.kind = PulseKind::BurnbackPair;
            p.center_mhz = parse_number(tok[2], lineno, 3);
            p.chirp_width_khz = parse_number(tok[3], lineno, 4);
            p.transfer_efficiency = parse_number(tok[4], lineno, 5);
            if (tok.size() == 6) p.relative_power = parse_number(tok[5], lineno, 6);
        } else {
            if (tok.size() < 4 || tok.size() > 5)
                throw ParseError("pulse row wants: name nu_start nu_end target [power]", lineno);
            p.kind = PulseKind::ChirpScan;
            p.nu_start_mhz = parse_number(tok[1], lineno, 2);
            p.nu_end_mhz = parse_number(tok[2], lineno, 3);
            try {
                p.target = parse_transition_label(tok[3]);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), lineno, 4);
            }
            if (tok.size() == 5) p.relative_power = parse_number(tok[4], lineno, 5);
        }
        p.validate();
        names.insert(p.name);
        table.pulses.push_back(std::move(p));
    }

    if (table.pulses.empty()) throw ParseError("no pulses defined", std::max(lineno, 1));
    return {std::move(table), std::move(program)};
}

std::pair<PulseTable, SequenceProgram> load_sequence_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open sequence file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_sequence(ss.str());
}

std::string serialize_sequence(const PulseTable& table, const SequenceProgram& program) {
    std::ostringstream out;
    char buf[256];
    out << "# pulses\n";
    for (const auto& p : table.pulses) {
        if (p.kind == PulseKind::ChirpScan) {
            std::snprintf(buf, sizeof buf, "%s %+.6g %+.6g %s", p.name.c_str(), p.nu_start_mhz,
                          p.nu_end_mhz, to_string(p.target).c_str());
            out << buf;
            if (p.relative_power != 1.0) {
                std::snprintf(buf, sizeof buf, " %.6g", p.relative_power);
                out << buf;
            }
        } else {
            std::snprintf(buf, sizeof buf, "%s burnback %+.6g %.6g %.6g", p.name.c_str(),
                          p.center_mhz, p.chirp_width_khz, p.transfer_efficiency);
            out << buf;
            if (p.relative_power != 1.0) {
                std::snprintf(buf, sizeof buf, " %.6g", p.relative_power);
                out << buf;
            }
        }
        out << "\n";
    }
    out << "# schedule\n";
    std::snprintf(buf, sizeof buf, "wait_ms %.6g\n", program.inter_pulse_wait_ms);
    out << buf;
    for (const auto& b : program.blocks) {
        out << "Repeat " << b.repeat_count << ":";
        for (std::size_t i = 0; i < b.pulse_names.size(); ++i)
            out << (i ? ", " : " ") << b.pulse_names[i];
        out << "\n";
    }
    return out.str();
}

void apply_chirp_scan(PopulationField& field, const HyperfineScheme& scheme,
                      const PulseSpec& pulse, const PumpingModel& model,
                      std::vector<std::string>* warnings) {
    if (pulse.kind != PulseKind::ChirpScan)
        throw std::invalid_argument("apply_chirp_scan: pulse is not a chirp scan");
    if (pulse.relative_power == 0.0) return;

    double lo = std::min(pulse.nu_start_mhz, pulse.nu_end_mhz) - model.edge_margin_mhz;
    double hi = std::max(pulse.nu_start_mhz, pulse.nu_end_mhz) + model.edge_margin_mhz;

    // classes affected through any transition live in [lo - E_max + G_min, hi + G_max]
    const double g_max = scheme.total_ground_splitting_mhz();
    const double e_max = scheme.total_excited_splitting_mhz();
    if (lo - e_max < field.grid.nu_min_mhz || hi + g_max > field.grid.nu_max_mhz) {
        if (warnings)
            warnings->push_back("scan '" + pulse.name +
                                "' reaches ion classes outside the simulated window; clipped");
    }

    const double s_target = scheme.strength(pulse.target);
    const std::size_t n = field.grid.size();

    std::array<std::array<double, 3>, 3> p_full{};  // p_exc if in band
    for (int g = 0; g < 3; ++g)
        for (int e = 0; e < 3; ++e) {
            const double x = pulse.relative_power *
                             scheme.oscillator_strengths[g][e] / s_target;
            p_full[g][e] = 1.0 - std::exp(-model.saturation_kappa * x);
        }

    std::array<std::array<double, 3>, 3> br{};
    for (int e = 0; e < 3; ++e) {
        auto b = scheme.branching_ratios(static_cast<ExcitedLevel>(e));
        for (int g = 0; g < 3; ++g) br[g][e] = b[g];
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double delta = field.grid.nu(i);
        auto& occ = field.occupations[i];
        std::array<double, 3> excited{0.0, 0.0, 0.0};
        for (int g = 0; g < 3; ++g) {
            if (occ[g] <= 0.0) continue;
            double p[3];
            double total = 0.0;
            for (int e = 0; e < 3; ++e) {
                const double nu = delta - scheme.ground_offset_mhz(static_cast<GroundLevel>(g)) +
                                  scheme.excited_offset_mhz(static_cast<ExcitedLevel>(e));
                p[e] = (nu >= lo && nu <= hi) ? p_full[g][e] : 0.0;
                total += p[e];
            }
            if (total <= 0.0) continue;
            const double scale = total > 1.0 ? 1.0 / total : 1.0;
            double taken = 0.0;
            for (int e = 0; e < 3; ++e) {
                const double t = occ[g] * p[e] * scale;
                excited[e] += t;
                taken += t;
            }
            occ[g] -= taken;
        }
        // full relaxation before the next pulse (wait >> T1)
        for (int e = 0; e < 3; ++e) {
            if (excited[e] == 0.0) continue;
            for (int g = 0; g < 3; ++g) occ[g] += excited[e] * br[g][e];
        }
    }
}

void apply_burnback(PopulationField& field, const HyperfineScheme& scheme,
                    const PulseSpec& pulse, const PumpingModel& model) {
    if (pulse.kind != PulseKind::BurnbackPair)
        throw std::invalid_argument("apply_burnback: pulse is not a burnback pair");
    pulse.validate();
    (void)scheme;
    if (pulse.transfer_efficiency == 0.0 || pulse.relative_power == 0.0) return;

    const double fwhm = model.profile_scale * pulse.chirp_width_khz * 1e-3;  // MHz
    const std::size_t n = field.grid.size();
    const int g52 = static_cast<int>(GroundLevel::g52);
    const int g12 = static_cast<int>(GroundLevel::g12);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * (field.grid.nu(i) - pulse.center_mhz) / fwhm;
        const double x2 = x * x;
        if (x2 > 1e4) continue;  // profile support
        const double profile = std::exp(-kLn2 * std::pow(x2, model.burnback_order));
        const double frac =
            pulse.transfer_efficiency * (1.0 - std::exp(-pulse.relative_power * profile));
        const double moved = field.occupations[i][g52] * frac;
        field.occupations[i][g52] -= moved;
        field.occupations[i][g12] += moved;
    }
    field.background_depth += model.background_per_power * pulse.relative_power;
}

void run_program(PopulationField& field, const HyperfineScheme& scheme, const PulseTable& table,
                 const SequenceProgram& program, const PumpingModel& model,
                 std::vector<std::string>* warnings) {
    for (const auto& block : program.blocks) {
        for (int r = 0; r < block.repeat_count; ++r) {
            for (const auto& name : block.pulse_names) {
                const PulseSpec& p = table.at(name);
                if (p.kind == PulseKind::ChirpScan)
                    apply_chirp_scan(field, scheme, p, model, warnings);
                else
                    apply_burnback(field, scheme, p, model);
            }
        }
    }
}

void create_afc(PopulationField& field, const HyperfineScheme& scheme, int n_peaks,
                double delta_mhz, double chirp_width_khz, double power,
                const PumpingModel& model, std::vector<std::string>* warnings,
                double center0_mhz) {
    if (n_peaks < 1) throw std::invalid_argument("create_afc: need at least one peak");
    if (!(delta_mhz > 0)) throw std::invalid_argument("create_afc: delta must be positive");

    const double span = (n_peaks - 1) * delta_mhz;
    if (span > afc_bandwidth_limit(scheme) && warnings)
        warnings->push_back("comb span exceeds the AFC bandwidth limit set by the first "
                            "excited-state splitting");

    // the comb must fit inside an empty pit: check the region is transparent
    const double margin = std::max(0.5 * delta_mhz, 2.0 * model.profile_scale * chirp_width_khz * 1e-3);
    SpectralGrid check;
    check.nu_min_mhz = center0_mhz - margin;
    check.nu_max_mhz = center0_mhz + span + margin;
    check.step_mhz = std::min(field.grid.step_mhz, 0.01);
    AbsorptionSpectrum before = synthesize_absorption(field, scheme, check);
    double total_strength = 0.0;
    for (const auto& row : scheme.oscillator_strengths)
        for (double v : row) total_strength += v;
    const double d0_estimate = field.class_density * total_strength / 3.0;
    if (before.max_depth() > 0.02 * d0_estimate)
        throw SimulationError("create_afc: comb region is not inside an empty pit");

    PulseSpec p;
    p.name = "burnback";
    p.kind = PulseKind::BurnbackPair;
    p.chirp_width_khz = chirp_width_khz;
    p.transfer_efficiency = 1.0;
    p.relative_power = power;
    for (int k = 0; k < n_peaks; ++k) {
        p.center_mhz = center0_mhz + k * delta_mhz;
        apply_burnback(field, scheme, p, model);
    }
}

}  // namespace afc
