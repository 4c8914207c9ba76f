#ifndef AFC_LEVELS_HPP
#define AFC_LEVELS_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>

namespace afc {

// Hyperfine levels of the Pr-like 3-ground / 3-excited system.
enum class GroundLevel : int { g12 = 0, g32 = 1, g52 = 2 };
enum class ExcitedLevel : int { e12 = 0, e32 = 1, e52 = 2 };

struct TransitionLabel {
    GroundLevel ground;
    ExcitedLevel excited;

    bool operator==(const TransitionLabel&) const = default;
};

// Text form "1/2g->3/2e" (also accepts "1/2g->3/2e" with unicode arrow or spaces).
TransitionLabel parse_transition_label(std::string_view text);
std::string to_string(TransitionLabel t);

// Level structure, transition strengths and decay branching of one ion species.
//
// Frequency convention, used everywhere: for an ion class with detuning
// `delta` (defined by the frequency of its 1/2g->1/2e transition),
//
//     nu(delta, g, e) = delta - ground_offset(g) + excited_offset(e)
//
// with ground offsets {0, s_g1, s_g1+s_g2} and excited offsets
// {0, s_e1, s_e1+s_e2}. Transitions out of deeper ground reservoirs are
// red-shifted; this is the assignment under which the bundled pit-burning
// pulse table empties the target interval (the opposite ground sign leaves
// ion classes the final sweep block cannot reach).
struct HyperfineScheme {
    // |1/2g>-|3/2g| and |3/2g>-|5/2g| splittings, MHz.
    std::array<double, 2> ground_spacings_mhz{10.2, 17.3};
    // |1/2e>-|3/2e| and |3/2e>-|5/2e| splittings, MHz.
    std::array<double, 2> excited_spacings_mhz{4.6, 4.8};
    // Relative oscillator strengths, rows = ground level, cols = excited level.
    // Default values follow the commonly used Pr:YSO table; they are a
    // configuration artifact, not a measured claim of this package.
    std::array<std::array<double, 3>, 3> oscillator_strengths{{
        {0.56, 0.38, 0.06},
        {0.39, 0.60, 0.01},
        {0.05, 0.02, 0.93},
    }};
    double excited_lifetime_us = 164.0;
    double homogeneous_linewidth_khz = 1.0;  // sub-grid; see population kernel

    void validate() const;  // throws std::invalid_argument

    double total_ground_splitting_mhz() const {
        return ground_spacings_mhz[0] + ground_spacings_mhz[1];
    }
    double total_excited_splitting_mhz() const {
        return excited_spacings_mhz[0] + excited_spacings_mhz[1];
    }
    double ground_offset_mhz(GroundLevel g) const;
    double excited_offset_mhz(ExcitedLevel e) const;

    double strength(GroundLevel g, ExcitedLevel e) const {
        return oscillator_strengths[static_cast<int>(g)][static_cast<int>(e)];
    }
    double strength(TransitionLabel t) const { return strength(t.ground, t.excited); }

    // Spontaneous-decay branching ratios of excited level e into the three
    // ground levels (column of the strength matrix, normalized to 1).
    std::array<double, 3> branching_ratios(ExcitedLevel e) const;
};

// Absolute frequency (MHz) of transition `t` for the ion class at `class_detuning_mhz`.
double transition_offset(const HyperfineScheme& scheme, double class_detuning_mhz,
                         TransitionLabel t);

// Widest spectral interval a single chirped scan can empty:
// total ground splitting minus total excited splitting. Throws if negative.
double max_pit_width(const HyperfineScheme& scheme);

// Usable AFC bandwidth, set by the first excited-state splitting.
double afc_bandwidth_limit(const HyperfineScheme& scheme);

// Key-value config ("ground_spacings_mhz = 10.2 17.3", "#" comments, one key
// per line). Unspecified keys keep their defaults.
HyperfineScheme load_scheme(std::istream& in);
HyperfineScheme load_scheme_file(const std::string& path);

inline constexpr std::array<GroundLevel, 3> all_ground_levels{
    GroundLevel::g12, GroundLevel::g32, GroundLevel::g52};
inline constexpr std::array<ExcitedLevel, 3> all_excited_levels{
    ExcitedLevel::e12, ExcitedLevel::e32, ExcitedLevel::e52};

}  // namespace afc

#endif
