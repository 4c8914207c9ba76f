#include "afc/levels.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace afc {

namespace {

std::string strip(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(a, b - a + 1));
}

}  // namespace

TransitionLabel parse_transition_label(std::string_view text) {
    std::string s = strip(text);
    // strip spaces around the arrow, accept "->"
    size_t arrow = s.find("->");
    if (arrow == std::string::npos)
        throw std::invalid_argument("transition label '" + s + "': expected 'g->e' form");
    std::string gs = strip(s.substr(0, arrow));
    std::string es = strip(s.substr(arrow + 2));

    GroundLevel g;
    if (gs == "1/2g") g = GroundLevel::g12;
    else if (gs == "3/2g") g = GroundLevel::g32;
    else if (gs == "5/2g") g = GroundLevel::g52;
    else throw std::invalid_argument("unknown ground level '" + gs + "'");

    ExcitedLevel e;
    if (es == "1/2e") e = ExcitedLevel::e12;
    else if (es == "3/2e") e = ExcitedLevel::e32;
    else if (es == "5/2e") e = ExcitedLevel::e52;
    else throw std::invalid_argument("unknown excited level '" + es + "'");

    return TransitionLabel{g, e};
}

std::string to_string(TransitionLabel t) {
    static const char* gn[] = {"1/2g", "3/2g", "5/2g"};
    static const char* en[] = {"1/2e", "3/2e", "5/2e"};
    return std::string(gn[static_cast<int>(t.ground)]) + "->" + en[static_cast<int>(t.excited)];
}

void HyperfineScheme::validate() const {
    for (double s : ground_spacings_mhz)
        if (!(s > 0) || !std::isfinite(s))
            throw std::invalid_argument("ground spacings must be positive and finite");
    for (double s : excited_spacings_mhz)
        if (!(s > 0) || !std::isfinite(s))
            throw std::invalid_argument("excited spacings must be positive and finite");
    for (const auto& row : oscillator_strengths)
        for (double v : row)
            if (!(v > 0.0) || v > 1.0)
                throw std::invalid_argument("oscillator strengths must lie in (0, 1]");
    const auto& r0 = oscillator_strengths[0];
    if (!(r0[0] >= r0[1] && r0[0] >= r0[2]))
        throw std::invalid_argument("(1/2g,1/2e) strength must be the maximum of its row");
    if (!(excited_lifetime_us > 0))
        throw std::invalid_argument("excited lifetime must be positive");
    if (total_ground_splitting_mhz() <= total_excited_splitting_mhz())
        throw std::invalid_argument(
            "ground splitting must exceed excited splitting (pit width would be <= 0)");
}

double HyperfineScheme::ground_offset_mhz(GroundLevel g) const {
    switch (g) {
        case GroundLevel::g12: return 0.0;
        case GroundLevel::g32: return ground_spacings_mhz[0];
        case GroundLevel::g52: return ground_spacings_mhz[0] + ground_spacings_mhz[1];
    }
    return 0.0;
}

double HyperfineScheme::excited_offset_mhz(ExcitedLevel e) const {
    switch (e) {
        case ExcitedLevel::e12: return 0.0;
        case ExcitedLevel::e32: return excited_spacings_mhz[0];
        case ExcitedLevel::e52: return excited_spacings_mhz[0] + excited_spacings_mhz[1];
    }
    return 0.0;
}

std::array<double, 3> HyperfineScheme::branching_ratios(ExcitedLevel e) const {
    const int ei = static_cast<int>(e);
    double sum = 0.0;
    for (int g = 0; g < 3; ++g) sum += oscillator_strengths[g][ei];
    std::array<double, 3> br{};
    for (int g = 0; g < 3; ++g) br[g] = oscillator_strengths[g][ei] / sum;
    return br;
}

double transition_offset(const HyperfineScheme& scheme, double class_detuning_mhz,
                         TransitionLabel t) {
    if (!std::isfinite(class_detuning_mhz))
        throw std::invalid_argument("class detuning must be finite");
    return class_detuning_mhz - scheme.ground_offset_mhz(t.ground) +
           scheme.excited_offset_mhz(t.excited);
}

double max_pit_width(const HyperfineScheme& scheme) {
    double w = scheme.total_ground_splitting_mhz() - scheme.total_excited_splitting_mhz();
    if (w < 0)
        throw std::invalid_argument("invalid scheme: excited splitting exceeds ground splitting");
    return w;
}

double afc_bandwidth_limit(const HyperfineScheme& scheme) {
    return scheme.excited_spacings_mhz[0];
}

HyperfineScheme load_scheme(std::istream& in) {
    HyperfineScheme s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = strip(line);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scheme config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        std::string key = strip(t.substr(0, eq));
        std::istringstream vals(t.substr(eq + 1));
        if (key == "ground_spacings_mhz") {
            if (!(vals >> s.ground_spacings_mhz[0] >> s.ground_spacings_mhz[1]))
                throw std::invalid_argument("scheme config: ground_spacings_mhz wants 2 numbers");
        } else if (key == "excited_spacings_mhz") {
            if (!(vals >> s.excited_spacings_mhz[0] >> s.excited_spacings_mhz[1]))
                throw std::invalid_argument("scheme config: excited_spacings_mhz wants 2 numbers");
        } else if (key == "excited_lifetime_us") {
            if (!(vals >> s.excited_lifetime_us))
                throw std::invalid_argument("scheme config: bad excited_lifetime_us");
        } else if (key == "homogeneous_linewidth_khz") {
            if (!(vals >> s.homogeneous_linewidth_khz))
                throw std::invalid_argument("scheme config: bad homogeneous_linewidth_khz");
        } else if (key == "oscillator_strengths") {
            for (auto& row : s.oscillator_strengths)
                for (auto& v : row)
                    if (!(vals >> v))
                        throw std::invalid_argument(
                            "scheme config: oscillator_strengths wants 9 numbers (row-major)");
        } else {
            throw std::invalid_argument("scheme config: unknown key '" + key + "'");
        }
    }
    s.validate();
    return s;
}

HyperfineScheme load_scheme_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open scheme config '" + path + "'");
    return load_scheme(f);
}

}  // namespace afc
