#ifndef AFC_POPULATION_HPP
#define AFC_POPULATION_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "afc/levels.hpp"

namespace afc {

// Uniform frequency grid, samples at nu_min + i*step for i in [0, size).
struct SpectralGrid {
    double nu_min_mhz = -60.0;
    double nu_max_mhz = 60.0;
    double step_mhz = 0.01;

    void validate() const;
    std::size_t size() const;
    double nu(std::size_t i) const { return nu_min_mhz + static_cast<double>(i) * step_mhz; }
};

// Ground-state occupations of every ion class across the simulated window.
// occupations[i] = {p(1/2g), p(3/2g), p(5/2g)} for the class at grid.nu(i).
struct PopulationField {
    SpectralGrid grid;
    std::vector<std::array<double, 3>> occupations;
    // Peak optical depth contributed by one fully occupied class stack;
    // calibrated by uniform_field so the unburnt line has depth ~ d0.
    double class_density = 0.0;
    // Additive background depth (off-resonant pumping residue), default none.
    double background_depth = 0.0;

    double total_population() const;
    void validate() const;
};

struct AbsorptionSpectrum {
    SpectralGrid grid;
    std::vector<double> d;
    std::string transition_context;  // which transitions were summed

    double max_depth() const;
};

// Flat line with equal-thirds occupations, calibrated so a full-line scan
// over all nine transitions reads max depth ~= background_depth_d0.
PopulationField uniform_field(const SpectralGrid& grid, double background_depth_d0,
                              const HyperfineScheme& scheme = HyperfineScheme{});

// Forward model: d(nu) = background + sum over classes, ground levels and
// transitions of density * occupation * strength, deposited on the probe grid
// with area-preserving linear interpolation (the ~kHz homogeneous line is far
// below any sensible grid step). An optional Lorentzian kernel of the
// scheme's homogeneous width can be enabled for sensitivity studies.
AbsorptionSpectrum synthesize_absorption(
    const PopulationField& field, const HyperfineScheme& scheme,
    const SpectralGrid& probe_grid,
    const std::optional<std::vector<TransitionLabel>>& transition_filter = std::nullopt,
    bool lorentzian_kernel = false);

// Synthetic comb of Gaussian peaks (per-bin areas exact via erf):
// peaks of amplitude peak_d and FWHM gamma at center + k*delta,
// k = 0 .. n_peaks-1.
AbsorptionSpectrum make_gaussian_comb(const SpectralGrid& grid, double peak_d,
                                      double gamma_khz, double delta_mhz, int n_peaks,
                                      double center_mhz = 0.0,
                                      double supergauss_order = 1.0);

// Same, parameterized by the effective (period-averaged) depth d_tilde:
// peak amplitude is normalized so the average over one period is exactly
// d_tilde. Peaks are centered symmetrically about center_mhz.
AbsorptionSpectrum make_comb_effective_depth(const SpectralGrid& grid, double d_tilde,
                                             double finesse, double delta_mhz, int n_peaks,
                                             double center_mhz = 0.0);

// CSV "nu_MHz,d"
void write_spectrum_csv(const AbsorptionSpectrum& spec, std::ostream& out);
void write_spectrum_csv_file(const AbsorptionSpectrum& spec, const std::string& path);
AbsorptionSpectrum read_spectrum_csv(std::istream& in);
AbsorptionSpectrum read_spectrum_csv_file(const std::string& path);

// Versioned population snapshot (CSV with header line).
void save_population(const PopulationField& field, const std::string& path);
PopulationField load_population(const std::string& path);

}  // namespace afc

#endif
