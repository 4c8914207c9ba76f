#ifndef AFC_PROBE_HPP
#define AFC_PROBE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "afc/analytic.hpp"
#include "afc/population.hpp"

namespace afc {

// Frequency-scan measurement of the prepared structure on one transition.
// The probe is non-perturbing and resolution-limited only by the grid.
AbsorptionSpectrum scan_spectrum(const PopulationField& field, const HyperfineScheme& scheme,
                                 TransitionLabel transition, double nu_lo_mhz, double nu_hi_mhz,
                                 int n_points);

// Depth on the strong transition inferred from a scan of the weak one:
// d_strong(nu) = ratio * d_weak(nu - axis_shift), axis re-registered.
AbsorptionSpectrum infer_strong_depth(const AbsorptionSpectrum& weak_spec, double strength_ratio,
                                      double axis_shift_mhz);

// axis shift between two transitions sharing a ground level
double infer_axis_shift(const HyperfineScheme& scheme, TransitionLabel weak,
                        TransitionLabel strong);

struct PeakFit {
    double center_mhz = 0.0;
    double amplitude = 0.0;
    double fwhm_khz = 0.0;
    double residual_rms = 0.0;  // rms misfit over the fit window / amplitude
    bool converged = false;
};

struct CombFit {
    CombParams params;          // d = mean amplitude, gamma = mean FWHM, delta = mean spacing
    std::vector<PeakFit> peaks;
    double residual_rms = 0.0;  // mean of per-peak residuals
};

struct FitOptions {
    double detection_threshold = 0.10;  // local maxima above this fraction of the global max
    int max_iterations = 200;
};

// Per-peak windowed Gaussian least squares. Throws std::runtime_error when
// fewer than two peaks are detected or a fit fails to converge.
CombFit fit_comb(const AbsorptionSpectrum& spec, const FitOptions& options = {});

// Per-peak report plus the summary line, CSV-ish text.
void write_fit_report(const CombFit& fit, std::ostream& out);
std::string fit_report_string(const CombFit& fit);

}  // namespace afc

#endif
