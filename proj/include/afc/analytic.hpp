#ifndef AFC_ANALYTIC_HPP
#define AFC_ANALYTIC_HPP

namespace afc {

enum class PeakShape { Gaussian };

// Summary of a prepared comb: peak depth d, peak FWHM gamma, period delta.
struct CombParams {
    double d = 0.0;            // peak optical depth
    double gamma_khz = 0.0;    // peak FWHM
    double delta_mhz = 0.0;    // comb period
    int n_peaks = 0;
    PeakShape shape = PeakShape::Gaussian;

    void validate() const;  // requires gamma < delta, i.e. finesse > 1
    double finesse() const { return delta_mhz * 1e3 / gamma_khz; }
};

// d_tilde = d / F for Gaussian peaks.
double effective_depth(const CombParams& p);

// T = exp(-d_tilde); absorption is 1 - T.
double transmission(double d_tilde);

// exp(-pi^2 / (4 ln2 F^2)), the comb-periodicity dephasing of the echo
// amplitude for Gaussian peaks.
double dephasing_factor(double finesse);

// eta = d_tilde^2 exp(-d_tilde) * dephasing_factor(F), evaluated at an
// explicit effective depth. Note: the single dephasing factor is the
// formula taken verbatim; the numerical propagator shows the measured
// intensity efficiency carries the factor squared (see propagation tests).
double echo_efficiency_effective(double d_tilde, double finesse);
double echo_efficiency(const CombParams& p);

// Echo-amplitude decay exp(-t^2 gtilde^2 / 2), gtilde = 2*pi*gamma/sqrt(8 ln2)
// in angular units, so that t = 1/delta reproduces dephasing_factor(F).
double amplitude_decay(double t_us, double gamma_khz);

struct Optimum {
    double d_tilde;
    double eta;
};

// Maximizer of eta over d_tilde at fixed finesse: d_tilde* = 2 with
// eta* = 4 e^-2 * dephasing_factor(F).
Optimum optimal_depth(double finesse);

}  // namespace afc

#endif
