#ifndef AFC_PROPAGATION_HPP
#define AFC_PROPAGATION_HPP

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "afc/population.hpp"

namespace afc {

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PulseEnvelope { Gaussian };

struct InputPulse {
    PulseEnvelope shape = PulseEnvelope::Gaussian;
    double fwhm_duration_ns = 200.0;   // intensity FWHM
    double carrier_detuning_mhz = 0.0;
    double amplitude = 1.0;

    void validate() const;
    // FWHM of the Gaussian power spectrum, 2 ln2 / (pi * tau).
    double spectral_fwhm_mhz() const;
};

struct TimeTrace {
    double t0_us = 0.0;
    double dt_ns = 0.0;
    std::vector<std::complex<double>> samples;

    double t_us(std::size_t i) const { return t0_us + static_cast<double>(i) * dt_ns * 1e-3; }
    // integral of |s|^2 dt over [a, b] (us); whole trace by default
    double energy(double a_us = -1e30, double b_us = 1e30) const;
    double peak_time_us() const;
    double centroid_us(double a_us, double b_us) const;
};

// Complex weak-field response on the spectrum's own grid:
// |H| = exp(-d/2), phase from the Hilbert-transform pairing (causal filter).
std::vector<std::complex<double>> transfer_function(const AbsorptionSpectrum& spec,
                                                    bool include_dispersion = true);

struct PropagationSettings {
    double time_window_us = 16.0;
    double min_span_mhz = 64.0;
    double input_center_us = 2.0;   // where the input pulse sits in the window
    bool include_dispersion = true; // disable for pure-absorption comparisons
    // fraction of output energy allowed in the window tail; a wrapped echo
    // train carries orders of magnitude more than wall-edge ringing does
    double alias_energy_threshold = 1e-4;
};

// Input pulse as a trace on the same time grid the settings produce.
TimeTrace input_trace(const InputPulse& pulse, const PropagationSettings& settings = {});

// Frequency-domain linear-response propagation of the pulse through the
// absorption spectrum. Throws SimulationError when the echo train would wrap
// around the time window (with the window size that would be needed).
TimeTrace propagate(const InputPulse& pulse, const AbsorptionSpectrum& spec,
                    const PropagationSettings& settings = {});

struct EfficiencyResult {
    double eta = 0.0;
    double transmission = 0.0;
    std::vector<std::string> warnings;
};

// Windowed energy ratios against the reference run (the paper's area-ratio
// measurement): T over the transmitted-pulse window, eta over the echo window.
EfficiencyResult measure_efficiency(const TimeTrace& out, const TimeTrace& reference,
                                    std::pair<double, double> transmit_window_us,
                                    std::pair<double, double> echo_window_us);

// Windows anchored on the reference pulse (peak +- half a comb period and the
// following period). The dispersive delay through pit walls shifts the pulse,
// so windows must follow the signal, not the input time.
struct EchoWindows {
    std::pair<double, double> transmit;
    std::pair<double, double> echo;
};
EchoWindows default_windows(const TimeTrace& reference, double delta_mhz);

// CSV "t_us,re,im,abs2"
void write_trace_csv(const TimeTrace& trace, std::ostream& out);
void write_trace_csv_file(const TimeTrace& trace, const std::string& path);

}  // namespace afc

#endif
