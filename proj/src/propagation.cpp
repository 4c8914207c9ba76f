#include "afc/propagation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

namespace afc {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kPi = std::numbers::pi;

std::mutex fftw_plan_mutex;  // FFTW planning is not thread-safe

// in-place FFT, numpy conventions: forward uses exp(-2*pi*i*k*n/N),
// backward is the unnormalized inverse (scaled by 1/N here).
void fft_inplace(std::vector<std::complex<double>>& x, int sign_forward) {
    const int n = static_cast<int>(x.size());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(x.data()),
                                reinterpret_cast<fftw_complex*>(x.data()),
                                sign_forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }
    if (!sign_forward) {
        const double inv = 1.0 / n;
        for (auto& v : x) v *= inv;
    }
}

// Discrete Hilbert pairing on a periodic grid: returns the phase phi such
// that exp(-d/2 + i*phi) is the causal (minimum-phase-like) response.
// `half_d` is -d/2 in fft bin order (bin k holds frequency k*df wrapped).
std::vector<double> hilbert_phase(const std::vector<double>& half_d) {
    const std::size_t n = half_d.size();
    std::vector<std::complex<double>> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = half_d[i];
    fft_inplace(w, 1);
    // multiply by +i*sgn: sgn = +1 for bins 1..n/2-1, -1 for n/2+1..n-1
    for (std::size_t k = 1; k < n / 2; ++k) w[k] *= std::complex<double>(0.0, 1.0);
    for (std::size_t k = n / 2 + 1; k < n; ++k) w[k] *= std::complex<double>(0.0, -1.0);
    w[0] = 0.0;
    if (n % 2 == 0) w[n / 2] = 0.0;
    fft_inplace(w, 0);
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = w[i].real();
    return phi;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// area-preserving resample of spectrum d onto frequency nu (clamped to edges)
double sample_depth(const AbsorptionSpectrum& spec, double nu) {
    const auto& g = spec.grid;
    double x = (nu - g.nu_min_mhz) / g.step_mhz;
    if (x <= 0.0) return spec.d.front();
    if (x >= static_cast<double>(spec.d.size() - 1)) return spec.d.back();
    const std::size_t i0 = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(i0);
    return spec.d[i0] * (1.0 - f) + spec.d[i0 + 1] * f;
}

struct FreqGrid {
    std::size_t n;
    double df_mhz;
    double dt_us;
    // fft-order frequency of bin k
    double nu(std::size_t k) const {
        const double half = static_cast<double>(n) / 2.0;
        double idx = static_cast<double>(k);
        if (idx >= half) idx -= static_cast<double>(n);
        return idx * df_mhz;
    }
};

FreqGrid make_grid(const PropagationSettings& s, const AbsorptionSpectrum& spec,
                   const InputPulse& pulse) {
    const double needed_span =
        std::max({s.min_span_mhz, spec.grid.nu_max_mhz - spec.grid.nu_min_mhz,
                  2.0 * std::abs(pulse.carrier_detuning_mhz) + 10.0 * pulse.spectral_fwhm_mhz()});
    const std::size_t n = next_pow2(
        static_cast<std::size_t>(std::ceil(s.time_window_us * needed_span)));
    FreqGrid g;
    g.n = n;
    g.df_mhz = 1.0 / s.time_window_us;
    g.dt_us = s.time_window_us / static_cast<double>(n);
    return g;
}

TimeTrace make_input(const InputPulse& pulse, const PropagationSettings& settings,
                     const FreqGrid& g) {
    TimeTrace tr;
    tr.t0_us = 0.0;
    tr.dt_ns = g.dt_us * 1e3;
    tr.samples.resize(g.n);
    const double tau_us = pulse.fwhm_duration_ns * 1e-3;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double ti = static_cast<double>(i) * g.dt_us;
        const double t = ti - settings.input_center_us;
        const double env = pulse.amplitude * std::exp(-2.0 * kLn2 * t * t / (tau_us * tau_us));
        tr.samples[i] = env * std::exp(std::complex<double>(0.0, 2.0 * kPi *
                                                                     pulse.carrier_detuning_mhz *
                                                                     ti));
    }
    return tr;
}

}  // namespace

void InputPulse::validate() const {
    if (!(fwhm_duration_ns > 0))
        throw std::invalid_argument("input pulse: duration must be positive");
    if (!(amplitude > 0)) throw std::invalid_argument("input pulse: amplitude must be positive");
}

double InputPulse::spectral_fwhm_mhz() const {
    // Gaussian: intensity-FWHM tau ns <-> power-spectrum FWHM 2 ln2/(pi tau)
    return 2.0 * kLn2 / (kPi * fwhm_duration_ns * 1e-3);
}

double TimeTrace::energy(double a_us, double b_us) const {
    double sum = 0.0;
    const double dt = dt_ns * 1e-3;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double t = t_us(i);
        if (t >= a_us && t <= b_us) sum += std::norm(samples[i]);
    }
    return sum * dt;
}

double TimeTrace::peak_time_us() const {
    std::size_t best = 0;
    double mx = -1.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = std::norm(samples[i]);
        if (v > mx) {
            mx = v;
            best = i;
        }
    }
    return t_us(best);
}

double TimeTrace::centroid_us(double a_us, double b_us) const {
    double w = 0.0, tw = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double t = t_us(i);
        if (t < a_us || t > b_us) continue;
        const double v = std::norm(samples[i]);
        w += v;
        tw += v * t;
    }
    if (w <= 0.0) throw SimulationError("centroid: window holds no signal");
    return tw / w;
}

std::vector<std::complex<double>> transfer_function(const AbsorptionSpectrum& spec,
                                                    bool include_dispersion) {
    for (double v : spec.d)
        if (!std::isfinite(v) || v < 0)
            throw std::invalid_argument("transfer_function: depths must be finite and >= 0");
    const std::size_t n = spec.d.size();
    std::vector<double> half(n);
    for (std::size_t i = 0; i < n; ++i) half[i] = -0.5 * spec.d[i];
    std::vector<std::complex<double>> h(n);
    if (include_dispersion) {
        // grid order here is natural (ascending nu); the pairing only needs
        // a consistent periodic ordering (the multiplier commutes with the
        // circular shift between natural and fft order)
        std::vector<double> phi = hilbert_phase(half);
        for (std::size_t i = 0; i < n; ++i)
            h[i] = std::exp(std::complex<double>(half[i], phi[i]));
    } else {
        for (std::size_t i = 0; i < n; ++i) h[i] = std::exp(half[i]);
    }
    return h;
}

TimeTrace input_trace(const InputPulse& pulse, const PropagationSettings& settings) {
    pulse.validate();
    AbsorptionSpectrum empty;
    empty.grid = SpectralGrid{-1.0, 1.0, 1.0};
    empty.d = {0.0, 0.0, 0.0};
    return make_input(pulse, settings, make_grid(settings, empty, pulse));
}

TimeTrace propagate(const InputPulse& pulse, const AbsorptionSpectrum& spec,
                    const PropagationSettings& settings) {
    pulse.validate();
    const FreqGrid g = make_grid(settings, spec, pulse);

    // the pulse spectrum must fit well inside the fft span or it wraps
    const double bw = pulse.spectral_fwhm_mhz();
    const double span = static_cast<double>(g.n) * g.df_mhz;
    if (std::abs(pulse.carrier_detuning_mhz) + 3.0 * bw > 0.45 * span)
        throw SimulationError("propagate: pulse bandwidth exceeds the frequency span");

    // resample absorption onto the fft grid (clamped continuation at edges)
    AbsorptionSpectrum resampled;
    std::vector<double> half(g.n);
    for (std::size_t k = 0; k < g.n; ++k) half[k] = -0.5 * sample_depth(spec, g.nu(k));
    std::vector<std::complex<double>> H(g.n);
    if (settings.include_dispersion) {
        std::vector<double> phi = hilbert_phase(half);
        for (std::size_t k = 0; k < g.n; ++k)
            H[k] = std::exp(std::complex<double>(half[k], phi[k]));
    } else {
        for (std::size_t k = 0; k < g.n; ++k) H[k] = std::exp(half[k]);
    }

    TimeTrace in = make_input(pulse, settings, g);
    std::vector<std::complex<double>> work = in.samples;
    fft_inplace(work, 1);
    for (std::size_t k = 0; k < g.n; ++k) work[k] *= H[k];
    fft_inplace(work, 0);

    TimeTrace out;
    out.t0_us = 0.0;
    out.dt_ns = g.dt_us * 1e3;
    out.samples = std::move(work);

    // aliasing guard: the echo train must have decayed before the window end
    const double total = out.energy();
    if (total > 0) {
        const double tail = out.energy(settings.time_window_us * 0.95, 1e30);
        if (tail > settings.alias_energy_threshold * total) {
            std::ostringstream msg;
            msg << "propagate: echo train wraps around the time window (tail fraction "
                << tail / total << "); a window of at least " << 2.0 * settings.time_window_us
                << " us is needed";
            throw SimulationError(msg.str());
        }
    }
    return out;
}

EfficiencyResult measure_efficiency(const TimeTrace& out, const TimeTrace& reference,
                                    std::pair<double, double> transmit_window_us,
                                    std::pair<double, double> echo_window_us) {
    if (echo_window_us.first < transmit_window_us.second &&
        transmit_window_us.first < echo_window_us.second)
        throw std::invalid_argument("measure_efficiency: windows overlap");
    const double ref = reference.energy(transmit_window_us.first, transmit_window_us.second);
    if (!(ref > 0)) throw std::invalid_argument("measure_efficiency: empty reference");

    EfficiencyResult r;
    r.transmission = out.energy(transmit_window_us.first, transmit_window_us.second) / ref;
    const double echo = out.energy(echo_window_us.first, echo_window_us.second);
    r.eta = echo / ref;

    // widening check: if a slim extension of the echo window adds > 1% of
    // the echo energy, part of the echo was cut off. The margin is kept well
    // below one comb period so the next echo stays outside, and only the far
    // side is extended (the near side abuts the transmitted pulse).
    const double m = 0.05 * (echo_window_us.second - echo_window_us.first);
    const double wider = out.energy(echo_window_us.first, echo_window_us.second + m);
    if (echo > 0 && wider - echo > 0.01 * echo)
        r.warnings.push_back("echo window may clip the echo (>1% energy just outside)");
    return r;
}

EchoWindows default_windows(const TimeTrace& reference, double delta_mhz) {
    if (!(delta_mhz > 0)) throw std::invalid_argument("default_windows: delta must be positive");
    const double tp = reference.peak_time_us();
    const double half = 0.5 / delta_mhz;
    EchoWindows w;
    w.transmit = {tp - half, tp + half};
    w.echo = {tp + half, tp + 3.0 * half};
    return w;
}

void write_trace_csv(const TimeTrace& trace, std::ostream& out) {
    out << "t_us,re,im,abs2\n";
    char buf[128];
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& s = trace.samples[i];
        std::snprintf(buf, sizeof buf, "%.6f,%.9g,%.9g,%.9g\n", trace.t_us(i), s.real(), s.imag(),
                      std::norm(s));
        out << buf;
    }
}

void write_trace_csv_file(const TimeTrace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    write_trace_csv(trace, f);
}

}  // namespace afc
