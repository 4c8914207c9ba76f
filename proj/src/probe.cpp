#include "afc/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace afc {

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

AbsorptionSpectrum scan_spectrum(const PopulationField& field, const HyperfineScheme& scheme,
                                 TransitionLabel transition, double nu_lo_mhz, double nu_hi_mhz,
                                 int n_points) {
    if (n_points < 1) throw std::invalid_argument("scan: need at least one point");
    SpectralGrid probe;
    if (n_points == 1) {
        const double mid = 0.5 * (nu_lo_mhz + nu_hi_mhz);
        probe.nu_min_mhz = mid;
        probe.nu_max_mhz = mid + 1e-9;
        probe.step_mhz = 1e-9;
        AbsorptionSpectrum one =
            synthesize_absorption(field, scheme, probe, std::vector<TransitionLabel>{transition});
        one.d.resize(1);
        one.grid.nu_max_mhz = mid;
        return one;
    }
    if (!(nu_lo_mhz < nu_hi_mhz)) throw std::invalid_argument("scan: empty range");
    probe.nu_min_mhz = nu_lo_mhz;
    probe.nu_max_mhz = nu_hi_mhz;
    probe.step_mhz = (nu_hi_mhz - nu_lo_mhz) / static_cast<double>(n_points - 1);
    return synthesize_absorption(field, scheme, probe, std::vector<TransitionLabel>{transition});
}

AbsorptionSpectrum infer_strong_depth(const AbsorptionSpectrum& weak_spec, double strength_ratio,
                                      double axis_shift_mhz) {
    if (!(strength_ratio > 0))
        throw std::invalid_argument("infer_strong_depth: ratio must be positive");
    AbsorptionSpectrum strong = weak_spec;
    strong.grid.nu_min_mhz += axis_shift_mhz;
    strong.grid.nu_max_mhz += axis_shift_mhz;
    for (auto& v : strong.d) v *= strength_ratio;
    strong.transition_context = "inferred(" + weak_spec.transition_context + ")";
    return strong;
}

double infer_axis_shift(const HyperfineScheme& scheme, TransitionLabel weak,
                        TransitionLabel strong) {
    return transition_offset(scheme, 0.0, strong) - transition_offset(scheme, 0.0, weak);
}

namespace {

struct Window {
    std::size_t lo, hi;  // inclusive sample range
};

// 3-parameter Gaussian fit y = A exp(-4 ln2 (x-c)^2 / w^2) by
// Levenberg-Marquardt on the normal equations.
PeakFit fit_gaussian(const AbsorptionSpectrum& spec, Window win, double a0, double c0, double w0,
                     int max_iter) {
    double A = a0, c = c0, w = w0;
    double lambda = 1e-3;
    const std::size_t n = win.hi - win.lo + 1;

    auto chi2 = [&](double A_, double c_, double w_) {
        double s = 0.0;
        for (std::size_t i = win.lo; i <= win.hi; ++i) {
            const double x = spec.grid.nu(i);
            const double m = A_ * std::exp(-4.0 * kLn2 * (x - c_) * (x - c_) / (w_ * w_));
            const double r = spec.d[i] - m;
            s += r * r;
        }
        return s;
    };

    double best = chi2(A, c, w);
    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        // build J^T J and J^T r
        double jtj[3][3] = {};
        double jtr[3] = {};
        for (std::size_t i = win.lo; i <= win.hi; ++i) {
            const double x = spec.grid.nu(i);
            const double u = (x - c) / w;
            const double e = std::exp(-4.0 * kLn2 * u * u);
            const double m = A * e;
            const double r = spec.d[i] - m;
            const double dA = e;
            const double dc = m * 8.0 * kLn2 * u / w;
            const double dw = m * 8.0 * kLn2 * u * u / w;
            const double grad[3] = {dA, dc, dw};
            for (int a = 0; a < 3; ++a) {
                jtr[a] += grad[a] * r;
                for (int b = 0; b < 3; ++b) jtj[a][b] += grad[a] * grad[b];
            }
        }
        // solve (JtJ + lambda diag) step = Jtr via Cramer
        double M[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) M[a][b] = jtj[a][b] + (a == b ? lambda * jtj[a][a] : 0.0);
        const double det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
        if (std::abs(det) < 1e-300) break;
        auto solve_col = [&](int col) {
            double T[3][3];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) T[a][b] = (b == col) ? jtr[a] : M[a][b];
            return (T[0][0] * (T[1][1] * T[2][2] - T[1][2] * T[2][1]) -
                    T[0][1] * (T[1][0] * T[2][2] - T[1][2] * T[2][0]) +
                    T[0][2] * (T[1][0] * T[2][1] - T[1][1] * T[2][0])) /
                   det;
        };
        const double dA = solve_col(0), dc = solve_col(1), dw = solve_col(2);
        const double A2 = A + dA, c2 = c + dc, w2 = w + dw;
        if (!(w2 > 0) || !(A2 > 0)) {
            lambda *= 10.0;
            continue;
        }
        const double next = chi2(A2, c2, w2);
        if (next < best) {
            const double rel = (best - next) / std::max(best, 1e-300);
            A = A2;
            c = c2;
            w = w2;
            best = next;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-10) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e10) {
                // no downhill step left; the minimum is reached to machine
                // precision (shape misfit shows up in residual_rms instead)
                converged = true;
                break;
            }
        }
    }

    PeakFit fit;
    fit.center_mhz = c;
    fit.amplitude = A;
    fit.fwhm_khz = w * 1e3;
    fit.residual_rms = std::sqrt(best / static_cast<double>(n)) / std::max(A, 1e-300);
    fit.converged = converged || best / static_cast<double>(n) < 1e-20;
    return fit;
}

}  // namespace

CombFit fit_comb(const AbsorptionSpectrum& spec, const FitOptions& options) {
    const std::size_t n = spec.d.size();
    if (n < 5) throw std::runtime_error("fit_comb: spectrum too short");
    const double dmax = spec.max_depth();
    if (!(dmax > 0)) throw std::runtime_error("fit_comb: no peaks (flat spectrum)");
    const double thr = options.detection_threshold * dmax;

    // discrete peak finding: strict local maxima above threshold
    std::vector<std::size_t> peaks_idx;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (spec.d[i] >= thr && spec.d[i] >= spec.d[i - 1] && spec.d[i] > spec.d[i + 1]) {
            // skip plateau duplicates
            if (!peaks_idx.empty() && i - peaks_idx.back() < 3) continue;
            peaks_idx.push_back(i);
        }
    }
    if (peaks_idx.size() < 2)
        throw std::runtime_error("fit_comb: fewer than two peaks detected");

    // spacing estimate from detected maxima
    double spacing = 0.0;
    for (std::size_t k = 1; k < peaks_idx.size(); ++k)
        spacing += spec.grid.nu(peaks_idx[k]) - spec.grid.nu(peaks_idx[k - 1]);
    spacing /= static_cast<double>(peaks_idx.size() - 1);

    CombFit out;
    const double halfwin = 0.5 * spacing;
    for (std::size_t idx : peaks_idx) {
        const double c0 = spec.grid.nu(idx);
        Window win;
        win.lo = static_cast<std::size_t>(std::max(
            0.0, std::floor((c0 - halfwin - spec.grid.nu_min_mhz) / spec.grid.step_mhz)));
        win.hi = std::min(n - 1, static_cast<std::size_t>(std::ceil(
                                     (c0 + halfwin - spec.grid.nu_min_mhz) / spec.grid.step_mhz)));
        // crude width guess: half-max crossing distance
        const double half = spec.d[idx] / 2.0;
        std::size_t l = idx, r = idx;
        while (l > win.lo && spec.d[l] > half) --l;
        while (r < win.hi && spec.d[r] > half) ++r;
        double w0 = std::max((static_cast<double>(r) - static_cast<double>(l)) * spec.grid.step_mhz,
                             2.0 * spec.grid.step_mhz);
        PeakFit f = fit_gaussian(spec, win, spec.d[idx], c0, w0, options.max_iterations);
        if (!f.converged) throw std::runtime_error("fit_comb: peak fit failed to converge");
        out.peaks.push_back(f);
    }

    double amp = 0.0, fwhm = 0.0, res = 0.0;
    for (const auto& p : out.peaks) {
        amp += p.amplitude;
        fwhm += p.fwhm_khz;
        res += p.residual_rms;
    }
    const double np = static_cast<double>(out.peaks.size());
    double delta = 0.0;
    for (std::size_t k = 1; k < out.peaks.size(); ++k)
        delta += out.peaks[k].center_mhz - out.peaks[k - 1].center_mhz;
    delta /= np - 1.0;

    out.params.d = amp / np;
    out.params.gamma_khz = fwhm / np;
    out.params.delta_mhz = delta;
    out.params.n_peaks = static_cast<int>(out.peaks.size());
    out.params.shape = PeakShape::Gaussian;
    out.residual_rms = res / np;
    return out;
}

void write_fit_report(const CombFit& fit, std::ostream& out) {
    out << "peak,center_MHz,amplitude,fwhm_kHz,residual_rms\n";
    char buf[160];
    for (std::size_t i = 0; i < fit.peaks.size(); ++i) {
        const auto& p = fit.peaks[i];
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6g,%.4f,%.3g\n", i, p.center_mhz, p.amplitude,
                      p.fwhm_khz, p.residual_rms);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "summary,d=%.6g,gamma_kHz=%.4f,delta_MHz=%.6f,F=%.4f\n",
                  fit.params.d, fit.params.gamma_khz, fit.params.delta_mhz, fit.params.finesse());
    out << buf;
}

std::string fit_report_string(const CombFit& fit) {
    std::ostringstream ss;
    write_fit_report(fit, ss);
    return ss.str();
}

}  // namespace afc
