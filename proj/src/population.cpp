#include "afc/population.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace afc {

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

void SpectralGrid::validate() const {
    if (!(nu_min_mhz < nu_max_mhz))
        throw std::invalid_argument("grid: nu_min must be below nu_max");
    if (!(step_mhz > 0) || !std::isfinite(step_mhz))
        throw std::invalid_argument("grid: step must be positive");
}

std::size_t SpectralGrid::size() const {
    return static_cast<std::size_t>(std::floor((nu_max_mhz - nu_min_mhz) / step_mhz + 0.5)) + 1;
}

double PopulationField::total_population() const {
    double sum = 0.0;
    for (const auto& p : occupations) sum += p[0] + p[1] + p[2];
    return sum;
}

void PopulationField::validate() const {
    grid.validate();
    if (occupations.size() != grid.size())
        throw std::invalid_argument("population: occupation array does not match grid");
    for (const auto& p : occupations) {
        double sum = 0.0;
        for (double v : p) {
            if (v < -1e-12 || v > 1.0 + 1e-9 || !std::isfinite(v))
                throw std::invalid_argument("population: occupation out of [0,1]");
            sum += v;
        }
        if (sum > 1.0 + 1e-9)
            throw std::invalid_argument("population: per-class occupations sum above 1");
    }
}

double AbsorptionSpectrum::max_depth() const {
    double m = 0.0;
    for (double v : d) m = std::max(m, v);
    return m;
}

PopulationField uniform_field(const SpectralGrid& grid, double background_depth_d0,
                              const HyperfineScheme& scheme) {
    grid.validate();
    if (!(background_depth_d0 > 0))
        throw std::invalid_argument("uniform_field: d0 must be positive");
    PopulationField f;
    f.grid = grid;
    f.occupations.assign(grid.size(), {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    // Interior depth of the flat line is density * (1/3) * sum of all strengths.
    double total = 0.0;
    for (const auto& row : scheme.oscillator_strengths)
        for (double v : row) total += v;
    f.class_density = background_depth_d0 * 3.0 / total;
    return f;
}

AbsorptionSpectrum synthesize_absorption(
    const PopulationField& field, const HyperfineScheme& scheme,
    const SpectralGrid& probe_grid,
    const std::optional<std::vector<TransitionLabel>>& transition_filter,
    bool lorentzian_kernel) {
    probe_grid.validate();
    field.validate();

    // Every probed frequency must be reachable from simulated classes only:
    // the contributing class for transition (g,e) is nu + G(g) - E(e), and the
    // extreme offsets are 0 and total splittings.
    const double g_max = scheme.total_ground_splitting_mhz();
    const double e_max = scheme.total_excited_splitting_mhz();
    if (probe_grid.nu_min_mhz - e_max < field.grid.nu_min_mhz ||
        probe_grid.nu_max_mhz + g_max > field.grid.nu_max_mhz)
        throw std::invalid_argument(
            "synthesize_absorption: probe grid requires ion classes outside the simulated "
            "window");

    std::vector<TransitionLabel> labels;
    if (transition_filter) {
        labels = *transition_filter;
    } else {
        for (auto g : all_ground_levels)
            for (auto e : all_excited_levels) labels.push_back({g, e});
    }

    AbsorptionSpectrum spec;
    spec.grid = probe_grid;
    spec.d.assign(probe_grid.size(), field.background_depth);
    {
        std::ostringstream ctx;
        if (!transition_filter) {
            ctx << "all";
        } else {
            for (size_t i = 0; i < labels.size(); ++i)
                ctx << (i ? "+" : "") << to_string(labels[i]);
        }
        spec.transition_context = ctx.str();
    }

    const double cs = field.grid.step_mhz;
    const double ps = probe_grid.step_mhz;
    const std::size_t n_cls = field.grid.size();
    const std::size_t n_probe = probe_grid.size();

    for (TransitionLabel t : labels) {
        const double off = -scheme.ground_offset_mhz(t.ground) + scheme.excited_offset_mhz(t.excited);
        const double s = scheme.strength(t);
        const int gi = static_cast<int>(t.ground);
        for (std::size_t i = 0; i < n_cls; ++i) {
            const double occ = field.occupations[i][gi];
            if (occ <= 0.0) continue;
            const double nu = field.grid.nu(i) + off;
            const double x = (nu - probe_grid.nu_min_mhz) / ps;
            const double fl = std::floor(x);
            const long i0 = static_cast<long>(fl);
            const double frac = x - fl;
            const double area = field.class_density * occ * s * cs / ps;
            if (i0 >= 0 && i0 < static_cast<long>(n_probe))
                spec.d[static_cast<std::size_t>(i0)] += area * (1.0 - frac);
            if (i0 + 1 >= 0 && i0 + 1 < static_cast<long>(n_probe))
                spec.d[static_cast<std::size_t>(i0) + 1] += area * frac;
        }
    }

    if (lorentzian_kernel) {
        // Discrete Lorentzian of the homogeneous width; only meaningful when
        // the width is at least comparable to the grid step.
        const double w = scheme.homogeneous_linewidth_khz * 1e-3;  // MHz
        const int half = std::max(1, static_cast<int>(std::ceil(5.0 * w / ps)));
        std::vector<double> kern(2 * half + 1);
        double norm = 0.0;
        for (int k = -half; k <= half; ++k) {
            double v = 1.0 / (1.0 + std::pow(2.0 * k * ps / w, 2));
            kern[k + half] = v;
            norm += v;
        }
        for (auto& v : kern) v /= norm;
        std::vector<double> out(spec.d.size(), 0.0);
        for (std::size_t i = 0; i < spec.d.size(); ++i) {
            if (spec.d[i] == 0.0) continue;
            for (int k = -half; k <= half; ++k) {
                long j = static_cast<long>(i) + k;
                if (j >= 0 && j < static_cast<long>(out.size()))
                    out[static_cast<std::size_t>(j)] += spec.d[i] * kern[k + half];
            }
        }
        spec.d = std::move(out);
    }
    return spec;
}

namespace {

// integral of a unit-peak Gaussian with FWHM gamma over [a, b]
double gauss_area(double a, double b, double sigma) {
    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    return sigma * std::sqrt(std::numbers::pi / 2.0) *
           (std::erf(b * inv) - std::erf(a * inv));
}

}  // namespace

AbsorptionSpectrum make_gaussian_comb(const SpectralGrid& grid, double peak_d,
                                      double gamma_khz, double delta_mhz, int n_peaks,
                                      double center_mhz, double supergauss_order) {
    grid.validate();
    if (!(peak_d >= 0)) throw std::invalid_argument("comb: peak depth must be >= 0");
    if (!(gamma_khz > 0)) throw std::invalid_argument("comb: gamma must be positive");
    if (n_peaks < 1) throw std::invalid_argument("comb: need at least one peak");

    AbsorptionSpectrum spec;
    spec.grid = grid;
    spec.d.assign(grid.size(), 0.0);
    spec.transition_context = "synthetic";

    const double gamma = gamma_khz * 1e-3;
    const double ps = grid.step_mhz;

    if (supergauss_order == 1.0) {
        const double sigma = gamma / (2.0 * std::sqrt(2.0 * kLn2));
        for (int k = 0; k < n_peaks; ++k) {
            const double c = center_mhz + k * delta_mhz;
            for (std::size_t i = 0; i < spec.d.size(); ++i) {
                const double lo = grid.nu(i) - c - ps / 2.0;
                spec.d[i] += peak_d * gauss_area(lo, lo + ps, sigma) / ps;
            }
        }
    } else {
        // super-Gaussian exp(-ln2 * (2x/gamma)^(2n)); point-sampled
        for (int k = 0; k < n_peaks; ++k) {
            const double c = center_mhz + k * delta_mhz;
            for (std::size_t i = 0; i < spec.d.size(); ++i) {
                const double x = 2.0 * (grid.nu(i) - c) / gamma;
                spec.d[i] += peak_d * std::exp(-kLn2 * std::pow(x * x, supergauss_order));
            }
        }
    }
    return spec;
}

AbsorptionSpectrum make_comb_effective_depth(const SpectralGrid& grid, double d_tilde,
                                             double finesse, double delta_mhz, int n_peaks,
                                             double center_mhz) {
    if (!(d_tilde >= 0)) throw std::invalid_argument("comb: d_tilde must be >= 0");
    if (!(finesse > 1)) throw std::invalid_argument("comb: finesse must exceed 1");
    const double gamma_mhz = delta_mhz / finesse;
    // one Gaussian of FWHM gamma has area peak * gamma * sqrt(pi / (4 ln 2));
    // choose the peak so the period average equals d_tilde exactly
    const double peak = d_tilde * delta_mhz / (gamma_mhz * std::sqrt(std::numbers::pi / (4.0 * kLn2)));
    const double first = center_mhz - 0.5 * (n_peaks - 1) * delta_mhz;
    return make_gaussian_comb(grid, peak, gamma_mhz * 1e3, delta_mhz, n_peaks, first);
}

void write_spectrum_csv(const AbsorptionSpectrum& spec, std::ostream& out) {
    out << "nu_MHz,d\n";
    char buf[64];
    for (std::size_t i = 0; i < spec.d.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f,%.9g\n", spec.grid.nu(i), spec.d[i]);
        out << buf;
    }
}

void write_spectrum_csv_file(const AbsorptionSpectrum& spec, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    write_spectrum_csv(spec, f);
}

AbsorptionSpectrum read_spectrum_csv(std::istream& in) {
    std::string line;
    std::vector<double> nu, d;
    while (std::getline(in, line)) {
        if (line.empty() || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        double a, b;
        if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) == 2) {
            nu.push_back(a);
            d.push_back(b);
        }
    }
    if (nu.size() < 2) throw std::runtime_error("spectrum CSV: fewer than 2 samples");
    AbsorptionSpectrum spec;
    spec.grid.nu_min_mhz = nu.front();
    spec.grid.nu_max_mhz = nu.back();
    spec.grid.step_mhz = (nu.back() - nu.front()) / static_cast<double>(nu.size() - 1);
    spec.d = std::move(d);
    spec.transition_context = "file";
    return spec;
}

AbsorptionSpectrum read_spectrum_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return read_spectrum_csv(f);
}

void save_population(const PopulationField& field, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << "# afc-popfield v1\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "# density %.17g background %.17g\n", field.class_density,
                  field.background_depth);
    f << buf << "nu_MHz,p_12g,p_32g,p_52g\n";
    for (std::size_t i = 0; i < field.occupations.size(); ++i) {
        const auto& p = field.occupations[i];
        std::snprintf(buf, sizeof buf, "%.6f,%.17g,%.17g,%.17g\n", field.grid.nu(i), p[0], p[1],
                      p[2]);
        f << buf;
    }
}

PopulationField load_population(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line) || line.rfind("# afc-popfield v1", 0) != 0)
        throw std::runtime_error("population snapshot: bad or missing version header");
    PopulationField field;
    std::vector<double> nu;
    while (std::getline(f, line)) {
        if (line.rfind("# density", 0) == 0) {
            std::sscanf(line.c_str(), "# density %lf background %lf", &field.class_density,
                        &field.background_depth);
            continue;
        }
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0])))
            continue;
        double x, a, b, c;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x, &a, &b, &c) == 4) {
            nu.push_back(x);
            field.occupations.push_back({a, b, c});
        }
    }
    if (nu.size() < 2) throw std::runtime_error("population snapshot: too few rows");
    field.grid.nu_min_mhz = nu.front();
    field.grid.nu_max_mhz = nu.back();
    field.grid.step_mhz = (nu.back() - nu.front()) / static_cast<double>(nu.size() - 1);
    field.validate();
    return field;
}

}  // namespace afc
