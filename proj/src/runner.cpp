#include "afc/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "afc/analytic.hpp"

namespace afc {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "'");
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

AbsorptionSpectrum scan_all(const PopulationField& field, const HyperfineScheme& scheme,
                            double lo, double hi, double step, bool lorentzian = false) {
    SpectralGrid probe{lo, hi, step};
    return synthesize_absorption(field, scheme, probe, std::nullopt, lorentzian);
}

}  // namespace

void write_theory_table(std::ostream& out, double finesse, double d_min, double d_max,
                        double d_step) {
    if (!(finesse > 1)) throw std::invalid_argument("theory: finesse must exceed 1");
    if (!(d_step > 0) || !(d_min <= d_max)) throw std::invalid_argument("theory: bad d range");
    out << "d,T,eta\n";
    for (double d = d_min; d <= d_max + 1e-12; d += d_step) {
        const double dt = d / finesse;
        out << fmt(d) << ',' << fmt(transmission(dt)) << ','
            << fmt(echo_efficiency_effective(dt, finesse)) << "\n";
    }
}

PopulationField prepare_pit(const ExperimentConfig& cfg, std::vector<std::string>* warnings) {
    if (cfg.sequence_path.empty())
        throw std::runtime_error("config: no pit sequence file given");
    auto [table, program] = load_sequence_file(cfg.sequence_path);
    PopulationField field = uniform_field(cfg.class_grid, cfg.d0, cfg.scheme);
    run_program(field, cfg.scheme, table, program, cfg.pumping, warnings);
    return field;
}

RunArtifacts run_pit(const ExperimentConfig& cfg, const std::string& outdir) {
    ensure_dir(outdir);
    RunArtifacts art;

    PopulationField before = uniform_field(cfg.class_grid, cfg.d0, cfg.scheme);
    const double view_lo = cfg.pit_check_lo_mhz - 4.0;
    const double view_hi = cfg.pit_check_hi_mhz + 4.0;
    AbsorptionSpectrum pre = scan_all(before, cfg.scheme, view_lo, view_hi,
                                      cfg.class_grid.step_mhz, cfg.lorentzian_kernel);
    write_spectrum_csv_file(pre, join(outdir, "pit_before.csv"));
    art.files.push_back(join(outdir, "pit_before.csv"));

    std::vector<std::string> warnings;
    PopulationField field = prepare_pit(cfg, &warnings);
    AbsorptionSpectrum post = scan_all(field, cfg.scheme, view_lo, view_hi,
                                       cfg.class_grid.step_mhz, cfg.lorentzian_kernel);
    write_spectrum_csv_file(post, join(outdir, "pit_after.csv"));
    art.files.push_back(join(outdir, "pit_after.csv"));
    save_population(field, join(outdir, "pit_population.csv"));
    art.files.push_back(join(outdir, "pit_population.csv"));
    for (auto& w : warnings) art.notes.push_back("warning: " + w);

    double worst = 0.0;
    for (std::size_t i = 0; i < post.d.size(); ++i) {
        const double nu = post.grid.nu(i);
        if (nu >= cfg.pit_check_lo_mhz && nu <= cfg.pit_check_hi_mhz)
            worst = std::max(worst, post.d[i]);
    }
    art.notes.push_back("pit residual max d = " + fmt(worst) + " over [" +
                        fmt(cfg.pit_check_lo_mhz) + ", " + fmt(cfg.pit_check_hi_mhz) + "] MHz");
    if (worst >= 0.01 * cfg.d0)
        throw AcceptanceError("pit bound violated: max residual depth " + fmt(worst) +
                              " >= 1% of d0 = " + fmt(0.01 * cfg.d0));
    return art;
}

namespace {

struct CombRun {
    PopulationField field;          // pit + comb
    AbsorptionSpectrum strong_scan; // comb on the storage transition
    CombFit fit;
    std::vector<std::string> warnings;
};

CombRun build_comb(const ExperimentConfig& cfg, const PopulationField& pit, double power) {
    CombRun run{pit, {}, {}, {}};
    create_afc(run.field, cfg.scheme, cfg.n_peaks, cfg.delta_mhz, cfg.chirp_width_khz, power,
               cfg.pumping, &run.warnings, cfg.comb_center_mhz);
    const double span = (cfg.n_peaks - 1) * cfg.delta_mhz;
    const double lo = cfg.comb_center_mhz - 0.6 * cfg.delta_mhz;
    const double hi = cfg.comb_center_mhz + span + 0.6 * cfg.delta_mhz;
    run.strong_scan = scan_spectrum(run.field, cfg.scheme,
                                    {GroundLevel::g12, ExcitedLevel::e12}, lo, hi,
                                    static_cast<int>((hi - lo) / cfg.class_grid.step_mhz) + 1);
    run.fit = fit_comb(run.strong_scan);
    return run;
}

AbsorptionSpectrum propagation_spectrum(const ExperimentConfig& cfg,
                                        const PopulationField& field) {
    // wide enough to include the pit walls on both sides; the propagator
    // continues the edge values outward
    const double lo = cfg.class_grid.nu_min_mhz + cfg.scheme.total_excited_splitting_mhz() + 1.0;
    const double hi = cfg.class_grid.nu_max_mhz - cfg.scheme.total_ground_splitting_mhz() - 1.0;
    return scan_all(field, cfg.scheme, std::max(lo, -20.0), std::min(hi, 30.0),
                    cfg.class_grid.step_mhz, cfg.lorentzian_kernel);
}

}  // namespace

RunArtifacts run_comb(const ExperimentConfig& cfg, const std::string& outdir) {
    ensure_dir(outdir);
    RunArtifacts art;
    std::vector<std::string> warnings;
    PopulationField pit = prepare_pit(cfg, &warnings);
    CombRun comb = build_comb(cfg, pit, cfg.power);
    for (auto& w : comb.warnings) warnings.push_back(w);

    write_spectrum_csv_file(comb.strong_scan, join(outdir, "comb_strong.csv"));
    art.files.push_back(join(outdir, "comb_strong.csv"));

    // weak-transition measurement and the inferred strong depth (the
    // measurement route used when d is too large to probe directly)
    const TransitionLabel weak{GroundLevel::g12, ExcitedLevel::e52};
    const TransitionLabel strong{GroundLevel::g12, ExcitedLevel::e12};
    const double shift = infer_axis_shift(cfg.scheme, weak, strong);
    AbsorptionSpectrum weak_scan = scan_spectrum(
        comb.field, cfg.scheme, weak, comb.strong_scan.grid.nu_min_mhz - shift,
        comb.strong_scan.grid.nu_max_mhz - shift, static_cast<int>(comb.strong_scan.d.size()));
    write_spectrum_csv_file(weak_scan, join(outdir, "comb_weak.csv"));
    art.files.push_back(join(outdir, "comb_weak.csv"));
    const double ratio = cfg.scheme.strength(strong) / cfg.scheme.strength(weak);
    AbsorptionSpectrum inferred = infer_strong_depth(weak_scan, ratio, shift);
    write_spectrum_csv_file(inferred, join(outdir, "comb_inferred.csv"));
    art.files.push_back(join(outdir, "comb_inferred.csv"));

    {
        std::ofstream f(join(outdir, "comb_fit.txt"));
        write_fit_report(comb.fit, f);
    }
    art.files.push_back(join(outdir, "comb_fit.txt"));
    save_population(comb.field, join(outdir, "comb_population.csv"));
    art.files.push_back(join(outdir, "comb_population.csv"));

    for (auto& w : warnings) art.notes.push_back("warning: " + w);
    art.notes.push_back("fit: d=" + fmt(comb.fit.params.d) +
                        " gamma_kHz=" + fmt(comb.fit.params.gamma_khz) +
                        " delta_MHz=" + fmt(comb.fit.params.delta_mhz) +
                        " F=" + fmt(comb.fit.params.finesse()));
    return art;
}

RunArtifacts run_echo(const ExperimentConfig& cfg, const std::string& outdir) {
    ensure_dir(outdir);
    RunArtifacts art;
    std::vector<std::string> warnings;
    PopulationField pit = prepare_pit(cfg, &warnings);

    InputPulse pulse = cfg.pulse;
    pulse.carrier_detuning_mhz = cfg.carrier_mhz();

    AbsorptionSpectrum pit_spec = propagation_spectrum(cfg, pit);
    TimeTrace reference = propagate(pulse, pit_spec, cfg.windows);
    write_trace_csv_file(reference, join(outdir, "trace_reference.csv"));
    art.files.push_back(join(outdir, "trace_reference.csv"));

    CombRun comb = build_comb(cfg, pit, cfg.power);
    for (auto& w : comb.warnings) warnings.push_back(w);
    AbsorptionSpectrum comb_spec = propagation_spectrum(cfg, comb.field);
    TimeTrace out = propagate(pulse, comb_spec, cfg.windows);
    write_trace_csv_file(out, join(outdir, "trace_comb.csv"));
    art.files.push_back(join(outdir, "trace_comb.csv"));

    const EchoWindows win = default_windows(reference, cfg.delta_mhz);
    EfficiencyResult eff = measure_efficiency(out, reference, win.transmit, win.echo);
    for (auto& w : eff.warnings) warnings.push_back(w);

    const double gap_us =
        out.centroid_us(win.echo.first, win.echo.second) -
        out.centroid_us(win.transmit.first, win.transmit.second);

    // analytic route for the same comb parameters
    const CombParams& p = comb.fit.params;
    const double d_tilde = effective_depth(p);
    {
        std::ofstream f(join(outdir, "echo_summary.csv"));
        f << "T_meas,eta_meas,echo_delay_ns,d_fit,gamma_kHz_fit,delta_MHz_fit,F_fit,"
             "d_tilde,T_theory,eta_theory\n";
        f << fmt(eff.transmission) << ',' << fmt(eff.eta) << ',' << fmt(gap_us * 1e3) << ','
          << fmt(p.d) << ',' << fmt(p.gamma_khz) << ',' << fmt(p.delta_mhz) << ','
          << fmt(p.finesse()) << ',' << fmt(d_tilde) << ',' << fmt(transmission(d_tilde)) << ','
          << fmt(echo_efficiency(p)) << "\n";
    }
    art.files.push_back(join(outdir, "echo_summary.csv"));

    for (auto& w : warnings) art.notes.push_back("warning: " + w);
    art.notes.push_back("T = " + fmt(eff.transmission) + ", eta = " + fmt(eff.eta) +
                        ", echo after " + fmt(gap_us * 1e3) + " ns");
    return art;
}

RunArtifacts run_sweep(const ExperimentConfig& cfg, const std::string& outdir) {
    ensure_dir(outdir);
    if (cfg.sweep_powers.empty()) throw std::runtime_error("sweep: empty power list");
    RunArtifacts art;
    std::vector<std::string> warnings;
    PopulationField pit = prepare_pit(cfg, &warnings);

    InputPulse pulse = cfg.pulse;
    pulse.carrier_detuning_mhz = cfg.carrier_mhz();
    AbsorptionSpectrum pit_spec = propagation_spectrum(cfg, pit);
    TimeTrace reference = propagate(pulse, pit_spec, cfg.windows);
    const EchoWindows win = default_windows(reference, cfg.delta_mhz);

    struct Row {
        double power = 0.0;
        bool ok = false;
        std::string error;
        double d = 0.0, gamma = 0.0, delta = 0.0, F = 0.0, T = 0.0, eta = 0.0;
    };
    std::vector<Row> rows(cfg.sweep_powers.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.sweep_powers.size()) return;
            Row& row = rows[i];
            row.power = cfg.sweep_powers[i];
            try {
                CombRun comb = build_comb(cfg, pit, row.power);
                AbsorptionSpectrum comb_spec = propagation_spectrum(cfg, comb.field);
                TimeTrace out = propagate(pulse, comb_spec, cfg.windows);
                EfficiencyResult eff = measure_efficiency(out, reference, win.transmit, win.echo);
                row.d = comb.fit.params.d;
                row.gamma = comb.fit.params.gamma_khz;
                row.delta = comb.fit.params.delta_mhz;
                row.F = comb.fit.params.finesse();
                row.T = eff.transmission;
                row.eta = eff.eta;
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(cfg.workers,
                                                    static_cast<int>(cfg.sweep_powers.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    const std::string path = join(outdir, "sweep.csv");
    {
        std::ofstream f(path);
        f << "power,status,d,gamma_kHz,delta_MHz,F,T_meas,eta_meas";
        for (double fin : cfg.theory_finesses)
            f << ",T_theory_F" << fmt(fin) << ",eta_theory_F" << fmt(fin);
        f << "\n";
        for (const Row& row : rows) {
            f << fmt(row.power) << ',' << (row.ok ? "ok" : "failed");
            if (row.ok) {
                f << ',' << fmt(row.d) << ',' << fmt(row.gamma) << ',' << fmt(row.delta) << ','
                  << fmt(row.F) << ',' << fmt(row.T) << ',' << fmt(row.eta);
                for (double fin : cfg.theory_finesses) {
                    const double dt = row.d / fin;
                    f << ',' << fmt(transmission(dt)) << ','
                      << fmt(echo_efficiency_effective(dt, fin));
                }
            } else {
                f << ",,,,,,";
                for (std::size_t k = 0; k < cfg.theory_finesses.size(); ++k) f << ",,";
            }
            f << "\n";
        }
    }
    art.files.push_back(path);
    for (const Row& row : rows)
        if (!row.ok) art.notes.push_back("power " + fmt(row.power) + " failed: " + row.error);
    for (auto& w : warnings) art.notes.push_back("warning: " + w);
    return art;
}

RunArtifacts run_fit(const std::string& spectrum_csv, const std::string& outdir) {
    ensure_dir(outdir);
    RunArtifacts art;
    AbsorptionSpectrum spec = read_spectrum_csv_file(spectrum_csv);
    CombFit fit = fit_comb(spec);
    const std::string path = join(outdir, "fit_report.txt");
    {
        std::ofstream f(path);
        write_fit_report(fit, f);
    }
    art.files.push_back(path);
    art.notes.push_back("fit: d=" + fmt(fit.params.d) + " gamma_kHz=" + fmt(fit.params.gamma_khz) +
                        " delta_MHz=" + fmt(fit.params.delta_mhz) +
                        " F=" + fmt(fit.params.finesse()));
    return art;
}

unsigned long long fnv1a64_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot hash '" + path + "'");
    unsigned long long h = 1469598103934665603ULL;
    char buf[65536];
    while (f) {
        f.read(buf, sizeof buf);
        const std::streamsize got = f.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

void write_manifest(const ExperimentConfig& cfg, const RunArtifacts& artifacts,
                    const std::string& outdir) {
    nlohmann::json j;
    j["format"] = "afc-manifest v1";
    nlohmann::json conf = nlohmann::json::object();
    for (const auto& [k, v] : cfg.raw) conf[k] = v;
    j["config"] = conf;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& p : artifacts.files) {
        char hex[32];
        std::snprintf(hex, sizeof hex, "%016llx", fnv1a64_file(p));
        outs.push_back({{"path", fs::path(p).filename().string()}, {"fnv1a64", hex}});
    }
    j["outputs"] = outs;
    j["notes"] = artifacts.notes;
    std::ofstream f(join(outdir, "manifest.json"));
    f << j.dump(2) << "\n";
}

}  // namespace afc
