#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "afc/analytic.hpp"
#include "afc/runner.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kSimulation = 2, kAcceptance = 3 };

int guarded(const std::function<afc::RunArtifacts()>& body, const afc::ExperimentConfig* cfg,
            const std::string& outdir) {
    try {
        afc::RunArtifacts art = body();
        for (const auto& n : art.notes) std::cout << n << "\n";
        if (cfg) afc::write_manifest(*cfg, art, outdir);
        for (const auto& f : art.files) std::cout << "wrote " << f << "\n";
        return kOk;
    } catch (const afc::AcceptanceError& e) {
        std::cerr << "acceptance failure: " << e.what() << "\n";
        return kAcceptance;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSimulation;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"atomic-frequency-comb memory simulator"};
    app.require_subcommand(1);

    std::string config_path, outdir = "out", spectrum_path;
    double theory_F = 8.0, theory_dmin = 0.0, theory_dmax = 20.0, theory_dstep = 0.1;
    std::string theory_out;
    int workers = 0;

    CLI::App* theory = app.add_subcommand("theory", "tabulate (d, T, eta) for one finesse");
    theory->add_option("-F,--finesse", theory_F, "comb finesse")->required();
    theory->add_option("--d-min", theory_dmin, "first peak depth");
    theory->add_option("--d-max", theory_dmax, "last peak depth");
    theory->add_option("--d-step", theory_dstep, "depth step");
    theory->add_option("-o,--output", theory_out, "output CSV (default stdout)");

    CLI::App* pit = app.add_subcommand("pit", "burn the spectral pit and emit spectra");
    CLI::App* comb = app.add_subcommand("comb", "prepare the AFC and emit spectra + fit");
    CLI::App* echo = app.add_subcommand("echo", "reference + comb propagation, efficiency");
    CLI::App* sweep = app.add_subcommand("sweep", "efficiency vs burn-back power");
    for (CLI::App* cmd : {pit, comb, echo, sweep}) {
        cmd->add_option("-c,--config", config_path, "experiment config file")->required();
        cmd->add_option("-o,--outdir", outdir, "output directory");
    }
    sweep->add_option("-j,--workers", workers, "sweep worker threads (overrides config)");

    CLI::App* fit = app.add_subcommand("fit", "fit a comb spectrum CSV");
    fit->add_option("spectrum", spectrum_path, "spectrum CSV (nu_MHz,d)")->required();
    fit->add_option("-o,--outdir", outdir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (theory->parsed()) {
        try {
            if (theory_out.empty()) {
                afc::write_theory_table(std::cout, theory_F, theory_dmin, theory_dmax,
                                        theory_dstep);
            } else {
                std::ofstream f(theory_out);
                if (!f) throw std::runtime_error("cannot write '" + theory_out + "'");
                afc::write_theory_table(f, theory_F, theory_dmin, theory_dmax, theory_dstep);
                std::cout << "wrote " << theory_out << "\n";
            }
            return kOk;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kSimulation;
        }
    }

    if (fit->parsed())
        return guarded([&] { return afc::run_fit(spectrum_path, outdir); }, nullptr, outdir);

    afc::ExperimentConfig cfg;
    try {
        cfg = afc::load_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    }
    if (workers > 0) cfg.workers = workers;

    if (pit->parsed()) return guarded([&] { return afc::run_pit(cfg, outdir); }, &cfg, outdir);
    if (comb->parsed()) return guarded([&] { return afc::run_comb(cfg, outdir); }, &cfg, outdir);
    if (echo->parsed()) return guarded([&] { return afc::run_echo(cfg, outdir); }, &cfg, outdir);
    if (sweep->parsed()) return guarded([&] { return afc::run_sweep(cfg, outdir); }, &cfg, outdir);
    return kUsage;
}
