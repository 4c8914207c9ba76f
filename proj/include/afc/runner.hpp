#ifndef AFC_RUNNER_HPP
#define AFC_RUNNER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "afc/config.hpp"
#include "afc/probe.hpp"
#include "afc/propagation.hpp"

namespace afc {

// Raised when a run completes but violates its built-in acceptance bound
// (CLI exit code 3).
struct AcceptanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunArtifacts {
    std::vector<std::string> files;   // paths written, in order
    std::vector<std::string> notes;   // human-readable summary lines
};

// theory: CSV table (d, T, eta) for one finesse over a peak-depth range.
void write_theory_table(std::ostream& out, double finesse, double d_min, double d_max,
                        double d_step);

// pit: run the bundled sequence from the uniform line; writes before/after
// spectra and a population snapshot; asserts the pit bound (d < 1% of d0
// over the bundled acceptance interval).
RunArtifacts run_pit(const ExperimentConfig& cfg, const std::string& outdir);

// comb: pit + create_afc; writes comb spectrum (strong transition), the
// weak-transition scan with inferred strong depth, fit report, snapshot.
RunArtifacts run_comb(const ExperimentConfig& cfg, const std::string& outdir);

// echo: reference (empty pit) and comb propagation; writes both traces and
// an efficiency summary with the analytic comparison row.
RunArtifacts run_echo(const ExperimentConfig& cfg, const std::string& outdir);

// sweep: one row per burn-back power with fitted comb parameters, measured
// transmission/efficiency and theory columns at the configured finesses.
RunArtifacts run_sweep(const ExperimentConfig& cfg, const std::string& outdir);

// fit: fit a comb spectrum CSV and write the report.
RunArtifacts run_fit(const std::string& spectrum_csv, const std::string& outdir);

// Writes manifest.json (config echo + output file hashes) into outdir.
void write_manifest(const ExperimentConfig& cfg, const RunArtifacts& artifacts,
                    const std::string& outdir);

// FNV-1a 64-bit content hash, used by the manifest.
unsigned long long fnv1a64_file(const std::string& path);

// Shared by run_* and the acceptance suite: pit field for a config.
PopulationField prepare_pit(const ExperimentConfig& cfg, std::vector<std::string>* warnings);

}  // namespace afc

#endif
