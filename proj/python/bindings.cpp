#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afc/analytic.hpp"
#include "afc/config.hpp"
#include "afc/levels.hpp"
#include "afc/population.hpp"
#include "afc/probe.hpp"
#include "afc/propagation.hpp"
#include "afc/pumping.hpp"
#include "afc/runner.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace afc;

PYBIND11_MODULE(_core, m) {
    m.doc() = "atomic-frequency-comb memory simulator (C++ core)";

    py::enum_<GroundLevel>(m, "GroundLevel")
        .value("g12", GroundLevel::g12)
        .value("g32", GroundLevel::g32)
        .value("g52", GroundLevel::g52);
    py::enum_<ExcitedLevel>(m, "ExcitedLevel")
        .value("e12", ExcitedLevel::e12)
        .value("e32", ExcitedLevel::e32)
        .value("e52", ExcitedLevel::e52);

    py::class_<TransitionLabel>(m, "TransitionLabel")
        .def(py::init([](const std::string& s) { return parse_transition_label(s); }))
        .def(py::init<GroundLevel, ExcitedLevel>())
        .def_readwrite("ground", &TransitionLabel::ground)
        .def_readwrite("excited", &TransitionLabel::excited)
        .def("__repr__", [](TransitionLabel t) { return to_string(t); });

    py::class_<HyperfineScheme>(m, "HyperfineScheme")
        .def(py::init<>())
        .def_readwrite("ground_spacings_mhz", &HyperfineScheme::ground_spacings_mhz)
        .def_readwrite("excited_spacings_mhz", &HyperfineScheme::excited_spacings_mhz)
        .def_readwrite("oscillator_strengths", &HyperfineScheme::oscillator_strengths)
        .def_readwrite("excited_lifetime_us", &HyperfineScheme::excited_lifetime_us)
        .def("validate", &HyperfineScheme::validate)
        .def("strength",
             py::overload_cast<TransitionLabel>(&HyperfineScheme::strength, py::const_))
        .def("branching_ratios", &HyperfineScheme::branching_ratios);

    m.def("transition_offset", &transition_offset, "scheme"_a, "class_detuning_mhz"_a, "label"_a);
    m.def("max_pit_width", &max_pit_width);
    m.def("afc_bandwidth_limit", &afc_bandwidth_limit);

    py::class_<SpectralGrid>(m, "SpectralGrid")
        .def(py::init<double, double, double>(), "nu_min_mhz"_a, "nu_max_mhz"_a, "step_mhz"_a)
        .def_readwrite("nu_min_mhz", &SpectralGrid::nu_min_mhz)
        .def_readwrite("nu_max_mhz", &SpectralGrid::nu_max_mhz)
        .def_readwrite("step_mhz", &SpectralGrid::step_mhz)
        .def("__len__", &SpectralGrid::size)
        .def("nu", &SpectralGrid::nu);

    py::class_<PopulationField>(m, "PopulationField")
        .def_readwrite("grid", &PopulationField::grid)
        .def_readwrite("occupations", &PopulationField::occupations)
        .def_readonly("class_density", &PopulationField::class_density)
        .def("total_population", &PopulationField::total_population);

    py::class_<AbsorptionSpectrum>(m, "AbsorptionSpectrum")
        .def_readwrite("grid", &AbsorptionSpectrum::grid)
        .def_readwrite("d", &AbsorptionSpectrum::d)
        .def_readonly("transition_context", &AbsorptionSpectrum::transition_context)
        .def("max_depth", &AbsorptionSpectrum::max_depth)
        .def("nu", [](const AbsorptionSpectrum& s) {
            std::vector<double> out(s.d.size());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.grid.nu(i);
            return out;
        });

    m.def("uniform_field", &uniform_field, "grid"_a, "d0"_a, "scheme"_a = HyperfineScheme{});
    m.def("synthesize_absorption", &synthesize_absorption, "field"_a, "scheme"_a, "probe_grid"_a,
          "transition_filter"_a = std::nullopt, "lorentzian_kernel"_a = false);
    m.def("make_gaussian_comb", &make_gaussian_comb, "grid"_a, "peak_d"_a, "gamma_khz"_a,
          "delta_mhz"_a, "n_peaks"_a, "center_mhz"_a = 0.0, "supergauss_order"_a = 1.0);
    m.def("make_comb_effective_depth", &make_comb_effective_depth, "grid"_a, "d_tilde"_a,
          "finesse"_a, "delta_mhz"_a, "n_peaks"_a, "center_mhz"_a = 0.0);

    // pumping
    py::class_<PulseSpec>(m, "PulseSpec")
        .def(py::init<>())
        .def_readwrite("name", &PulseSpec::name)
        .def_readwrite("nu_start_mhz", &PulseSpec::nu_start_mhz)
        .def_readwrite("nu_end_mhz", &PulseSpec::nu_end_mhz)
        .def_readwrite("target", &PulseSpec::target)
        .def_readwrite("relative_power", &PulseSpec::relative_power)
        .def_readwrite("center_mhz", &PulseSpec::center_mhz)
        .def_readwrite("chirp_width_khz", &PulseSpec::chirp_width_khz)
        .def_readwrite("transfer_efficiency", &PulseSpec::transfer_efficiency);
    py::class_<PumpingModel>(m, "PumpingModel")
        .def(py::init<>())
        .def_readwrite("saturation_kappa", &PumpingModel::saturation_kappa)
        .def_readwrite("edge_margin_mhz", &PumpingModel::edge_margin_mhz)
        .def_readwrite("profile_scale", &PumpingModel::profile_scale)
        .def_readwrite("burnback_order", &PumpingModel::burnback_order)
        .def_readwrite("background_per_power", &PumpingModel::background_per_power);
    py::class_<PulseTable>(m, "PulseTable").def("__len__", [](const PulseTable& t) {
        return t.pulses.size();
    });
    py::class_<SequenceProgram>(m, "SequenceProgram")
        .def_readonly("inter_pulse_wait_ms", &SequenceProgram::inter_pulse_wait_ms)
        .def("__len__", [](const SequenceProgram& p) { return p.blocks.size(); });
    m.def("parse_sequence",
          [](const std::string& text) { return parse_sequence(text); });
    m.def("load_sequence_file", &load_sequence_file);
    m.def("run_program",
          [](PopulationField& field, const HyperfineScheme& scheme, const PulseTable& table,
             const SequenceProgram& program, const PumpingModel& model) {
              run_program(field, scheme, table, program, model, nullptr);
          },
          "field"_a, "scheme"_a, "table"_a, "program"_a, "model"_a = PumpingModel{});
    m.def("create_afc",
          [](PopulationField& field, const HyperfineScheme& scheme, int n_peaks, double delta_mhz,
             double chirp_width_khz, double power, const PumpingModel& model, double center0) {
              std::vector<std::string> warnings;
              create_afc(field, scheme, n_peaks, delta_mhz, chirp_width_khz, power, model,
                         &warnings, center0);
              return warnings;
          },
          "field"_a, "scheme"_a, "n_peaks"_a, "delta_mhz"_a, "chirp_width_khz"_a, "power"_a,
          "model"_a = PumpingModel{}, "center0_mhz"_a = 0.0);

    // analytic
    py::class_<CombParams>(m, "CombParams")
        .def(py::init<>())
        .def_readwrite("d", &CombParams::d)
        .def_readwrite("gamma_khz", &CombParams::gamma_khz)
        .def_readwrite("delta_mhz", &CombParams::delta_mhz)
        .def_readwrite("n_peaks", &CombParams::n_peaks)
        .def("finesse", &CombParams::finesse);
    m.def("effective_depth", &effective_depth);
    m.def("transmission", &transmission);
    m.def("dephasing_factor", &dephasing_factor);
    m.def("echo_efficiency", &echo_efficiency);
    m.def("echo_efficiency_effective", &echo_efficiency_effective, "d_tilde"_a, "finesse"_a);
    m.def("amplitude_decay", &amplitude_decay, "t_us"_a, "gamma_khz"_a);
    m.def("optimal_depth", [](double finesse) {
        Optimum o = optimal_depth(finesse);
        return std::make_pair(o.d_tilde, o.eta);
    });

    // propagation
    py::class_<InputPulse>(m, "InputPulse")
        .def(py::init<>())
        .def_readwrite("fwhm_duration_ns", &InputPulse::fwhm_duration_ns)
        .def_readwrite("carrier_detuning_mhz", &InputPulse::carrier_detuning_mhz)
        .def_readwrite("amplitude", &InputPulse::amplitude)
        .def("spectral_fwhm_mhz", &InputPulse::spectral_fwhm_mhz);
    py::class_<TimeTrace>(m, "TimeTrace")
        .def_readonly("t0_us", &TimeTrace::t0_us)
        .def_readonly("dt_ns", &TimeTrace::dt_ns)
        .def_readonly("samples", &TimeTrace::samples)
        .def("energy", &TimeTrace::energy, "a_us"_a = -1e30, "b_us"_a = 1e30)
        .def("peak_time_us", &TimeTrace::peak_time_us)
        .def("centroid_us", &TimeTrace::centroid_us);
    py::class_<PropagationSettings>(m, "PropagationSettings")
        .def(py::init<>())
        .def_readwrite("time_window_us", &PropagationSettings::time_window_us)
        .def_readwrite("min_span_mhz", &PropagationSettings::min_span_mhz)
        .def_readwrite("input_center_us", &PropagationSettings::input_center_us)
        .def_readwrite("include_dispersion", &PropagationSettings::include_dispersion);
    m.def("transfer_function", &transfer_function, "spectrum"_a, "include_dispersion"_a = true);
    m.def("propagate", &propagate, "pulse"_a, "spectrum"_a,
          "settings"_a = PropagationSettings{});
    py::class_<EfficiencyResult>(m, "EfficiencyResult")
        .def_readonly("eta", &EfficiencyResult::eta)
        .def_readonly("transmission", &EfficiencyResult::transmission)
        .def_readonly("warnings", &EfficiencyResult::warnings);
    m.def("measure_efficiency", &measure_efficiency, "out"_a, "reference"_a,
          "transmit_window_us"_a, "echo_window_us"_a);
    m.def("default_windows", [](const TimeTrace& reference, double delta_mhz) {
        EchoWindows w = default_windows(reference, delta_mhz);
        return std::make_pair(w.transmit, w.echo);
    });

    // probe
    m.def("scan_spectrum", &scan_spectrum, "field"_a, "scheme"_a, "transition"_a, "nu_lo_mhz"_a,
          "nu_hi_mhz"_a, "n_points"_a);
    m.def("infer_strong_depth", &infer_strong_depth, "weak_spec"_a, "strength_ratio"_a,
          "axis_shift_mhz"_a);
    py::class_<PeakFit>(m, "PeakFit")
        .def_readonly("center_mhz", &PeakFit::center_mhz)
        .def_readonly("amplitude", &PeakFit::amplitude)
        .def_readonly("fwhm_khz", &PeakFit::fwhm_khz)
        .def_readonly("residual_rms", &PeakFit::residual_rms);
    py::class_<CombFit>(m, "CombFit")
        .def_readonly("params", &CombFit::params)
        .def_readonly("peaks", &CombFit::peaks)
        .def_readonly("residual_rms", &CombFit::residual_rms);
    m.def("fit_comb", [](const AbsorptionSpectrum& spec) { return fit_comb(spec); });

    // experiment runners
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("d0", &ExperimentConfig::d0)
        .def_readwrite("n_peaks", &ExperimentConfig::n_peaks)
        .def_readwrite("delta_mhz", &ExperimentConfig::delta_mhz)
        .def_readwrite("chirp_width_khz", &ExperimentConfig::chirp_width_khz)
        .def_readwrite("power", &ExperimentConfig::power)
        .def_readwrite("workers", &ExperimentConfig::workers);
    m.def("load_config_file", &load_config_file);
    py::class_<RunArtifacts>(m, "RunArtifacts")
        .def_readonly("files", &RunArtifacts::files)
        .def_readonly("notes", &RunArtifacts::notes);
    m.def("run_pit", &run_pit, "config"_a, "outdir"_a);
    m.def("run_comb", &run_comb, "config"_a, "outdir"_a);
    m.def("run_echo", &run_echo, "config"_a, "outdir"_a);
    m.def("run_sweep", &run_sweep, "config"_a, "outdir"_a);
    m.def("run_fit", &run_fit, "spectrum_csv"_a, "outdir"_a);
    m.def("prepare_pit", [](const ExperimentConfig& cfg) {
        return prepare_pit(cfg, nullptr);
    });
}
