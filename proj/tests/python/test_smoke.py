"""Smoke tests of the python bindings: theory values, a comb fit round trip
and one small echo propagation."""

import math
import os

import pytest

import afcsim as a

DATA_DIR = os.environ.get("AFC_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def test_analytic_values():
    assert a.transmission(2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert a.dephasing_factor(8.0) == pytest.approx(0.9458981050920435, rel=1e-12)
    d_star, eta_star = a.optimal_depth(1e9)
    assert d_star == 2.0
    assert eta_star == pytest.approx(4 * math.exp(-2.0), rel=1e-9)

    p = a.CombParams()
    p.d, p.gamma_khz, p.delta_mhz, p.n_peaks = 10.0, 150.0, 1.2, 4
    assert p.finesse() == pytest.approx(8.0)
    assert a.effective_depth(p) == pytest.approx(1.25)
    assert a.echo_efficiency(p) == pytest.approx(0.423444, rel=1e-5)


def test_levels():
    s = a.HyperfineScheme()
    assert a.max_pit_width(s) == pytest.approx(18.1)
    assert a.afc_bandwidth_limit(s) == pytest.approx(4.6)
    t = a.TransitionLabel("1/2g->5/2e")
    assert a.transition_offset(s, 0.0, t) == pytest.approx(9.4)


def test_comb_fit_round_trip():
    grid = a.SpectralGrid(-0.8, 4.4, 0.002)
    comb = a.make_gaussian_comb(grid, 6.0, 175.0, 1.2, 4)
    fit = a.fit_comb(comb)
    assert fit.params.d == pytest.approx(6.0, rel=0.01)
    assert fit.params.gamma_khz == pytest.approx(175.0, rel=0.01)
    assert fit.params.finesse() == pytest.approx(6.9, rel=0.01)
    assert len(fit.peaks) == 4


def test_echo_oracle_point():
    grid = a.SpectralGrid(-32.0, 32.0 - 1 / 64.0, 1 / 64.0)
    comb = a.make_comb_effective_depth(grid, 2.0, 8.0, 1.2, 40)
    pulse = a.InputPulse()
    pulse.fwhm_duration_ns = 200.0
    st = a.PropagationSettings()
    st.time_window_us = 64.0
    out = a.propagate(pulse, comb, st)
    ref = a.propagate(pulse, a.make_gaussian_comb(grid, 0.0, 150.0, 1.2, 1), st)
    tw, ew = a.default_windows(ref, 1.2)
    eff = a.measure_efficiency(out, ref, tw, ew)
    assert eff.transmission == pytest.approx(math.exp(-2.0), rel=0.03)
    deph = a.dephasing_factor(8.0)
    assert eff.eta == pytest.approx(4 * math.exp(-2.0) * deph * deph, rel=0.01)
    # echo one comb period after the transmitted pulse
    gap = out.centroid_us(*ew) - out.centroid_us(*tw)
    assert gap == pytest.approx(1 / 1.2, rel=0.01)


def test_sequence_parse_and_pit_reservoir():
    table, program = a.load_sequence_file(os.path.join(DATA_DIR, "table1_pit.seq"))
    assert len(table) == 10
    assert len(program) == 4

    cfg = a.load_config_file(os.path.join(DATA_DIR, "fig3_comb.cfg"))
    field = a.prepare_pit(cfg)
    probe = a.SpectralGrid(-1.1, 16.0, 0.02)
    spec = a.synthesize_absorption(field, a.HyperfineScheme(), probe)
    assert spec.max_depth() < 0.6
