import math

import numpy as np
import pytest

from fiberqed.linear_response import SpectrumResult, transmission_spectrum
from fiberqed.normal_modes import decompose, peak_find, reduced_spectrum
from fiberqed.params import PhysicalConfig, derive_rates, mhz, to_mhz
from dataclasses import replace

CFG = PhysicalConfig()
RATES = derive_rates(CFG)


def test_dark_mode_couplings_frozen():
    s = decompose(RATES, CFG.g1_eff, CFG.g2_eff)
    assert to_mhz(s.gd1) == pytest.approx(4.323932636226303, rel=1e-12)
    assert to_mhz(s.gd2) == pytest.approx(5.8370074299854116, rel=1e-12)
    assert to_mhz(math.hypot(s.gd1, s.gd2)) == pytest.approx(7.264093142321885, rel=1e-12)
    assert to_mhz(s.rabi_splitting) == pytest.approx(7.192521292934409, rel=1e-12)
    assert s.resolved


def test_bright_splittings_across_fiber_lengths():
    # sqrt(2)*v_tilde per fiber length, against the rounded quoted values
    for lf, expected in ((0.83, 14.7), (1.23, 12.1), (2.27, 8.9)):
        r = derive_rates(replace(CFG, Lf=lf))
        s = decompose(r, CFG.g1_eff, CFG.g2_eff)
        assert to_mhz(s.splitting_bright) == pytest.approx(expected, abs=0.05)
        assert s.splitting_bright == pytest.approx(math.sqrt(2.0) * s.v_tilde, rel=1e-15)


def test_symmetric_chain():
    v = mhz(8.0)
    g = mhz(5.0)
    r = replace(RATES, v1=v, v2=v)
    s = decompose(r, g, g)
    assert s.gd1 == pytest.approx(g / math.sqrt(2.0), rel=1e-15)
    assert s.gd2 == pytest.approx(g / math.sqrt(2.0), rel=1e-15)
    assert math.hypot(s.gd1, s.gd2) == pytest.approx(g, rel=1e-15)


def test_lf_invariance_of_dark_couplings():
    values = []
    for lf in (0.83, 1.23, 2.27):
        r = derive_rates(replace(CFG, Lf=lf))
        s = decompose(r, CFG.g1_eff, CFG.g2_eff)
        values.append((s.gd1, s.gd2))
    for gd1, gd2 in values[1:]:
        assert abs(gd1 - values[0][0]) <= 1e-12 * values[0][0]
        assert abs(gd2 - values[0][1]) <= 1e-12 * values[0][1]


def test_mode_vectors_orthogonal():
    s = decompose(RATES, CFG.g1_eff, CFG.g2_eff)
    m = s.mode_vectors
    assert np.max(np.abs(m @ m.T - np.eye(3))) < 1e-12
    assert m[0, 2] == 0.0  # dark row has no fiber weight


def test_decay_rate_combinations():
    s = decompose(RATES, CFG.g1_eff, CFG.g2_eff)
    v1, v2 = RATES.v1, RATES.v2
    two_vt2 = v1**2 + v2**2
    assert s.kappa_d == pytest.approx(
        (v2**2 * RATES.kappa_1 + v1**2 * RATES.kappa_2) / two_vt2, rel=1e-14
    )
    assert s.kappa_plus == pytest.approx(
        0.5 * (RATES.kappa_bloss + (v1**2 * RATES.kappa_1 + v2**2 * RATES.kappa_2) / two_vt2),
        rel=1e-14,
    )
    assert s.kappa_plus == s.kappa_minus


def test_rabi_radicand_simplification():
    # kappa_d == gamma_perp makes the splitting exactly sqrt(gd1^2+gd2^2)
    s = decompose(RATES, CFG.g1_eff, CFG.g2_eff)
    r = replace(RATES, gamma_perp=s.kappa_d)
    s2 = decompose(r, CFG.g1_eff, CFG.g2_eff)
    assert s2.rabi_splitting == pytest.approx(math.hypot(s2.gd1, s2.gd2), rel=1e-15)


def test_unresolved_regime_clamps_to_zero():
    r = replace(RATES, gamma_perp=mhz(50.0))
    s = decompose(r, mhz(0.1), mhz(0.1))
    assert s.rabi_splitting == 0.0
    assert not s.resolved


def test_degenerate_input_rejected():
    with pytest.raises(ValueError):
        decompose(replace(RATES, v1=0.0, v2=0.0), CFG.g1_eff, CFG.g2_eff)


def test_reduced_spectrum_doublet_frozen():
    s = decompose(RATES, CFG.g1_eff, CFG.g2_eff)
    grid = np.linspace(mhz(-25.0), mhz(25.0), 8001)
    peaks = peak_find(reduced_spectrum(s, RATES, grid=grid))
    assert len(peaks) == 2
    assert to_mhz(peaks[0][0]) == pytest.approx(-7.441564, abs=1e-3)
    assert to_mhz(peaks[1][0]) == pytest.approx(7.441564, abs=1e-3)


def test_reduced_empty_cavity_single_peak():
    s = decompose(RATES, 0.0, 0.0)
    spec = reduced_spectrum(s, RATES, grid=np.linspace(mhz(-25.0), mhz(25.0), 2001))
    peaks = peak_find(spec)
    assert len(peaks) == 1
    assert peaks[0][0] == pytest.approx(0.0, abs=mhz(0.01))
    # slightly above 1: the dropped bright modes lower the full-model
    # normalization flux relative to the bare dark mode
    assert peaks[0][1] == pytest.approx(1.0123, abs=2e-3)


def test_full_vs_reduced_pointwise():
    s = decompose(RATES, CFG.g1_eff, CFG.g2_eff)
    grid = np.linspace(mhz(-8.0), mhz(8.0), 801)
    red = reduced_spectrum(s, RATES, grid=grid)
    full = transmission_spectrum(RATES, CFG.g1_eff, CFG.g2_eff, grid=grid)
    assert np.max(np.abs(full.transmission - red.transmission)) < 0.05


def test_reduced_peaks_invariant_under_lf():
    positions = []
    for lf in (0.83, 1.23, 2.27):
        r = derive_rates(replace(CFG, Lf=lf))
        s = decompose(r, CFG.g1_eff, CFG.g2_eff)
        grid = np.linspace(mhz(-15.0), mhz(15.0), 4001)
        peaks = peak_find(reduced_spectrum(s, r, grid=grid))
        positions.append([p for p, _ in peaks])
    for pos in positions[1:]:
        assert np.allclose(pos, positions[0], atol=mhz(0.01))


def test_full_model_inner_doublet_frozen():
    grid = np.linspace(mhz(-25.0), mhz(25.0), 8001)
    spec = transmission_spectrum(RATES, CFG.g1_eff, CFG.g2_eff, grid=grid)
    peaks = peak_find(spec)
    assert len(peaks) == 4
    # inner pair is pulled outward of sqrt(gd1^2+gd2^2) by the bright modes
    assert to_mhz(peaks[1][0]) == pytest.approx(-8.012621, abs=1e-3)
    assert to_mhz(peaks[2][0]) == pytest.approx(8.012621, abs=1e-3)


def test_peak_find_edge_cases():
    flat = SpectrumResult(
        detunings=np.linspace(0.0, 1.0, 11),
        transmission=np.ones(11),
        normalization_flux=1.0,
    )
    assert peak_find(flat) == []

    # parabolic refinement recovers an off-grid gaussian center
    x = np.linspace(-1.0, 1.0, 41)
    center = 0.1234
    spec = SpectrumResult(
        detunings=x,
        transmission=np.exp(-((x - center) ** 2) / 0.08),
        normalization_flux=1.0,
    )
    peaks = peak_find(spec)
    assert len(peaks) == 1
    assert peaks[0][0] == pytest.approx(center, abs=2e-3)
