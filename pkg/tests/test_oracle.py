import math

import numpy as np
import pytest
from scipy import special

from fiberqed.linear_response import ProbeSettings
from fiberqed.oracle import (
    LinearSystem,
    adaptive_quadrature,
    bessel_k_series,
    build_linear_system,
    run_validation,
    solve_dense,
)
from fiberqed.params import PhysicalConfig, derive_rates, mhz
from dataclasses import replace

CFG = PhysicalConfig()
RATES = derive_rates(CFG)


def test_system_structure():
    probe = ProbeSettings(mhz(2.0), mhz(1.0), 3.0)
    sys5 = build_linear_system(RATES, probe, CFG.g1_eff, CFG.g2_eff)
    assert sys5.matrix.shape == (5, 5)
    assert np.all(np.real(np.diag(sys5.matrix)) > 0.0)
    assert sys5.rhs[0] == -3.0j
    assert np.all(sys5.rhs[1:] == 0.0)


def test_no_atoms_decouples_coherences():
    probe = ProbeSettings(0.0, 0.0, 1.0)
    amps = solve_dense(build_linear_system(RATES, probe, 0.0, 0.0))
    assert amps.s1 == 0.0 and amps.s2 == 0.0
    assert abs(amps.a1) > 0.0


def test_no_fiber_decouples_cavities():
    rates = replace(RATES, v1=0.0, v2=0.0)
    probe = ProbeSettings(0.0, 0.0, 1.0)
    amps = solve_dense(build_linear_system(rates, probe, CFG.g1_eff, CFG.g2_eff))
    assert amps.b == 0.0
    assert amps.a2 == 0.0 and amps.s2 == 0.0
    assert abs(amps.a1) > 0.0


def test_solve_dense_identity():
    sys5 = LinearSystem(matrix=np.eye(5, dtype=complex), rhs=np.eye(5, dtype=complex)[0])
    amps = solve_dense(sys5)
    assert amps.a1 == 1.0
    assert amps.a2 == amps.b == amps.s1 == amps.s2 == 0.0


def test_solve_dense_random_residual():
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)) + 5.0 * np.eye(5)
        rhs = rng.normal(size=5) + 1j * rng.normal(size=5)
        x = solve_dense(LinearSystem(matrix=m, rhs=rhs))
        vec = np.array([x.a1, x.a2, x.b, x.s1, x.s2])
        assert np.max(np.abs(m @ vec - rhs)) < 1e-12 * np.max(np.abs(rhs))


def test_solve_dense_singular():
    with pytest.raises(RuntimeError):
        solve_dense(LinearSystem(matrix=np.zeros((5, 5), dtype=complex), rhs=np.ones(5, dtype=complex)))


def test_adaptive_quadrature_classics():
    assert adaptive_quadrature(math.sin, 0.0, math.pi, 1e-12) == pytest.approx(2.0, abs=1e-12)
    assert adaptive_quadrature(lambda u: math.exp(-u * u), -8.0, 8.0, 1e-12) == pytest.approx(
        math.sqrt(math.pi), abs=1e-12
    )


def test_adaptive_quadrature_nonconvergence():
    step = lambda x: 0.0 if x < 1.0 / math.sqrt(2.0) else 1.0
    with pytest.raises(RuntimeError):
        adaptive_quadrature(step, 0.0, 1.0, 1e-15)


def test_bessel_series_against_scipy():
    for x in (0.1, 1.0, 4.0):
        assert bessel_k_series(0, x) == pytest.approx(float(special.k0(x)), rel=1e-12)
        assert bessel_k_series(1, x) == pytest.approx(float(special.k1(x)), rel=1e-12)
        k2 = float(special.k0(x) + 2.0 / x * special.k1(x))
        assert bessel_k_series(2, x) == pytest.approx(k2, rel=1e-12)
    with pytest.raises(ValueError):
        bessel_k_series(0, 0.0)
    with pytest.raises(ValueError):
        bessel_k_series(3, 1.0)


def test_run_validation_default_config():
    results = run_validation(draws=100)
    assert len(results) == 4
    for res in results:
        assert res.passed, f"{res.name}: {res.max_error} > {res.tolerance}"


def test_run_validation_other_fiber_length():
    results = run_validation(replace(CFG, Lf=0.83), draws=50)
    assert all(res.passed for res in results)
