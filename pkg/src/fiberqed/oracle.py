"""Independent brute-force verifiers for the closed-form results.

Everything here deliberately avoids the closed-form code paths: the linear
response is checked against a dense 5x5 complex solve of the stationarity
equations as written, quadratures against recursive adaptive Simpson, and
the Bessel evaluations against a slow arbitrary-precision ascending series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import fiber_mode, linear_response, saturation
from .params import PhysicalConfig, DerivedRates, derive_rates, mhz
from .linear_response import ProbeSettings, SteadyStateAmplitudes


@dataclass(frozen=True)
class LinearSystem:
    """5x5 complex stationarity system in the variable order (a1, a2, b, s1, s2)."""

    matrix: np.ndarray
    rhs: np.ndarray


def build_linear_system(
    rates: DerivedRates, probe: ProbeSettings, g1: float, g2: float
) -> LinearSystem:
    """Encode the five fixed-point equations row by row."""
    dc, da = probe.delta_c, probe.delta_a
    m = np.zeros((5, 5), dtype=complex)
    rhs = np.zeros(5, dtype=complex)

    m[0, 0] = rates.kappa_1p + 1j * dc
    m[0, 2] = 1j * rates.v1
    m[0, 3] = 1j * g1
    rhs[0] = -1j * probe.drive_E1

    m[1, 1] = rates.kappa_2p + 1j * dc
    m[1, 2] = 1j * rates.v2
    m[1, 4] = 1j * g2

    m[2, 2] = rates.kappa_b + 1j * dc
    m[2, 0] = 1j * rates.v1
    m[2, 1] = 1j * rates.v2

    m[3, 3] = rates.gamma_perp + 1j * da
    m[3, 0] = 1j * g1

    m[4, 4] = rates.gamma_perp + 1j * da
    m[4, 1] = 1j * g2

    return LinearSystem(matrix=m, rhs=rhs)


def solve_dense(system: LinearSystem) -> SteadyStateAmplitudes:
    """Direct dense solve with an explicit residual check."""
    try:
        x = np.linalg.solve(system.matrix, system.rhs)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"singular linear system: {exc}") from exc
    residual = np.max(np.abs(system.matrix @ x - system.rhs))
    scale = max(np.max(np.abs(system.rhs)), 1e-300)
    if residual > 1e-12 * scale and scale > 1e-290:
        raise RuntimeError(f"dense solve residual too large: {residual / scale:.3e}")
    return SteadyStateAmplitudes(a1=x[0], a2=x[1], b=x[2], s1=x[3], s2=x[4])


def adaptive_quadrature(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Recursive adaptive Simpson integration with Richardson correction."""

    def simpson(a, fa, b, fb):
        m = 0.5 * (a + b)
        fm = f(m)
        return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, fa, b, fb, m, fm, whole, eps, depth):
        lm, flm, left = simpson(a, fa, m, fm)
        rm, frm, right = simpson(m, fm, b, fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        if depth >= 40:
            raise RuntimeError("adaptive quadrature failed to converge at depth 40")
        return recurse(a, fa, m, fm, lm, flm, left, eps / 2.0, depth + 1) + recurse(
            m, fm, b, fb, rm, frm, right, eps / 2.0, depth + 1
        )

    fa, fb = f(lo), f(hi)
    m, fm, whole = simpson(lo, fa, hi, fb)
    return recurse(lo, fa, hi, fb, m, fm, whole, tol, 0)


def bessel_k_series(order: int, x: float, dps: int = 60) -> float:
    """K_n(x) for n = 0, 1, 2 from the ascending series in arbitrary precision."""
    if x <= 0.0:
        raise ValueError("bessel_k_series requires x > 0")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1, or 2")
    n = order
    with mpmath.workdps(dps):
        xm = mpmath.mpf(x)
        half = xm / 2
        log_half = mpmath.log(half)

        def bessel_i(nu):
            total = mpmath.mpf(0)
            k = 0
            while True:
                term = half ** (2 * k + nu) / (mpmath.factorial(k) * mpmath.factorial(k + nu))
                total += term
                if abs(term) < mpmath.mpf(10) ** (-dps - 5) * (abs(total) + 1):
                    return total
                k += 1

        # finite sum of the singular part
        finite = mpmath.mpf(0)
        for k in range(n):
            finite += (
                mpmath.factorial(n - k - 1)
                / mpmath.factorial(k)
                * (-(xm**2) / 4) ** k
            )
        finite *= half ** (-n) / 2

        # regular series with digamma weights
        tail = mpmath.mpf(0)
        k = 0
        while True:
            term = (
                (mpmath.digamma(k + 1) + mpmath.digamma(n + k + 1))
                * (xm**2 / 4) ** k
                / (mpmath.factorial(k) * mpmath.factorial(n + k))
            )
            tail += term
            if abs(term) < mpmath.mpf(10) ** (-dps - 5) * (abs(tail) + 1):
                break
            k += 1
        tail *= (-1) ** n * half**n / 2

        value = finite + (-1) ** (n + 1) * log_half * bessel_i(n) + tail
        return float(value)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float


def _check_linear_closed_form(rates: DerivedRates, cfg: PhysicalConfig, draws: int, seed: int):
    rng = np.random.default_rng(seed)
    base = np.array([
        rates.kappa_1l, rates.kappa_1loss, rates.kappa_2r, rates.kappa_2loss,
        rates.kappa_bloss, rates.v1, rates.v2,
    ])
    gamma_las = rates.kappa_b - rates.kappa_bloss
    worst = 0.0
    for _ in range(draws):
        f = 10.0 ** rng.uniform(-1.0, 1.0, size=base.size)
        k1l, k1loss, k2r, k2loss, kbloss, v1, v2 = base * f
        k1 = k1l + k1loss
        k2 = k2r + k2loss
        r = DerivedRates(
            kappa_1l=k1l, kappa_1r=rates.kappa_1r, kappa_2l=rates.kappa_2l,
            kappa_2r=k2r, kappa_1loss=k1loss, kappa_2loss=k2loss,
            kappa_bloss=kbloss, kappa_1=k1, kappa_2=k2,
            kappa_1p=k1 + gamma_las, kappa_2p=k2 + gamma_las,
            kappa_b=kbloss + gamma_las, v1=v1, v2=v2,
            gamma_perp=rates.gamma_perp,
        )
        probe = ProbeSettings(
            delta_c=rng.uniform(-mhz(50), mhz(50)),
            delta_a=rng.uniform(-mhz(50), mhz(50)),
            drive_E1=rng.uniform(0.1, 10.0),
        )
        g1 = cfg.g1_eff * 10.0 ** rng.uniform(-1.0, 1.0)
        g2 = cfg.g2_eff * 10.0 ** rng.uniform(-1.0, 1.0)
        closed = linear_response.steady_state(r, probe, g1, g2)
        dense = solve_dense(build_linear_system(r, probe, g1, g2))
        vec_c = np.array([closed.a1, closed.a2, closed.b, closed.s1, closed.s2])
        vec_d = np.array([dense.a1, dense.a2, dense.b, dense.s1, dense.s2])
        err = np.max(np.abs(vec_c - vec_d)) / max(np.max(np.abs(vec_d)), 1e-300)
        worst = max(worst, err)
    return worst


def run_validation(cfg: PhysicalConfig | None = None, draws: int = 200, seed: int = 7) -> list[CheckResult]:
    """Cross-check every closed-form path against its oracle for one config."""
    if cfg is None:
        cfg = PhysicalConfig()
    rates = derive_rates(cfg)
    results = []

    err = _check_linear_closed_form(rates, cfg, draws, seed)
    results.append(CheckResult("linear closed form vs dense solve", err < 1e-9, err, 1e-9))

    # Gauss-Hermite collective term vs adaptive quadrature of the cloud integral
    worst = 0.0
    for x2 in (0.25, 1.0, 4.0):
        for sigma in (0.0, 0.3):
            gh = saturation.quadrature_saturation_term(92.0, 0.17, sigma, 1.4424, x2)

            def integrand(u):
                ratio2 = (sigma * u) ** 2
                s = math.exp(-2.0 * 1.4424 * (math.sqrt(1.0 + ratio2) - 1.0)) / (1.0 + ratio2) ** 1.5
                return math.exp(-u * u) * (
                    1.0 - 1.0 / math.sqrt((1.0 + 0.17 * x2 * s) * (1.0 + x2 * s))
                )

            ref = (
                92.0 * 2.0 / 1.17 / x2 / math.sqrt(math.pi)
                * adaptive_quadrature(integrand, -8.0, 8.0, 1e-13)
            )
            worst = max(worst, abs(gh - ref) / abs(ref))
    results.append(CheckResult("Gauss-Hermite vs adaptive quadrature", worst < 1e-9, worst, 1e-9))

    # production Bessel evaluations vs the arbitrary-precision series
    worst = 0.0
    for x in np.geomspace(1e-3, 30.0, 25):
        for order in (0, 1, 2):
            ref = bessel_k_series(order, float(x))
            got = fiber_mode.bessel_k(order, float(x))
            worst = max(worst, abs(got - ref) / abs(ref))
    results.append(CheckResult("Bessel K vs series oracle", worst < 1e-7, worst, 1e-7))

    # axial average of the simplified profile vs its closed form (1 + A)/2
    p = fiber_mode.make_mode_params()
    period = math.pi / p.beta
    avg = adaptive_quadrature(
        lambda z: fiber_mode.g_squared_simplified(p, p.r0, 0.0, z), 0.0, period, 1e-14
    ) / period
    err = abs(avg - 0.5 * (1.0 + p.A_mf))
    results.append(CheckResult("axial average of simplified profile", err < 1e-10, err, 1e-10))

    return results
