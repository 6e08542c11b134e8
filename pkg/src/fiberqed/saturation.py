"""Semiclassical saturation of the on-resonance transmission.

With atoms in one cavity only and everything on resonance, the nonlinear
steady state collapses to a scalar equation y = |X| * F(|X|^2) in the
scaled drive y and scaled intracavity amplitude |X|.  The atom summation is
replaced by its collective closed form (or a Gauss-Hermite quadrature over
the radial density when the cloud width matters).  All real roots are
recorded per power; the reported branch follows continuation from zero
drive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .params import DerivedRates

HBAR = 1.054571817e-34          # J s
C_VACUUM = 299792458.0          # m/s

_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(96)


@dataclass(frozen=True)
class SaturationConfig:
    which_cavity: int = 1
    g0: float = 0.0                     # trap-minimum single-atom coupling, rad/s
    N_eff: float = 1.0                  # effective atom number
    A_mf: float = 0.17                  # axial weight of the mode function
    power_grid: np.ndarray = field(default_factory=lambda: np.geomspace(1e-12, 1e-6, 61))
    model: str = "closed_form"          # closed_form | quadrature
    sigma_y_over_x0: float = 0.0        # cloud width / trap radius (quadrature model)
    q_prime_x0: float = 1.4424          # q' * r0 (quadrature model)

    def validate(self) -> None:
        if self.which_cavity not in (1, 2):
            raise ValueError("which_cavity must be 1 or 2")
        if self.g0 <= 0.0:
            raise ValueError("g0 must be positive")
        if self.N_eff <= 0.0:
            raise ValueError("N_eff must be positive")
        if self.model not in ("closed_form", "quadrature"):
            raise ValueError(f"unknown saturation model {self.model!r}")
        grid = np.asarray(self.power_grid, dtype=float)
        if grid.size == 0 or np.any(grid <= 0.0) or np.any(np.diff(grid) <= 0.0):
            raise ValueError("power grid must be positive and strictly increasing")


@dataclass(frozen=True)
class SaturationPoint:
    P_in: float                 # input power, W
    transmission: float
    n_roots: int
    branch: str                 # "low" | "high"


@dataclass(frozen=True)
class SaturationCurve:
    points: list[SaturationPoint]
    n_sat: float


def saturation_photon_number(g0: float, rates: DerivedRates) -> float:
    """n_sat = gamma_perp * gamma_par / (4 g0^2); gamma_par recovered from rates."""
    if g0 <= 0.0:
        raise ValueError("g0 must be positive")
    gamma_las = rates.kappa_b - rates.kappa_bloss
    gamma_par = 2.0 * (rates.gamma_perp - gamma_las)
    return rates.gamma_perp * gamma_par / (4.0 * g0**2)


def collective_saturation_term(N_eff: float, A_mf: float, X_abs2) -> float:
    """Collective atomic response summed over the trap, per unit cooperativity.

    Decreases monotonically from N_eff at zero field to
    2*N_eff/((1+A)*|X|^2) at strong saturation.
    """
    x2 = np.asarray(X_abs2, dtype=float)
    if np.any(x2 < 0.0):
        raise ValueError("X_abs2 must be non-negative")
    bracket = 1.0 - 1.0 / np.sqrt((1.0 + A_mf * x2) * (1.0 + x2))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            x2 > 0.0,
            N_eff * 2.0 / (1.0 + A_mf) / np.where(x2 > 0.0, x2, 1.0) * bracket,
            N_eff,
        )
    return out if out.ndim else float(out)


def quadrature_saturation_term(
    N_eff: float,
    A_mf: float,
    sigma_y_over_x0: float,
    q_prime_x0: float,
    X_abs2,
) -> float:
    """Gauss-Hermite evaluation of the atom summation over a Gaussian cloud.

    Reduces to collective_saturation_term when sigma_y_over_x0 = 0 (all atoms
    sample the trap-minimum field).
    """
    if sigma_y_over_x0 < 0.0:
        raise ValueError("sigma_y_over_x0 must be non-negative")
    x2 = np.asarray(X_abs2, dtype=float)[..., np.newaxis]
    u = _GH_NODES
    ratio2 = (sigma_y_over_x0 * u) ** 2
    s = np.exp(-2.0 * q_prime_x0 * (np.sqrt(1.0 + ratio2) - 1.0)) / (1.0 + ratio2) ** 1.5
    f = 1.0 - 1.0 / np.sqrt((1.0 + A_mf * x2 * s) * (1.0 + x2 * s))
    integral = np.sum(_GH_WEIGHTS * f, axis=-1) / math.sqrt(math.pi)
    x2 = np.asarray(X_abs2, dtype=float)
    # analytic zero-field limit: f ~ (1+A)*s*x2/2, averaged over the cloud
    s_avg = np.sum(_GH_WEIGHTS * s) / math.sqrt(math.pi)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            x2 > 0.0,
            N_eff * 2.0 / (1.0 + A_mf) / np.where(x2 > 0.0, x2, 1.0) * integral,
            N_eff * s_avg,
        )
    return out if out.ndim else float(out)


def _chain_constants(rates: DerivedRates):
    V1 = rates.v1**2 / (rates.kappa_b * rates.kappa_1p)
    V2 = rates.v2**2 / (rates.kappa_b * rates.kappa_2p)
    return V1, V2


def scaled_drive_from_power(
    P_in: float, rates: DerivedRates, n_sat: float, lambda_probe: float
) -> float:
    """Invert P_in = y^2 * (2*pi*hbar*c/lambda) * kappa_1p^2/(2*kappa_1l) * n_sat."""
    photon_energy = 2.0 * math.pi * HBAR * C_VACUUM / lambda_probe
    scale = photon_energy * rates.kappa_1p**2 / (2.0 * rates.kappa_1l) * n_sat
    return math.sqrt(P_in / scale)


def _response_function(cfg: SaturationConfig, rates: DerivedRates):
    """Return (F, prefactor) with y = x*F(x^2) and T = prefactor * x^2 / y^2."""
    V1, V2 = _chain_constants(rates)

    if cfg.model == "closed_form":
        def term(x2):
            return collective_saturation_term(cfg.N_eff, cfg.A_mf, x2)
    else:
        def term(x2):
            return quadrature_saturation_term(
                cfg.N_eff, cfg.A_mf, cfg.sigma_y_over_x0, cfg.q_prime_x0, x2
            )

    if cfg.which_cavity == 1:
        C0 = cfg.g0**2 / (rates.kappa_1p * rates.gamma_perp)
        base = 1.0 + V1 / (1.0 + V2)

        def F(x2):
            return base + C0 * term(x2)

        prefactor = ((1.0 + V1 + V2) / (1.0 + V2)) ** 2
    else:
        C0 = cfg.g0**2 / (rates.kappa_2p * rates.gamma_perp)
        lead = (rates.v1 * rates.kappa_2p) / (rates.v2 * rates.kappa_1p)
        fiber = 1.0 + rates.kappa_b * rates.kappa_1p / rates.v1**2
        back = rates.v2**2 * rates.kappa_1p / (rates.v1**2 * rates.kappa_2p) / fiber

        def F(x2):
            return lead * fiber * (1.0 + back + C0 * term(x2))

        prefactor = (
            (1.0 + V1 + V2) * rates.kappa_b * rates.kappa_2p / (rates.v1 * rates.v2)
        ) ** 2
    return F, prefactor


def _find_roots(F, y: float, n_sat: float) -> list[float]:
    """All positive roots of x*F(x^2) = y via dense scan plus bracketed solves."""
    def G(x):
        return x * F(x * x) - y

    sqrt_nsat = math.sqrt(n_sat)
    grid = np.geomspace(1e-4 * sqrt_nsat, 1e3 * sqrt_nsat, 400)
    vals = np.array([G(x) for x in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(
                optimize.brentq(G, grid[i], grid[i + 1], xtol=1e-300, rtol=1e-14)
            )
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    if not roots:
        raise RuntimeError(
            "saturation root bracketing failed: no sign change up to |X| = 1e3*sqrt(n_sat)"
        )
    return sorted(roots)


def solve_saturation(
    cfg: SaturationConfig, rates: DerivedRates, lambda_probe: float = 852e-9
) -> SaturationCurve:
    """Transmission vs input power along the branch continued from zero drive."""
    cfg.validate()
    n_sat = saturation_photon_number(cfg.g0, rates)
    F, prefactor = _response_function(cfg, rates)

    points = []
    previous = None
    for P in np.asarray(cfg.power_grid, dtype=float):
        y = scaled_drive_from_power(P, rates, n_sat, lambda_probe)
        roots = _find_roots(F, y, n_sat)
        if previous is None:
            x = roots[0]
        else:
            x = min(roots, key=lambda r: abs(r - previous))
        branch = "low" if x == roots[0] else "high"
        previous = x
        T = prefactor * x**2 / y**2
        points.append(
            SaturationPoint(P_in=float(P), transmission=float(T),
                            n_roots=len(roots), branch=branch)
        )
    return SaturationCurve(points=points, n_sat=n_sat)
