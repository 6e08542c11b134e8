"""Physical configuration of the two-cavity fiber link and all derived model rates.

Rates are stored internally in rad/s.  The CLI and the reference data file
quote them in MHz (rate / 2pi / 1e6), matching how such numbers are usually
reported.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

TWO_PI = 2.0 * math.pi
C_VACUUM = 299792458.0          # m/s
FIBER_INDEX = 1.4525            # silica core index at the probe wavelength
C_FIBER = C_VACUUM / FIBER_INDEX


def mhz(value: float) -> float:
    """Convert a frequency quoted in MHz (meaning 2pi x MHz) to rad/s."""
    return TWO_PI * value * 1e6


def to_mhz(rate: float) -> float:
    """Convert a rate in rad/s back to MHz units."""
    return rate / TWO_PI / 1e6


@dataclass(frozen=True)
class PhysicalConfig:
    """Raw experimental inputs.

    Transmittances and single-pass losses are intensity quantities
    (dimensionless), lengths are in meters, all rates in rad/s.
    Defaults are the reference experimental configuration.
    """

    T1: float = 0.13
    T2: float = 0.39
    T3: float = 0.33
    T4: float = 0.06
    L1: float = 0.92
    L2: float = 1.38
    Lf: float = 1.23
    alpha1: float = 0.02
    alpha2: float = 0.02
    alphaf: float = 0.02
    gamma_par: float = mhz(5.2)
    gamma_las: float = mhz(0.365)
    g1_eff: float = mhz(7.2)
    g2_eff: float = mhz(7.3)
    g1_0: float = mhz(0.75)
    g2_0: float = mhz(1.2)
    c_fiber: float = C_FIBER
    lambda_probe: float = 852e-9

    def validate(self) -> None:
        for name in ("T1", "T2", "T3", "T4"):
            t = getattr(self, name)
            if not math.isfinite(t) or not 0.0 < t < 1.0:
                raise ValueError(f"mirror transmittance {name}={t!r} must lie in (0, 1)")
        for name in ("alpha1", "alpha2", "alphaf"):
            a = getattr(self, name)
            if not math.isfinite(a) or not 0.0 <= a < 1.0:
                raise ValueError(f"single-pass loss {name}={a!r} must lie in [0, 1)")
        for name in ("L1", "L2", "Lf", "c_fiber", "lambda_probe"):
            x = getattr(self, name)
            if not math.isfinite(x) or x <= 0.0:
                raise ValueError(f"{name}={x!r} must be positive and finite")
        for name in ("gamma_par", "gamma_las", "g1_eff", "g2_eff", "g1_0", "g2_0"):
            r = getattr(self, name)
            if not math.isfinite(r) or r < 0.0:
                raise ValueError(f"rate {name}={r!r} must be non-negative and finite")


@dataclass(frozen=True)
class DerivedRates:
    """All model rates computed from a PhysicalConfig (rad/s).

    The primed rates fold in the laser linewidth as extra phase damping:
    kappa_1p = kappa_1 + gamma_las, and likewise for cavity 2 and the fiber.
    """

    kappa_1l: float
    kappa_1r: float
    kappa_2l: float
    kappa_2r: float
    kappa_1loss: float
    kappa_2loss: float
    kappa_bloss: float
    kappa_1: float
    kappa_2: float
    kappa_1p: float
    kappa_2p: float
    kappa_b: float
    v1: float
    v2: float
    gamma_perp: float


def derive_rates(cfg: PhysicalConfig) -> DerivedRates:
    """Compute every model rate from the physical configuration.

    Mirror decay rates follow kappa = c*T/(4L), intrinsic losses
    kappa_loss = -(c/2L)*ln(1 - alpha), and the cavity-fiber coupling
    rates v_i = (c/2)*sqrt(T/(L_i*L_f)).
    """
    cfg.validate()
    c = cfg.c_fiber

    kappa_1l = c * cfg.T1 / (4.0 * cfg.L1)
    kappa_1r = c * cfg.T2 / (4.0 * cfg.L1)
    kappa_2l = c * cfg.T3 / (4.0 * cfg.L2)
    kappa_2r = c * cfg.T4 / (4.0 * cfg.L2)

    kappa_1loss = -0.5 * c / cfg.L1 * math.log(1.0 - cfg.alpha1)
    kappa_2loss = -0.5 * c / cfg.L2 * math.log(1.0 - cfg.alpha2)
    kappa_bloss = -0.5 * c / cfg.Lf * math.log(1.0 - cfg.alphaf)

    kappa_1 = kappa_1l + kappa_1loss
    kappa_2 = kappa_2r + kappa_2loss

    v1 = 0.5 * c * math.sqrt(cfg.T2 / (cfg.L1 * cfg.Lf))
    v2 = 0.5 * c * math.sqrt(cfg.T3 / (cfg.L2 * cfg.Lf))

    return DerivedRates(
        kappa_1l=kappa_1l,
        kappa_1r=kappa_1r,
        kappa_2l=kappa_2l,
        kappa_2r=kappa_2r,
        kappa_1loss=kappa_1loss,
        kappa_2loss=kappa_2loss,
        kappa_bloss=kappa_bloss,
        kappa_1=kappa_1,
        kappa_2=kappa_2,
        kappa_1p=kappa_1 + cfg.gamma_las,
        kappa_2p=kappa_2 + cfg.gamma_las,
        kappa_b=kappa_bloss + cfg.gamma_las,
        v1=v1,
        v2=v2,
        gamma_perp=0.5 * cfg.gamma_par + cfg.gamma_las,
    )


def reference_rates() -> dict:
    """Golden rate table (MHz) shipped with the package.

    Single-valued entries are plain floats; the fiber-length-dependent ones
    (kappa_bloss, v1, v2) are dicts keyed by the fiber length in meters as a
    string.
    """
    with resources.files("fiberqed").joinpath("data/reference_rates.json").open() as fh:
        return json.load(fh)


def rate_report(cfg: PhysicalConfig) -> str:
    """Human-readable rate table in MHz with 3 significant figures."""
    r = derive_rates(cfg)
    rows = [
        ("kappa_1l", r.kappa_1l),
        ("kappa_1loss", r.kappa_1loss),
        ("kappa_1r", r.kappa_1r),
        ("kappa_2l", r.kappa_2l),
        ("kappa_2loss", r.kappa_2loss),
        ("kappa_2r", r.kappa_2r),
        (f"kappa_bloss (Lf={cfg.Lf} m)", r.kappa_bloss),
        (f"v1 (Lf={cfg.Lf} m)", r.v1),
        (f"v2 (Lf={cfg.Lf} m)", r.v2),
        ("kappa_1", r.kappa_1),
        ("kappa_2", r.kappa_2),
        ("kappa_1p", r.kappa_1p),
        ("kappa_2p", r.kappa_2p),
        ("kappa_b", r.kappa_b),
        ("gamma_par", cfg.gamma_par),
        ("gamma_las", cfg.gamma_las),
        ("gamma_perp", r.gamma_perp),
    ]
    width = max(len(name) for name, _ in rows)
    lines = [f"{'parameter':<{width}}  MHz"]
    for name, rate in rows:
        lines.append(f"{name:<{width}}  {to_mhz(rate):.3g}")
    return "\n".join(lines)
