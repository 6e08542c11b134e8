"""Command-line front end: config parsing, subcommands, CSV and SVG output.

Config files are line oriented: `[section]` headers, `key = value` pairs and
`#` comments.  Rates are quoted in MHz, lengths in meters.  Every key has a
default equal to the reference experimental configuration, so an empty file
is a valid config.  Unknown keys are a hard error to guard against typos in
physics parameters.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import fiber_mode, linear_response, normal_modes, oracle, saturation
from .params import C_FIBER, PhysicalConfig, derive_rates, mhz, to_mhz, rate_report


class ConfigError(Exception):
    pass


@dataclass
class PhysicalSection:
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
    gamma_par: float = 5.2          # MHz
    gamma_las: float = 0.365        # MHz
    g1_0: float = 0.75              # MHz
    g2_0: float = 1.2               # MHz
    c_fiber: float = C_FIBER        # m/s
    lambda_probe: float = 852e-9    # m


@dataclass
class ProbeSection:
    grid_min: float = -30.0         # MHz
    grid_max: float = 30.0          # MHz
    grid_points: int = 601


@dataclass
class AtomsSection:
    loading: str = "both"           # none | cavity1 | cavity2 | both
    g1_eff: float = 7.2             # MHz
    g2_eff: float = 7.3             # MHz


@dataclass
class SaturationSection:
    which_cavity: int = 1
    g0: float = 0.0                 # MHz; 0 means "use g1_0/g2_0 from [physical]"
    N_eff: float = 0.0              # 0 means "use (g_eff/g0)^2"
    A_mf: float = 0.17
    model: str = "closed_form"
    sigma_y_over_x0: float = 0.0
    power_min_pW: float = 1.0
    power_max_pW: float = 1e6
    power_points: int = 61


@dataclass
class ModeSection:
    beta: float = 7.87925e6         # 1/m
    wavelength: float = 852e-9      # m
    n1: float = 1.4525
    n2: float = 1.0
    s: float = -0.828
    a: float = 200e-9               # m
    r0: float = 400e-9              # m
    A_mf: float = 0.17
    r_span_nm: float = 300.0
    r_points: int = 31
    phi_points: int = 5
    z_points: int = 9


@dataclass
class OutputSection:
    directory: str = "."
    formats: str = "csv"            # comma separated: csv, svg


@dataclass
class RunConfig:
    physical: PhysicalSection = field(default_factory=PhysicalSection)
    probe: ProbeSection = field(default_factory=ProbeSection)
    atoms: AtomsSection = field(default_factory=AtomsSection)
    saturation: SaturationSection = field(default_factory=SaturationSection)
    mode: ModeSection = field(default_factory=ModeSection)
    output: OutputSection = field(default_factory=OutputSection)

    def physical_config(self) -> PhysicalConfig:
        p = self.physical
        return PhysicalConfig(
            T1=p.T1, T2=p.T2, T3=p.T3, T4=p.T4,
            L1=p.L1, L2=p.L2, Lf=p.Lf,
            alpha1=p.alpha1, alpha2=p.alpha2, alphaf=p.alphaf,
            gamma_par=mhz(p.gamma_par), gamma_las=mhz(p.gamma_las),
            g1_eff=mhz(self.atoms.g1_eff), g2_eff=mhz(self.atoms.g2_eff),
            g1_0=mhz(p.g1_0), g2_0=mhz(p.g2_0),
            c_fiber=p.c_fiber, lambda_probe=p.lambda_probe,
        )

    def loaded_couplings(self) -> tuple[float, float]:
        loading = self.atoms.loading
        g1, g2 = mhz(self.atoms.g1_eff), mhz(self.atoms.g2_eff)
        if loading == "none":
            return 0.0, 0.0
        if loading == "cavity1":
            return g1, 0.0
        if loading == "cavity2":
            return 0.0, g2
        if loading == "both":
            return g1, g2
        raise ConfigError(f"unknown atom loading condition {loading!r}")

    def detuning_grid(self) -> np.ndarray:
        pr = self.probe
        if pr.grid_points < 2 or pr.grid_min >= pr.grid_max:
            raise ConfigError("probe grid must have at least 2 points and grid_min < grid_max")
        return np.linspace(mhz(pr.grid_min), mhz(pr.grid_max), pr.grid_points)

    def mode_params(self) -> fiber_mode.ModeFunctionParams:
        m = self.mode
        return fiber_mode.make_mode_params(
            beta=m.beta, wavelength=m.wavelength, n1=m.n1, n2=m.n2, s=m.s,
            a=m.a, r0=m.r0, A_mf=m.A_mf,
        )

    def saturation_config(self) -> saturation.SaturationConfig:
        s = self.saturation
        p = self.physical
        g0_mhz = s.g0 if s.g0 > 0.0 else (p.g1_0 if s.which_cavity == 1 else p.g2_0)
        g_eff_mhz = self.atoms.g1_eff if s.which_cavity == 1 else self.atoms.g2_eff
        n_eff = s.N_eff if s.N_eff > 0.0 else (g_eff_mhz / g0_mhz) ** 2
        grid = np.geomspace(s.power_min_pW * 1e-12, s.power_max_pW * 1e-12, s.power_points)
        return saturation.SaturationConfig(
            which_cavity=s.which_cavity, g0=mhz(g0_mhz), N_eff=n_eff, A_mf=s.A_mf,
            power_grid=grid, model=s.model, sigma_y_over_x0=s.sigma_y_over_x0,
            q_prime_x0=self.mode_params().qprime * self.mode.r0,
        )


_SECTIONS = {
    "physical": PhysicalSection,
    "probe": ProbeSection,
    "atoms": AtomsSection,
    "saturation": SaturationSection,
    "mode": ModeSection,
    "output": OutputSection,
}


def parse_config(text: str) -> RunConfig:
    """Parse the line-oriented config format into a RunConfig."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    cfg = RunConfig()
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        target = getattr(cfg, section)
        known = {f.name: f.type for f in fields(target)}
        for key, raw in cp.items(section):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            kind = known[key]
            try:
                if kind == "int":
                    value = int(raw)
                elif kind == "float":
                    value = float(raw)
                else:
                    value = raw.strip()
            except ValueError as exc:
                raise ConfigError(
                    f"bad value for {key!r} in [{section}]: {raw!r}"
                ) from exc
            setattr(target, key, value)

    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    try:
        cfg.physical_config().validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.atoms.loading not in ("none", "cavity1", "cavity2", "both"):
        raise ConfigError(f"unknown atom loading condition {cfg.atoms.loading!r}")
    if cfg.saturation.which_cavity not in (1, 2):
        raise ConfigError("saturation which_cavity must be 1 or 2")
    if cfg.saturation.model not in ("closed_form", "quadrature"):
        raise ConfigError(f"unknown saturation model {cfg.saturation.model!r}")
    for fmt in cfg.output.formats.split(","):
        if fmt.strip() not in ("csv", "svg"):
            raise ConfigError(f"unknown output format {fmt.strip()!r}")


def format_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig back to config-file text (round-trip safe)."""
    lines = []
    for section, _ in _SECTIONS.items():
        target = getattr(cfg, section)
        lines.append(f"[{section}]")
        for f in fields(target):
            value = getattr(target, f.name)
            lines.append(f"{f.name} = {value!r}" if isinstance(value, float) else f"{f.name} = {value}")
        lines.append("")
    return "\n".join(lines)


def _write_csv(path: Path, header: str, rows) -> None:
    with path.open("w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_svg_lineplot(path: Path, x, y, xlabel: str, ylabel: str, logx: bool = False) -> None:
    """Minimal line-plot SVG; convenience rendering only, CSV is canonical."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if logx:
        x = np.log10(x)
    w, h, margin = 640, 480, 60
    x0, x1 = float(np.min(x)), float(np.max(x))
    y0, y1 = float(np.min(y)), float(np.max(y))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(v):
        return margin + (v - x0) / (x1 - x0) * (w - 2 * margin)

    def sy(v):
        return h - margin - (v - y0) / (y1 - y0) * (h - 2 * margin)

    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
    xtag = f"log10({xlabel})" if logx else xlabel
    svg = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{margin}" y1="{h - margin}" x2="{w - margin}" y2="{h - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{h - margin}" stroke="black"/>',
        f'<text x="{w // 2}" y="{h - margin // 3}" text-anchor="middle" font-size="14">{xtag}</text>',
        f'<text x="{margin // 3}" y="{h // 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 {margin // 3} {h // 2})">{ylabel}</text>',
        f'<text x="{margin}" y="{h - margin + 20}" font-size="12">{x0:.4g}</text>',
        f'<text x="{w - margin}" y="{h - margin + 20}" text-anchor="end" font-size="12">{x1:.4g}</text>',
        f'<text x="{margin - 5}" y="{h - margin}" text-anchor="end" font-size="12">{y0:.4g}</text>',
        f'<text x="{margin - 5}" y="{margin}" text-anchor="end" font-size="12">{y1:.4g}</text>',
        f'<polyline points="{pts}" fill="none" stroke="crimson" stroke-width="1.5"/>',
        "</svg>",
    ]
    path.write_text("\n".join(svg) + "\n")


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _want_svg(cfg: RunConfig) -> bool:
    return "svg" in [f.strip() for f in cfg.output.formats.split(",")]


def cmd_params(cfg: RunConfig, args) -> int:
    print(rate_report(cfg.physical_config()))
    return 0


def cmd_spectrum(cfg: RunConfig, args) -> int:
    rates = derive_rates(cfg.physical_config())
    g1, g2 = cfg.loaded_couplings()
    grid = cfg.detuning_grid()
    spec = linear_response.transmission_spectrum(rates, g1, g2, grid=grid)
    out = _outdir(cfg)
    rows = (
        (_fmt(to_mhz(d)), _fmt(t)) for d, t in zip(spec.detunings, spec.transmission)
    )
    _write_csv(out / "spectrum.csv", "delta_MHz,transmission", rows)
    if _want_svg(cfg):
        write_svg_lineplot(
            out / "spectrum.svg",
            [to_mhz(d) for d in spec.detunings],
            spec.transmission,
            "detuning (MHz)",
            "transmission",
        )
    if args.band is not None:
        for tag, sign in (("low", -1.0), ("high", 1.0)):
            offset = mhz(args.band) * sign
            gb1 = max(g1 + offset, 0.0) if g1 > 0.0 else 0.0
            gb2 = max(g2 + offset, 0.0) if g2 > 0.0 else 0.0
            band = linear_response.transmission_spectrum(rates, gb1, gb2, grid=grid)
            rows = (
                (_fmt(to_mhz(d)), _fmt(t))
                for d, t in zip(band.detunings, band.transmission)
            )
            _write_csv(out / f"spectrum_band_{tag}.csv", "delta_MHz,transmission", rows)
    return 0


def cmd_normal_modes(cfg: RunConfig, args) -> int:
    rates = derive_rates(cfg.physical_config())
    g1, g2 = cfg.loaded_couplings()
    summary = normal_modes.decompose(rates, g1, g2)
    entries = [
        ("v_tilde", to_mhz(summary.v_tilde)),
        ("gd1", to_mhz(summary.gd1)),
        ("gd2", to_mhz(summary.gd2)),
        ("kappa_d", to_mhz(summary.kappa_d)),
        ("kappa_plus", to_mhz(summary.kappa_plus)),
        ("kappa_minus", to_mhz(summary.kappa_minus)),
        ("splitting_bright", to_mhz(summary.splitting_bright)),
        ("rabi_splitting", to_mhz(summary.rabi_splitting)),
    ]
    if args.kv:
        for name, value in entries:
            print(f"{name}={value!r}")
        print(f"resolved={summary.resolved}")
    else:
        width = max(len(n) for n, _ in entries)
        print(f"{'quantity':<{width}}  MHz")
        for name, value in entries:
            print(f"{name:<{width}}  {value:.4g}")
        if not summary.resolved:
            print("(dark-mode doublet unresolved: Rabi radicand is negative)")
    return 0


def cmd_saturation(cfg: RunConfig, args) -> int:
    rates = derive_rates(cfg.physical_config())
    curve = saturation.solve_saturation(
        cfg.saturation_config(), rates, lambda_probe=cfg.physical.lambda_probe
    )
    out = _outdir(cfg)
    rows = (
        (_fmt(pt.P_in * 1e12), _fmt(pt.transmission), str(pt.n_roots), pt.branch)
        for pt in curve.points
    )
    _write_csv(out / "saturation.csv", "P_in_pW,transmission,n_roots,branch", rows)
    if _want_svg(cfg):
        write_svg_lineplot(
            out / "saturation.svg",
            [pt.P_in * 1e12 for pt in curve.points],
            [pt.transmission for pt in curve.points],
            "input power (pW)",
            "transmission",
            logx=True,
        )
    return 0


def cmd_mode_profile(cfg: RunConfig, args) -> int:
    p = cfg.mode_params()
    m = cfg.mode
    r = np.linspace(p.r0, p.r0 + m.r_span_nm * 1e-9, m.r_points)
    phi = np.linspace(-math.pi / 4.0, math.pi / 4.0, m.phi_points)
    z = np.linspace(0.0, math.pi / p.beta, m.z_points, endpoint=False)
    out = _outdir(cfg)

    def rows():
        for ri in r:
            for pi in phi:
                for zi in z:
                    yield (
                        _fmt(ri * 1e9),
                        _fmt(pi),
                        _fmt(zi * 1e9),
                        _fmt(fiber_mode.g_squared_exact(p, ri, pi, zi)),
                        _fmt(fiber_mode.g_squared_simplified(p, ri, pi, zi)),
                    )

    _write_csv(
        out / "mode_profile.csv", "r_nm,phi_rad,z_nm,g2_exact,g2_simplified", rows()
    )
    if _want_svg(cfg):
        write_svg_lineplot(
            out / "mode_profile.svg",
            r * 1e9,
            [fiber_mode.g_squared_exact(p, ri, 0.0, 0.0) for ri in r],
            "r (nm)",
            "g^2 / g0^2",
        )
    return 0


def cmd_validate(cfg: RunConfig, args) -> int:
    results = oracle.run_validation(cfg.physical_config())
    ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {res.name}: max error {res.max_error:.3e} (tolerance {res.tolerance:.1e})")
        ok = ok and res.passed
    return 0 if ok else 3


_COMMANDS = {
    "params": cmd_params,
    "spectrum": cmd_spectrum,
    "normal-modes": cmd_normal_modes,
    "saturation": cmd_saturation,
    "mode-profile": cmd_mode_profile,
    "validate": cmd_validate,
}


def run_subcommand(name: str, cfg: RunConfig, args=None) -> int:
    """Dispatch a subcommand; args carries optional CLI-only flags."""
    if args is None:
        args = argparse.Namespace(band=None, kv=False)
    if name not in _COMMANDS:
        raise ConfigError(f"unknown subcommand {name!r}")
    return _COMMANDS[name](cfg, args)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiberqed",
        description="Fiber-coupled two-cavity QED model: rates, spectra, normal modes, saturation.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", type=str, default=None, help="path to config file")
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument("--svg", action="store_true", help="also emit SVG plots")
    parser.add_argument(
        "--grid", type=str, default=None, metavar="MIN:MAX:POINTS",
        help="detuning grid in MHz, e.g. -30:30:601",
    )
    parser.add_argument("--lf", type=float, default=None, help="connecting fiber length override (m)")
    parser.add_argument(
        "--atoms", type=str, default=None,
        choices=("none", "cavity1", "cavity2", "both"),
        help="atom loading condition override",
    )
    parser.add_argument(
        "--band", type=float, default=None, metavar="MHZ",
        help="also emit spectra with both couplings shifted by +/- this amount",
    )
    parser.add_argument("--kv", action="store_true", help="normal-modes: print key=value lines")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            text = Path(args.config).read_text()
        else:
            text = ""
        cfg = parse_config(text)
        if args.lf is not None:
            cfg.physical.Lf = args.lf
        if args.atoms is not None:
            cfg.atoms.loading = args.atoms
        if args.out is not None:
            cfg.output.directory = args.out
        if args.svg and "svg" not in cfg.output.formats:
            cfg.output.formats = cfg.output.formats + ",svg"
        if args.grid is not None:
            try:
                lo, hi, n = args.grid.split(":")
                cfg.probe.grid_min = float(lo)
                cfg.probe.grid_max = float(hi)
                cfg.probe.grid_points = int(n)
            except ValueError as exc:
                raise ConfigError(f"bad --grid specification {args.grid!r}") from exc
        _validate_config(cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        return run_subcommand(args.command, cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
