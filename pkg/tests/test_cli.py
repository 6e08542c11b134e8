import math

import numpy as np
import pytest

from fiberqed.cli import (
    ConfigError,
    RunConfig,
    format_config,
    main,
    parse_config,
    run_subcommand,
)
from fiberqed.params import derive_rates, to_mhz


def test_empty_config_is_defaults():
    cfg = parse_config("")
    assert cfg.physical.Lf == 1.23
    assert cfg.physical.T1 == 0.13
    assert cfg.atoms.loading == "both"
    assert cfg.atoms.g1_eff == 7.2
    assert cfg.atoms.g2_eff == 7.3
    assert cfg.physical.g1_0 == 0.75
    assert cfg.physical.g2_0 == 1.2
    assert cfg.saturation.A_mf == 0.17
    assert cfg.probe.grid_points == 601


def test_fiber_length_override():
    cfg = parse_config("[physical]\nLf = 2.27\n")
    rates = derive_rates(cfg.physical_config())
    assert to_mhz(rates.v1) == pytest.approx(7.10, rel=0.01)


def test_comments_and_inline_comments():
    cfg = parse_config("# header\n[physical]\nLf = 0.83  # short fiber\n")
    assert cfg.physical.Lf == 0.83


def test_unknown_key_is_error():
    with pytest.raises(ConfigError):
        parse_config("[physical]\nLff = 1.0\n")


def test_unknown_section_is_error():
    with pytest.raises(ConfigError):
        parse_config("[physics]\nLf = 1.0\n")


def test_bad_value_is_error():
    with pytest.raises(ConfigError):
        parse_config("[physical]\nLf = long\n")
    with pytest.raises(ConfigError):
        parse_config("[probe]\ngrid_points = 12.5\n")


def test_range_validation():
    with pytest.raises(ConfigError):
        parse_config("[physical]\nT1 = 1.5\n")
    with pytest.raises(ConfigError):
        parse_config("[atoms]\nloading = everywhere\n")
    with pytest.raises(ConfigError):
        parse_config("[saturation]\nmodel = magic\n")
    with pytest.raises(ConfigError):
        parse_config("[output]\nformats = pdf\n")


def test_config_roundtrip():
    cfg = parse_config("[physical]\nLf = 0.83\nT1 = 0.125\n[atoms]\nloading = cavity1\n")
    again = parse_config(format_config(cfg))
    assert again == cfg


def test_loaded_couplings():
    for loading, expect in (
        ("none", (0.0, 0.0)),
        ("cavity1", (7.2, 0.0)),
        ("cavity2", (0.0, 7.3)),
        ("both", (7.2, 7.3)),
    ):
        cfg = parse_config(f"[atoms]\nloading = {loading}\n")
        g1, g2 = cfg.loaded_couplings()
        assert (to_mhz(g1), to_mhz(g2)) == pytest.approx(expect)


def test_params_command(capsys):
    assert run_subcommand("params", RunConfig()) == 0
    out = capsys.readouterr().out
    assert "kappa_1l" in out and "1.16" in out


def test_unknown_subcommand():
    with pytest.raises(ConfigError):
        run_subcommand("spectra", RunConfig())


def test_spectrum_command_writes_csv(tmp_path):
    cfg = parse_config(f"[output]\ndirectory = {tmp_path}\n[probe]\ngrid_points = 101\n")
    assert run_subcommand("spectrum", cfg) == 0
    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "delta_MHz,transmission"
    assert len(lines) == 102
    first = lines[1].split(",")
    assert float(first[0]) == -30.0
    assert float(first[1]) >= 0.0


def test_spectrum_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        cfg = parse_config(f"[output]\ndirectory = {out}\n[probe]\ngrid_points = 51\n")
        run_subcommand("spectrum", cfg)
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()


def test_saturation_command(tmp_path):
    cfg = parse_config(
        f"[output]\ndirectory = {tmp_path}\n[saturation]\npower_points = 11\n"
    )
    assert run_subcommand("saturation", cfg) == 0
    lines = (tmp_path / "saturation.csv").read_text().splitlines()
    assert lines[0] == "P_in_pW,transmission,n_roots,branch"
    assert len(lines) == 12
    cols = lines[1].split(",")
    assert cols[2] == "1" and cols[3] in ("low", "high")


def test_mode_profile_command(tmp_path):
    cfg = parse_config(
        f"[output]\ndirectory = {tmp_path}\n"
        "[mode]\nr_points = 3\nphi_points = 3\nz_points = 2\n"
    )
    assert run_subcommand("mode-profile", cfg) == 0
    lines = (tmp_path / "mode_profile.csv").read_text().splitlines()
    assert lines[0] == "r_nm,phi_rad,z_nm,g2_exact,g2_simplified"
    assert len(lines) == 1 + 3 * 3 * 2


def test_normal_modes_command(capsys):
    assert run_subcommand("normal-modes", RunConfig()) == 0
    out = capsys.readouterr().out
    assert "gd1" in out and "splitting_bright" in out


def test_validate_command(capsys):
    assert run_subcommand("validate", RunConfig()) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4 and "FAIL" not in out


def test_main_spectrum_with_flags(tmp_path):
    code = main([
        "spectrum", "--out", str(tmp_path), "--svg",
        "--grid=-20:20:41", "--atoms", "none", "--lf", "0.83",
    ])
    assert code == 0
    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert len(lines) == 42
    svg = (tmp_path / "spectrum.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg
    # empty 0.83 m chain: symmetric triplet
    t = np.array([float(l.split(",")[1]) for l in lines[1:]])
    assert np.max(np.abs(t - t[::-1])) < 1e-9


def test_main_band_flag(tmp_path):
    code = main(["spectrum", "--out", str(tmp_path), "--band", "1.0", "--grid=-15:15:31"])
    assert code == 0
    assert (tmp_path / "spectrum_band_low.csv").exists()
    assert (tmp_path / "spectrum_band_high.csv").exists()


def test_main_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[physical]\nT1 = 1.5\n")
    assert main(["params", "--config", str(bad)]) == 2
    assert main(["params", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["spectrum", "--out", str(tmp_path), "--grid", "nonsense"]) == 2
    assert main(["params"]) == 0
