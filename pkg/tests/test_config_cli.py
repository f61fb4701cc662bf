"""Config parsing, run artifacts, snapshots, and the CLI surface."""

import json

import numpy as np
import pytest

from oldroydb import spectral as sp
from oldroydb.cli import main
from oldroydb.config import (OutOfRange, ParseError, RunConfig, UnknownKey,
                             parse, parse_file, render, validate)
from oldroydb.runner import (CSV_COLUMNS, OUTPUT_ROOT_ENV, read_snapshot,
                             resolve_out_dir, run, write_snapshot)


def quick_config(tmp_path, **extra):
    lines = ["grid.n = 16", "time.dt = 0.01", "time.t_end = 0.1",
             "time.diag_interval = 5", "init.preset = random-band",
             "init.amplitude = 0.01", "init.kmax = 4", "init.seed = 3"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    path = tmp_path / "run.cfg"
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


# ------------------------------------------------------- parsing

def test_defaults_round_trip_through_render():
    cfg = RunConfig()
    again = parse(render(cfg))
    assert again == cfg


def test_parse_assignments_and_comments():
    cfg = parse("# full line comment\n"
                "params.a = 0.5\n"
                "grid.n = 48   # trailing comment\n"
                "model.project_tau_mean = yes\n"
                "\n")
    assert cfg.a == 0.5
    assert cfg.n == 48
    assert cfg.project_tau_mean is True


def test_parse_rejects_unknown_key():
    with pytest.raises(UnknownKey) as err:
        parse("params.nu = 1.0\n")
    assert err.value.name == "params.nu"


def test_parse_rejects_malformed_line():
    with pytest.raises(ParseError) as err:
        parse("grid.n = 16\njust some words\n")
    assert err.value.line == 2


def test_parse_rejects_bad_int():
    with pytest.raises(ParseError):
        parse("grid.n = 16.5\n")


def test_validate_rejects_odd_or_tiny_grid():
    cfg = RunConfig()
    cfg.n = 7
    with pytest.raises(OutOfRange) as err:
        validate(cfg)
    assert err.value.key == "grid.n"
    cfg.n = 4
    with pytest.raises(OutOfRange):
        validate(cfg)


def test_validate_rejects_band_too_wide_for_grid():
    cfg = RunConfig()
    cfg.n = 16
    cfg.kmax = 8
    with pytest.raises(OutOfRange):
        validate(cfg)


def test_validate_rejects_deformation_free_hookean_run():
    cfg = RunConfig()
    cfg.model = "hookean"
    cfg.preset = "random-band"
    with pytest.raises(OutOfRange):
        validate(cfg)


def test_validate_ties_generic_preset_to_hookean_model():
    cfg = RunConfig()
    cfg.preset = "hookean-generic"
    with pytest.raises(OutOfRange):
        validate(cfg)
    cfg.model = "hookean"
    validate(cfg)


def test_fit_window_defaults_to_late_half():
    cfg = RunConfig()
    cfg.t_end = 40.0
    assert cfg.fit_window() == (20.0, 40.0)
    cfg.fit_t_lo, cfg.fit_t_hi = 5.0, 15.0
    assert cfg.fit_window() == (5.0, 15.0)


# ------------------------------------------------------- snapshots

def test_snapshot_round_trip_vector(tmp_path):
    g = sp.Grid(16)
    rng = np.random.default_rng(0)
    u = sp.random_vector(g, rng, 4, solenoidal=True)
    path = tmp_path / "u.snap"
    write_snapshot(path, "u", u, 1.25)
    meta, samples = read_snapshot(path)
    assert meta["field"] == "u"
    assert int(meta["grid_n"]) == 16
    assert float(meta["time"]) == 1.25
    assert samples.shape == (3, 16, 16, 16)
    back = sp.forward(g, samples[0])
    assert sp.l2_norm(back - sp.SpectralScalar(g, u.coeffs[0])) \
        <= 1e-12 * sp.l2_norm(u)


def test_snapshot_round_trip_sym_tensor(tmp_path):
    g = sp.Grid(8)
    rng = np.random.default_rng(1)
    tau = sp.random_sym_tensor(g, rng, 2)
    path = tmp_path / "tau.snap"
    write_snapshot(path, "tau", tau, 0.0)
    _, samples = read_snapshot(path)
    direct = sp.inverse(tau)
    assert np.max(np.abs(samples - direct)) <= 1e-12 * np.max(np.abs(direct))


def test_output_root_env_fallback(tmp_path, monkeypatch):
    cfg = RunConfig()
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "root"))
    assert resolve_out_dir(cfg) == tmp_path / "root" / "out"
    cfg.out_dir = str(tmp_path / "explicit")
    assert resolve_out_dir(cfg) == tmp_path / "explicit"


# ------------------------------------------------------- runner

def test_run_writes_expected_artifacts(tmp_path):
    cfg = parse_file(quick_config(tmp_path, **{"output.snapshots": "true",
                                               "output.snapshot_interval": 5}))
    out = tmp_path / "out"
    assert run(cfg, out_dir=out) == 0
    lines = (out / "energies.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 3  # t = 0, 0.05, 0.1
    assert (out / "config.txt").exists()
    assert (out / "report.txt").exists()
    snaps = sorted(p.name for p in out.glob("*.snap"))
    assert snaps and all(n.startswith(("u-", "tau-")) for n in snaps)


def test_run_reports_cfl_violation(tmp_path):
    cfg = parse_file(quick_config(tmp_path, **{
        "init.preset": "taylor-green", "init.amplitude": "1.0",
        "time.dt": "10.0", "time.t_end": "20.0"}))
    assert run(cfg, out_dir=tmp_path / "cfl") == 2


def test_run_rejects_invalid_config(tmp_path):
    cfg = parse_file(quick_config(tmp_path))
    cfg.kmax = 100
    assert run(cfg, out_dir=tmp_path / "bad") == 1


def test_runs_are_byte_identical(tmp_path):
    cfg_a = parse_file(quick_config(tmp_path))
    cfg_b = parse_file(quick_config(tmp_path))
    assert run(cfg_a, out_dir=tmp_path / "a") == 0
    assert run(cfg_b, out_dir=tmp_path / "b") == 0
    assert (tmp_path / "a" / "energies.csv").read_bytes() \
        == (tmp_path / "b" / "energies.csv").read_bytes()


# ------------------------------------------------------- cli

def test_cli_linear_table_lists_reference_eigenvalues(capsys):
    assert main(["linear", "--kmax", "2"]) == 0
    out = capsys.readouterr().out
    rows = {line.split(",")[0]: line.split(",")[1:]
            for line in out.strip().splitlines()[1:]}
    re_p, im_p, re_m, im_m = (float(x) for x in rows["1"])
    assert abs(re_p + 0.5) < 1e-12 and abs(im_p - 0.5) < 1e-12
    assert abs(re_m + 0.5) < 1e-12 and abs(im_m + 0.5) < 1e-12
    re_p, im_p, re_m, im_m = (float(x) for x in rows["2"])
    assert abs(re_p + 1.0) < 1e-9 and abs(im_p) < 1e-9
    assert abs(re_m + 1.0) < 1e-9 and abs(im_m) < 1e-9
    assert set(rows) == {"1", "2", "3", "4", "5", "6", "8", "9", "12"}


def test_cli_verify_writes_jsonl(tmp_path, capsys):
    out = tmp_path / "reports.jsonl"
    code = main(["verify", "--seed", "5", "--n", "16", "--trials", "2",
                 "--out", str(out)])
    printed = capsys.readouterr().out
    assert code == 0
    assert "[identity]" in printed and "[control]" in printed
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 12
    assert all(r["pass"] for r in rows)
    kinds = {r["kind"] for r in rows}
    assert kinds == {"identity", "negative-control"}


def test_cli_run_and_missing_config(tmp_path, capsys):
    cfg = quick_config(tmp_path)
    assert main(["run", str(cfg), "--out", str(tmp_path / "r")]) == 0
    assert (tmp_path / "r" / "energies.csv").exists()
    assert main(["run", str(tmp_path / "nope.cfg")]) == 1
    assert "config error" in capsys.readouterr().err


def test_cli_sweep_writes_variants_and_summary(tmp_path):
    cfg = quick_config(tmp_path)
    out = tmp_path / "sweep"
    code = main(["sweep", str(cfg), "--vary", "params.mu1=0.5,1.0",
                 "--out", str(out)])
    assert code == 0
    assert (out / "params.mu1-0.5" / "energies.csv").exists()
    assert (out / "params.mu1-1.0" / "energies.csv").exists()
    summary = (out / "sweep-summary.csv").read_text().splitlines()
    assert summary[0].startswith("variant,exit")
    assert len(summary) == 3


def test_cli_sweep_rejects_malformed_vary(tmp_path, capsys):
    cfg = quick_config(tmp_path)
    assert main(["sweep", str(cfg), "--vary", "params.mu1"]) == 1
    assert "sweep error" in capsys.readouterr().err


def test_cli_hookean_consistency_quick(tmp_path):
    path = tmp_path / "hk.cfg"
    path.write_text("grid.n = 16\nmodel = hookean\n"
                    "init.preset = hookean-generic\ninit.amplitude = 0.01\n"
                    "init.kmax = 3\ninit.seed = 2\n"
                    "time.dt = 0.05\ntime.t_end = 0.2\n"
                    "time.diag_interval = 2\n", encoding="ascii")
    out = tmp_path / "hk"
    assert main(["hookean-consistency", str(path), "--out", str(out)]) == 0
    lines = (out / "consistency.csv").read_text().splitlines()
    assert lines[0] == "t,g_minus_tau_h2,u_drift_l2,g_h2,tau_h2"
    assert len(lines) >= 3
    report = (out / "report.txt").read_text()
    assert "max conformation drift" in report
