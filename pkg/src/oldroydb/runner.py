"""Experiment drivers: configured runs, co-evolution checks, sweeps.

Output layout per run directory:
  config.txt    resolved configuration echo
  energies.csv  one row per diagnostic step, append-only, flushed
  report.txt    late-time fits and monitor summary
  *.snap        optional field snapshots (text header + raw float64)
"""

import copy
import os
import sys
from pathlib import Path

import numpy as np

from . import spectral as sp
from .config import KEYS, ConfigError, OutOfRange, UnknownKey, _cast, render, validate
from .energetics import (NORM_COLUMNS, EnergyAccumulator, NonPositiveSeries,
                         compute_norms, decay_fit, exponential_rate,
                         closure_ratio_monitors)
from .hookean import HookeanState, reduced_params, to_conformation
from .identities import run_suite
from .integrate import (CflViolation, HookeanProblem, IntegratorConfig,
                        NonFinite, OldroydProblem, ifrk4_step, run_integration)
from .model import OldroydState
from .presets import BadPreset, make_initial
from .spectral import Grid, SpectralTensor

CSV_COLUMNS = ("t", *NORM_COLUMNS, "e0", "e1", "e2",
               "tau_mean_frobenius", "dt", "cfl")

OUTPUT_ROOT_ENV = "OLDROYDB_OUTPUT_ROOT"

FIT_SERIES = ("u_l2", "ptau_l2")


def _fmt(x):
    return format(float(x), ".17g")


def resolve_out_dir(cfg):
    if cfg.out_dir:
        return Path(cfg.out_dir)
    return Path(os.environ.get(OUTPUT_ROOT_ENV, ".")) / "out"


# -------------------------------------------------- snapshot format

def write_snapshot(path, name, field, time):
    """Text header plus raw little-endian float64 physical samples.

    Sample order is x-fastest within each component; symmetric tensors
    store their six independent components (11, 22, 33, 12, 13, 23).
    """
    samples = sp.inverse(field)
    n = field.grid.n
    comps = samples.reshape(-1, n, n, n)
    header = (f"field = {name}\n"
              f"grid_n = {n}\n"
              f"components = {comps.shape[0]}\n"
              f"time = {_fmt(time)}\n"
              f"byteorder = little\n"
              f"dtype = float64\n\n")
    payload = np.ascontiguousarray(
        comps.transpose(0, 3, 2, 1)).astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload)


def read_snapshot(path):
    """Inverse of write_snapshot: (meta dict, samples[comp, x, y, z])."""
    with open(path, "rb") as fh:
        raw = fh.read()
    head, _, body = raw.partition(b"\n\n")
    meta = {}
    for line in head.decode("ascii").splitlines():
        key, _, value = line.partition("=")
        meta[key.strip()] = value.strip()
    n = int(meta["grid_n"])
    comps = int(meta["components"])
    flat = np.frombuffer(body, dtype="<f8", count=comps * n ** 3)
    samples = flat.reshape(comps, n, n, n).transpose(0, 3, 2, 1)
    return meta, np.ascontiguousarray(samples)


def _snapshot_fields(state):
    if isinstance(state, HookeanState):
        return (("u", state.u), ("U", state.U))
    return (("u", state.u), ("tau", state.tau))


# -------------------------------------------------- fits and reports

def _series(records, column):
    ts = np.array([r.t for r in records])
    vals = np.array([r.norms[column] for r in records])
    return ts, vals


def _fit_series(records, window):
    """DecayFit pairs per monitored series; None where the fit is undefined."""
    fits = {}
    for col in FIT_SERIES:
        ts, vals = _series(records, col)
        for kind, fitter in (("alg", decay_fit), ("exp", exponential_rate)):
            try:
                fits[(kind, col)] = fitter(ts, vals, window)
            except (NonPositiveSeries, ValueError):
                fits[(kind, col)] = None
    return fits


def _monotone(values):
    return bool(np.all(np.diff(values) >= -1e-12 * np.maximum(values[1:], 1.0)))


def _write_report(path, cfg, records, fits):
    last = records[-1]
    r1, r2 = closure_ratio_monitors(records)
    e_series = {name: np.array([getattr(r, name) for r in records])
                for name in ("e0", "e1", "e2")}
    lo, hi = cfg.fit_window()
    lines = [
        f"final time: {_fmt(last.t)}",
        f"diagnostic rows: {len(records)}",
        f"e0 final: {_fmt(last.e0)}",
        f"e1 final: {_fmt(last.e1)}",
        f"e2 final: {_fmt(last.e2)}",
        "energy series monotone: " + ("yes" if all(
            _monotone(v) for v in e_series.values()) else "NO"),
        f"closure ratio e0/(e0(0)+e0^1.5+e2^1.5) max: {r1:.6g}",
        f"closure ratio e2/(e0+e0^1.5+e2^1.5) max: {r2:.6g}",
        f"fit window: [{_fmt(lo)}, {_fmt(hi)}]",
    ]
    for col in FIT_SERIES:
        for kind, label in (("alg", "algebraic exponent vs (1+t)"),
                            ("exp", "exponential rate")):
            fit = fits[(kind, col)]
            if fit is None:
                lines.append(f"{col} {label}: n/a (series not fittable)")
            else:
                lines.append(f"{col} {label}: {fit.exponent:.6g} "
                             f"(r^2 = {fit.r_squared:.6g}, {fit.npoints} points)")
    if cfg.report_identities:
        lines.append("identity suite (n = 16, 10 trials, seed 42):")
        for rep in run_suite(seed=42, n=16, trials=10):
            status = "pass" if rep.passed else "FAIL"
            lines.append(f"  {rep.name}: residual {rep.residual:.3e} "
                         f"tolerance {rep.tolerance:.0e} {status}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# -------------------------------------------------- single run

def _build_problem(cfg, grid, params):
    state = make_initial(cfg.preset, cfg.amplitude, cfg.kmax, cfg.seed, grid)
    if cfg.model == "hookean":
        if isinstance(state, OldroydState):
            zero = np.zeros((3, 3, grid.n, grid.n, grid.nz), complex)
            state = HookeanState(state.u, SpectralTensor(grid, zero))
        return HookeanProblem(grid, params), state
    problem = OldroydProblem(grid, params,
                             linearized=(cfg.model == "linearized"),
                             project_tau_mean=cfg.project_tau_mean)
    return problem, state


def _drive(cfg, out):
    """Integrate one configured run into `out`; returns the record list."""
    validate(cfg)
    grid = Grid(cfg.n)
    params = cfg.params()
    problem, state0 = _build_problem(cfg, grid, params)
    icfg = IntegratorConfig(cfg.dt, cfg.t_end, cfl_limit=cfg.cfl_limit,
                            diag_interval=cfg.diag_interval)

    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(render(cfg), encoding="utf-8")
    acc = EnergyAccumulator()
    records = []
    hookean = cfg.model == "hookean"

    fh = open(out / "energies.csv", "w", encoding="ascii", newline="\n")
    try:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        fh.flush()

        def on_diag(dp):
            view = dp.state
            if hookean:
                view = OldroydState(view.u, to_conformation(view.U))
            rec = acc.push(dp.t, compute_norms(view))
            records.append(rec)
            row = ([dp.t] + [rec.norms[c] for c in NORM_COLUMNS]
                   + [rec.e0, rec.e1, rec.e2,
                      rec.norms["tau_mean_frobenius"], dp.dt, dp.cfl])
            fh.write(",".join(_fmt(x) for x in row) + "\n")
            fh.flush()
            idx = len(records) - 1
            final = dp.t >= cfg.t_end - 1e-12
            if cfg.snapshots and (idx % cfg.snapshot_interval == 0 or final):
                for name, field in _snapshot_fields(dp.state):
                    write_snapshot(out / f"{name}-{dp.step:06d}.snap",
                                   name, field, dp.t)

        run_integration(problem, state0, icfg, on_diag)
    finally:
        fh.close()

    fits = _fit_series(records, cfg.fit_window())
    _write_report(out / "report.txt", cfg, records, fits)
    return records, fits


def run(cfg, out_dir=None):
    """Exit-code wrapper: 0 ok, 1 config, 2 CFL, 3 non-finite state."""
    try:
        validate(cfg)
        out = Path(out_dir) if out_dir else resolve_out_dir(cfg)
        _drive(cfg, out)
        return 0
    except (ConfigError, BadPreset, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except CflViolation as exc:
        print(f"cfl violation: {exc}", file=sys.stderr)
        return 2
    except NonFinite as exc:
        print(f"non-finite state: {exc}", file=sys.stderr)
        return 3


# -------------------------------------------------- hookean co-evolution

def _consistency_drive(cfg, out):
    validate(cfg)
    if cfg.model != "hookean":
        raise OutOfRange("model", "consistency check needs model = hookean")
    grid = Grid(cfg.n)
    params = cfg.params()
    hprob = HookeanProblem(grid, params)
    hstate = make_initial(cfg.preset, cfg.amplitude, cfg.kmax, cfg.seed, grid)
    if isinstance(hstate, OldroydState):
        zero = np.zeros((3, 3, grid.n, grid.n, grid.nz), complex)
        hstate = HookeanState(hstate.u, SpectralTensor(grid, zero))
    oprob = OldroydProblem(grid, reduced_params(params))
    g0 = to_conformation(hstate.U)
    ostate = OldroydState(hstate.u, g0)

    # size comparison behind the reduction: conformation data vs raw data
    g_data = sp.sobolev_norm(g0, 3, prefix=-1)
    u_data = sp.sobolev_norm(hstate.U, 3, prefix=-1)
    u_h3 = sp.sobolev_norm(hstate.U, 3)

    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(render(cfg), encoding="utf-8")
    ys_h = hprob.arrays_of(hstate)
    ys_o = oprob.arrays_of(ostate)
    dx = 2.0 * np.pi / grid.n
    nfull = int(np.floor(cfg.t_end / cfg.dt + 1e-9))
    rest = cfg.t_end - nfull * cfg.dt
    sizes = [cfg.dt] * nfull
    if rest > 1e-12 * max(1.0, cfg.t_end):
        sizes.append(rest)

    drifts = []
    fh = open(out / "consistency.csv", "w", encoding="ascii", newline="\n")
    try:
        fh.write("t,g_minus_tau_h2,u_drift_l2,g_h2,tau_h2\n")

        def emit(t):
            hs, os_ = hprob.state_of(ys_h), oprob.state_of(ys_o)
            g = to_conformation(hs.U)
            drift = sp.sobolev_norm(g - os_.tau, 2)
            udrift = sp.l2_norm(hs.u - os_.u)
            row = (t, drift, udrift,
                   sp.sobolev_norm(g, 2), sp.sobolev_norm(os_.tau, 2))
            fh.write(",".join(_fmt(x) for x in row) + "\n")
            fh.flush()
            drifts.append((t, drift))

        emit(0.0)
        t = 0.0
        for istep, h in enumerate(sizes, start=1):
            speed = max(hprob.max_speed(ys_h), oprob.max_speed(ys_o))
            if speed * h / dx > cfg.cfl_limit:
                raise CflViolation(f"cfl exceeded at t = {t:.6g}")
            ys_h = ifrk4_step(hprob, ys_h, h)
            ys_o = ifrk4_step(oprob, ys_o, h)
            t = istep * cfg.dt if istep <= nfull else cfg.t_end
            for arr in (*ys_h, *ys_o):
                if not np.all(np.isfinite(arr)):
                    raise NonFinite(f"non-finite state at t = {t:.6g}")
            if istep % cfg.diag_interval == 0 or istep == len(sizes):
                emit(t)
    finally:
        fh.close()

    worst = max(d for _, d in drifts)
    lines = [
        f"final time: {_fmt(drifts[-1][0])}",
        f"max conformation drift (H2): {worst:.6e}",
        f"final conformation drift (H2): {drifts[-1][1]:.6e}",
        f"conformation data norm: {_fmt(g_data)}",
        f"displacement data norm: {_fmt(u_data)}",
        f"displacement H3 squared: {_fmt(u_h3 ** 2)}",
        f"data comparison ratio: {g_data / max(u_data + u_h3 ** 2, 1e-300):.6g}",
    ]
    (out / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return worst


def hookean_consistency(cfg, out_dir=None):
    """Co-evolve (u, F) and the reduced stress system; exit-code wrapper."""
    try:
        out = Path(out_dir) if out_dir else resolve_out_dir(cfg)
        _consistency_drive(cfg, out)
        return 0
    except (ConfigError, BadPreset, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except CflViolation as exc:
        print(f"cfl violation: {exc}", file=sys.stderr)
        return 2
    except NonFinite as exc:
        print(f"non-finite state: {exc}", file=sys.stderr)
        return 3


# -------------------------------------------------- parameter sweeps

def _variant(cfg, key, raw_value):
    if key not in KEYS:
        raise UnknownKey(key)
    attr, typ = KEYS[key]
    vcfg = copy.copy(cfg)
    try:
        setattr(vcfg, attr, _cast(raw_value, typ))
    except (ValueError, TypeError):
        raise OutOfRange(key, f"cannot cast {raw_value!r}") from None
    return validate(vcfg)


def sweep(cfg, key, values, out_dir=None):
    """One run per value of `key`; summary table across variants."""
    try:
        validate(cfg)
        variants = [(v, _variant(cfg, key, v)) for v in values]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    root = Path(out_dir) if out_dir else resolve_out_dir(cfg)
    root.mkdir(parents=True, exist_ok=True)
    worst_code = 0
    rows = []
    for value, vcfg in variants:
        vdir = root / f"{key}-{value}"
        vcfg.out_dir = str(vdir)
        code = 0
        fits = {}
        finals = (float("nan"),) * 3
        try:
            records, fits = _drive(vcfg, vdir)
            last = records[-1]
            finals = (last.e0, last.e1, last.e2)
        except (ConfigError, BadPreset, ValueError) as exc:
            print(f"{key} = {value}: config error: {exc}", file=sys.stderr)
            code = 1
        except CflViolation as exc:
            print(f"{key} = {value}: cfl violation: {exc}", file=sys.stderr)
            code = 2
        except NonFinite as exc:
            print(f"{key} = {value}: non-finite state: {exc}", file=sys.stderr)
            code = 3
        worst_code = max(worst_code, code)

        def _exp(kind, col):
            fit = fits.get((kind, col))
            return fit.exponent if fit is not None else float("nan")

        rows.append([f"{key}={value}", code,
                     _exp("alg", "u_l2"), _exp("alg", "ptau_l2"),
                     _exp("exp", "u_l2"), _exp("exp", "ptau_l2"), *finals])

    with open(root / "sweep-summary.csv", "w", encoding="ascii",
              newline="\n") as fh:
        fh.write("variant,exit,alg_exp_u_l2,alg_exp_ptau_l2,"
                 "exp_rate_u_l2,exp_rate_ptau_l2,e0_final,e1_final,e2_final\n")
        for row in rows:
            fh.write(row[0] + "," + str(row[1]) + ","
                     + ",".join(_fmt(x) for x in row[2:]) + "\n")
    return worst_code
