"""Command-line surface: run, verify, linear, hookean-consistency, sweep."""

import argparse
import json
import sys

from . import runner
from .config import ConfigError, parse_file
from .identities import CONTROL_FLOOR, run_suite
from .linear import mode_eigenvalues
from .model import ModelParams


def _add_config_arg(sub):
    sub.add_argument("config", help="path to a key = value config file")
    sub.add_argument("--out", default=None, help="output directory override")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="oldroydb",
        description="pseudo-spectral Oldroyd-B simulator and identity checker")
    cmds = parser.add_subparsers(dest="command", required=True)

    _add_config_arg(cmds.add_parser(
        "run", help="integrate a configured model, write energies.csv"))

    ver = cmds.add_parser("verify", help="run the algebraic identity suite")
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--n", type=int, default=32, help="grid size")
    ver.add_argument("--trials", type=int, default=100)
    ver.add_argument("--out", default=None,
                     help="also write line-delimited JSON records here")

    lin = cmds.add_parser("linear",
                          help="per-mode eigenvalue table of the linear system")
    lin.add_argument("--kmax", type=int, default=4)
    lin.add_argument("--mu", type=float, default=1.0)
    lin.add_argument("--mu1", type=float, default=1.0)
    lin.add_argument("--mu2", type=float, default=1.0)
    lin.add_argument("--a", type=float, default=0.0)
    lin.add_argument("--out", default=None, help="CSV path (default stdout)")

    _add_config_arg(cmds.add_parser(
        "hookean-consistency",
        help="co-evolve deformation and stress forms, track their drift"))

    swp = cmds.add_parser("sweep", help="repeat a run over parameter variants")
    _add_config_arg(swp)
    swp.add_argument("--vary", required=True, metavar="KEY=V1,V2,...",
                     help="config key and comma-separated values")

    return parser


def _load(path):
    try:
        return parse_file(path)
    except FileNotFoundError:
        print(f"config error: no such file {path!r}", file=sys.stderr)
        return None
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return None


def _cmd_run(args):
    cfg = _load(args.config)
    return 1 if cfg is None else runner.run(cfg, out_dir=args.out)


def _cmd_verify(args):
    reports = run_suite(seed=args.seed, n=args.n, trials=args.trials)
    ok = True
    for rep in reports:
        ok = ok and rep.passed
        if rep.kind == "negative-control":
            status = "ok (control fails as required)" if rep.passed \
                else "VIOLATION (control did not fail)"
            print(f"[control]  {rep.name}: min residual {rep.residual:.3e} "
                  f"floor {CONTROL_FLOOR:.0e} -> {status}")
        else:
            status = "pass" if rep.passed else "FAIL"
            print(f"[identity] {rep.name}: max residual {rep.residual:.3e} "
                  f"tolerance {rep.tolerance:.0e} -> {status}")
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            for rep in reports:
                fh.write(json.dumps({
                    "name": rep.name, "kind": rep.kind,
                    "residual": rep.residual, "tolerance": rep.tolerance,
                    "pass": rep.passed, "trials": rep.trials,
                    "seed": rep.seed}, sort_keys=True) + "\n")
    print(f"{'all checks passed' if ok else 'FAILURES present'} "
          f"({len(reports)} reports, seed {args.seed}, "
          f"n {args.n}, trials {args.trials})")
    return 0 if ok else 1


def _cmd_linear(args):
    params = ModelParams(mu=args.mu, mu1=args.mu1, mu2=args.mu2, a=args.a)
    rep = {}
    for i in range(-args.kmax, args.kmax + 1):
        for j in range(-args.kmax, args.kmax + 1):
            for l in range(-args.kmax, args.kmax + 1):
                k2 = i * i + j * j + l * l
                if k2:
                    rep.setdefault(k2, (i, j, l))
    lines = ["k2,re_plus,im_plus,re_minus,im_minus"]
    for k2 in sorted(rep):
        lp, lm = mode_eigenvalues(rep[k2], params)
        lines.append(f"{k2},{lp.real:.12g},{lp.imag:.12g},"
                     f"{lm.real:.12g},{lm.imag:.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_consistency(args):
    cfg = _load(args.config)
    return 1 if cfg is None else runner.hookean_consistency(cfg, out_dir=args.out)


def _cmd_sweep(args):
    key, eq, values = args.vary.partition("=")
    if not eq or not values:
        print("sweep error: --vary needs KEY=V1,V2,...", file=sys.stderr)
        return 1
    cfg = _load(args.config)
    if cfg is None:
        return 1
    return runner.sweep(cfg, key.strip(),
                        [v.strip() for v in values.split(",")],
                        out_dir=args.out)


_DISPATCH = {
    "run": _cmd_run,
    "verify": _cmd_verify,
    "linear": _cmd_linear,
    "hookean-consistency": _cmd_consistency,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    return _DISPATCH[args.command](args)
