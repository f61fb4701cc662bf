# Small-data run with time-weighted energy monitoring.
#
# Starting from a small solenoidal velocity band and zero stress, the full
# nonlinear system is marched with the integrating-factor RK4 stepper while
# the runner logs three running energy functionals:
#
#   e0  unweighted:  sup of the H^3-level data norms plus the time integral
#       of the dissipation terms
#   e1  the same bookkeeping under a (1+t) weight
#   e2  under a (1+t)^2 weight with the stress divergence measured one
#       derivative higher
#
# All three are nondecreasing by construction (running sup + integral), so
# the interesting question is whether they stay bounded on the order of
# their initial size.  For small data they do: the script checks the
# doubling bound e0(final) <= 2 e0(0) + tiny and prints the fitted decay
# exponents of the velocity and projected stress divergence.

import csv
import tempfile
from pathlib import Path

from oldroydb.config import RunConfig
from oldroydb.runner import run


def read_energies(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {key: [float(r[key]) for r in rows] for key in rows[0]}


def main():
    cfg = RunConfig(n=16, dt=0.02, t_end=10.0, diag_interval=25,
                    amplitude=1e-2, kmax=3, seed=11)
    out = Path(tempfile.mkdtemp(prefix="oldroydb-demo-")) / "run"
    code = run(cfg, out)
    if code != 0:
        print(f"run failed with exit code {code}")
        return code

    cols = read_energies(out / "energies.csv")
    print(f"artifacts in {out}")
    print()
    print("    t      ||u||_L2     ||P div tau||_L2        e0        e2")
    for i in range(0, len(cols["t"])):
        print(f"  {cols['t'][i]:5.1f}   {cols['u_l2'][i]:.4e}"
              f"     {cols['ptau_l2'][i]:.4e}     {cols['e0'][i]:.6f}"
              f"  {cols['e2'][i]:.6f}")
    print()

    e0 = cols["e0"]
    grew = e0[-1] / e0[0]
    mono = all(b >= a for a, b in zip(e0, e0[1:]))
    print(f"e0 growth over the run: {grew:.4f}x its initial value "
          f"(doubling bound asks <= 2)")
    print(f"e0 nondecreasing: {mono}")
    print()
    print("fitted decay rates from report.txt:")
    for line in (out / "report.txt").read_text().splitlines():
        if "algebraic exponent" in line or "exponential rate" in line:
            print("  " + line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
