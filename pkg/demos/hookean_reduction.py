# Hookean elasticity embeds into Oldroyd-B: a co-evolution check.
#
# For an incompressible viscoelastic solid with Hookean energy, write the
# deformation in Lagrangian displacement form and set G = F F^T - I.  A
# direct calculation shows G obeys the Oldroyd-B stress equation with
#
#     mu2 = 2,   a = 0,   b = -1,
#
# i.e. relaxation switched off and the lower-convected quadratic coupling.
# This script evolves the displacement-gradient system (u, U) and, side by
# side, the stress system (u, tau) started from tau(0) = G(0), using the
# same grid and stepper.  If the reduction is exact at the discrete level,
# the reconstructed G(t) and the evolved tau(t) stay identical to round-off
# plus time-integration error.
#
# The runner writes consistency.csv with the drift history; here we print
# that table and the summary report.

import csv
import tempfile
from pathlib import Path

from oldroydb.config import RunConfig
from oldroydb.runner import hookean_consistency


def main():
    cfg = RunConfig(n=16, model="hookean", preset="hookean-generic",
                    amplitude=1e-2, kmax=3, seed=9,
                    dt=0.05, t_end=5.0, diag_interval=10)
    out = Path(tempfile.mkdtemp(prefix="oldroydb-demo-")) / "hookean"
    code = hookean_consistency(cfg, out)
    if code != 0:
        print(f"consistency run failed with exit code {code}")
        return code

    with open(out / "consistency.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))

    print(f"artifacts in {out}")
    print()
    print("    t     ||G - tau||_H2     ||G||_H2")
    for r in rows:
        print(f"  {float(r['t']):5.2f}      {float(r['g_minus_tau_h2']):.3e}"
              f"      {float(r['g_h2']):.3e}")
    print()
    for line in (out / "report.txt").read_text().splitlines():
        print(line)
    print()
    worst = max(float(r["g_minus_tau_h2"]) for r in rows)
    scale = max(float(r["g_h2"]) for r in rows)
    print(f"worst drift is {worst / scale:.2e} of the conformation size:")
    print("the two evolutions track each other to time-integration accuracy")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
