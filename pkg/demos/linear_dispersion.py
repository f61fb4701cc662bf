# Per-mode linear dynamics: damped-wave dispersion and exact propagation.
#
# Linearized about rest, each Fourier mode of (u, tau) reduces to a 2x2
# system in (u_hat, v_hat) where v = P div tau:
#
#   d/dt [u_hat]   [ -mu |k|^2      mu1      ] [u_hat]
#        [v_hat] = [ -mu2 |k|^2 / 2   -a     ] [v_hat]
#
# At the default parameters (mu = mu1 = mu2 = a = 1) the eigenvalues sweep
# from a complex pair (underdamped oscillation) on the unit shell, through
# a double root at |k|^2 = 2, to two real rates (overdamped) beyond.  The
# script prints that dispersion table, then integrates one underdamped mode
# with the nonlinear time stepper at tiny amplitude and compares against the
# closed-form matrix exponential.

import numpy as np

import oldroydb.spectral as sp
from oldroydb.linear import mode_eigenvalues, propagate_field
from oldroydb.model import ModelParams, OldroydState, projected_stress_div
from oldroydb.integrate import (IntegratorConfig, OldroydProblem,
                                run_integration)


def dispersion_table(params, kmax=3):
    print(" |k|^2   lambda_plus              lambda_minus")
    reps = {}
    for kx in range(1, kmax + 1):
        for ky in range(kmax + 1):
            for kz in range(kmax + 1):
                k2 = kx * kx + ky * ky + kz * kz
                if k2 <= kmax * kmax:
                    reps.setdefault(k2, (kx, ky, kz))
    for k2 in sorted(reps):
        lp, lm = mode_eigenvalues(reps[k2], params)
        print(f"  {k2:3d}   {lp.real:+.4f} {lp.imag:+.4f}i"
              f"      {lm.real:+.4f} {lm.imag:+.4f}i")


def eigen_initial_state(grid, params, k, amplitude):
    """Unit-shell state aligned with the decaying branch at wavevector k."""
    lam_plus, _ = mode_eigenvalues(k, params)
    rng = np.random.default_rng(7)
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    kv = np.asarray(k, float)
    z -= kv * (kv @ z) / (kv @ kv)
    z *= amplitude / np.linalg.norm(z)
    u = sp.field_from_modes(grid, {k: z}, sp.SpectralVector)
    v_target = (1.0 + lam_plus) * z
    k2 = float(kv @ kv)
    pair = (np.outer(v_target, kv) + np.outer(kv, v_target)) / (1j * k2)
    comps = [pair[0, 0], pair[1, 1], pair[2, 2],
             pair[0, 1], pair[0, 2], pair[1, 2]]
    tau = sp.field_from_modes(grid, {k: np.array(comps)},
                              sp.SpectralSymTensor)
    return OldroydState(u, tau)


def main():
    params = ModelParams()
    print("dispersion at mu = mu1 = mu2 = a = 1")
    print("-" * 60)
    dispersion_table(params)
    print()

    grid = sp.Grid(16)
    k = (1, 0, 0)
    state0 = eigen_initial_state(grid, params, k, amplitude=1e-3)
    problem = OldroydProblem(grid, params)

    print("eigenmode decay at k = (1,0,0): ||u(t)|| should follow "
          "exp(-t/2) ||u(0)||")
    print("-" * 60)
    print("    t     ||u||/||u0||   exp(-t/2)      stepper vs exact")
    u0 = sp.sobolev_norm(state0.u, 0)
    v0 = projected_stress_div(state0.tau)
    state, t = state0, 0.0
    for t_stop in (1.0, 2.0, 3.0, 4.0):
        state = run_integration(problem, state,
                                IntegratorConfig(dt=0.01, t_end=t_stop - t))
        t = t_stop
        exact_u, _ = propagate_field(state0.u, v0, params, t)
        ratio = sp.sobolev_norm(state.u, 0) / u0
        mismatch = sp.sobolev_norm(state.u - exact_u, 0)
        print(f"  {t:4.1f}   {ratio:.8f}   {np.exp(-t / 2):.8f}"
              f"   {mismatch:.2e}")
    print()
    print("the stepper error above is the nonlinear feedback of the tiny")
    print("amplitude plus O(dt^4) time discretization, both far below the")
    print("linear decay it tracks")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
