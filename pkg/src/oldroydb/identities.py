"""Round-off-exact checks of the cancellations the energy method rests on.

Each verifier returns an IdentityReport whose residual is relative with
a floor of 1 in the denominator.  run_suite exercises all of them on
random band-limited states, together with negative controls that break
exactly the hypothesis each identity needs (stress symmetry for the
coupled pairing, a solenoidal velocity for the others, the sign of the
quadratic stress term for the conformation closure).
"""

from dataclasses import dataclass, replace

import numpy as np

from . import model as md
from . import spectral as sp
from .hookean import HookeanState, verify_g_closure
from .model import ModelParams, OldroydState, projected_stress_div
from .spectral import SpectralTensor, SpectralVector

TOLERANCES = {
    "commutator": 1e-10,
    "n1": 1e-12,
    "m1": 1e-12,
    "projection-fact": 1e-12,
    "eqq": 1e-11,
    "g-closure": 1e-11,
}
CONTROL_FLOOR = 1e-6


@dataclass(frozen=True)
class IdentityReport:
    name: str
    residual: float
    tolerance: float
    passed: bool
    trials: int
    seed: int
    kind: str = "identity"


def _report(name, residual, trials=1, seed=-1):
    tol = TOLERANCES[name]
    res = float(residual)
    return IdentityReport(name, res, tol, res <= tol, trials, seed)


def _control_report(name, residual, trials, seed):
    res = float(residual)
    return IdentityReport(name, res, CONTROL_FLOOR, res > CONTROL_FLOOR,
                          trials, seed, kind="negative-control")


def commutator_residual(u, tau):
    """P div(u . grad tau) against its three-term expansion.

    Holds for arbitrary u and tau: the derivation is the product rule
    plus the Hodge split of div tau, so there is no negative control.
    """
    g = u.grid
    lhs = sp.leray_project(sp.tensor_divergence(sp.advect(u, tau)))
    t1 = sp.advect(u, projected_stress_div(tau))

    gu = sp.pad_to_physical(g, sp.vector_gradient(u).coeffs)
    gt = sp.pad_to_physical(g, md._grad_coeffs(g, tau.coeffs))[sp.SYM_OF_FULL]
    t2 = sp.physical_to_base(g, np.einsum("ljxyz,ijlxyz->ixyz", gu, gt))

    psi = sp.inv_laplacian(sp.double_divergence(tau))
    gpsi = sp.pad_to_physical(g, sp.gradient(psi).coeffs)
    t3 = sp.physical_to_base(g, np.einsum("lixyz,lxyz->ixyz", gu, gpsi))

    rhs = sp.leray_project(t1 + SpectralVector(g, t2) - SpectralVector(g, t3))
    return sp.l2_norm(lhs - rhs) / max(1.0, sp.l2_norm(lhs))


def n1_residual(u, tau):
    """Coupled pairing sum over derivative levels 0..3.

    The first group pairs P div tau with u, the second D(u) with tau;
    for symmetric tau and solenoidal u the groups cancel mode by mode.
    """
    tf = tau if isinstance(tau, SpectralTensor) else sp.sym_to_full(tau)
    v = sp.leray_project(sp.tensor_divergence(tf))
    dee = sp.sym_to_full(sp.sym_grad(u))
    first = [sp.weighted_pairing(v, u, j - 1) for j in range(4)]
    second = [sp.weighted_pairing(dee, tf, j - 1) for j in range(4)]
    scale = sum(abs(x) for x in first)
    return abs(sum(first) + sum(second)) / max(1.0, scale)


def m1_residual(u, tau):
    """Gradient-level pairing sum, the one that buys stress dissipation.

    Pairs grad^{j+1} div tau with grad^{j+1} u and grad^j Lap u with
    grad^j P div tau (the factor-2 stress weighting already folded in);
    vanishes exactly when u is divergence-free.
    """
    tf = tau if isinstance(tau, SpectralTensor) else sp.sym_to_full(tau)
    s = sp.tensor_divergence(tf)
    v = sp.leray_project(s)
    lap_u = sp.laplacian(u)
    first = [sp.weighted_pairing(s, u, j + 1) for j in range(2)]
    second = [sp.weighted_pairing(lap_u, v, j) for j in range(2)]
    scale = sum(abs(x) for x in first)
    return abs(sum(first) + sum(second)) / max(1.0, scale)


def projection_residual(u):
    """P div D(u) = Lap u / 2 for solenoidal u."""
    lhs = sp.leray_project(sp.tensor_divergence(sp.sym_grad(u)))
    rhs = 0.5 * sp.laplacian(u)
    return sp.l2_norm(lhs - rhs) / max(1.0, sp.l2_norm(rhs))


def eqq_residual(u, tau, params=None):
    """Divergence of the stress equation collapses to Lap u / 2.

    Evaluated at mu2 = 1 and a = 0 (the remaining parameters are taken
    from params): div dtau + div(u . grad tau) + div Q - Lap u / 2.
    """
    p = replace(params or ModelParams(), mu2=1.0, a=0.0)
    g = u.grid
    _, dtau = md.oldroyd_rhs(OldroydState(u, tau), p)
    up = sp.pad_to_physical(g, u.coeffs)
    gup = sp.pad_to_physical(g, md._grad_coeffs(g, u.coeffs))
    gtp = sp.pad_to_physical(g, md._grad_coeffs(g, tau.coeffs))
    taufp = sp.pad_to_physical(g, tau.coeffs[sp.SYM_OF_FULL])
    transported = sp.physical_to_base(
        g, md._advect_physical(up, gtp, (6,)) + md._q_sym_physical(taufp, gup, p.b))
    lhs = SpectralVector(g, md._div_sym_arr(g, dtau.coeffs + transported))
    rhs = 0.5 * sp.laplacian(u)
    return sp.l2_norm(lhs - rhs) / max(1.0, sp.l2_norm(rhs))


def verify_commutator(u, tau):
    return _report("commutator", commutator_residual(u, tau))


def verify_n1(u, tau):
    return _report("n1", n1_residual(u, tau))


def verify_m1(u, tau):
    return _report("m1", m1_residual(u, tau))


def verify_projection_fact(u):
    return _report("projection-fact", projection_residual(u))


def verify_eqq(u, tau, params=None):
    return _report("eqq", eqq_residual(u, tau, params))


def _unit(field):
    return field * (1.0 / max(sp.l2_norm(field), 1e-300))


def _trial_fields(grid, rng, kmax, kmax_cubic):
    u = _unit(sp.random_vector(grid, rng, kmax, solenoidal=True))
    tau = _unit(sp.random_sym_tensor(grid, rng, kmax))
    # the closure check is cubic in (u, U); budget the whole bandwidth
    # ku + 2 kU <= n/2 - 1 so both evaluation paths stay alias-free
    ku = (grid.n // 2 - 1) - 2 * kmax_cubic
    u_small = _unit(sp.random_vector(grid, rng, ku, solenoidal=True))
    U = _unit(sp.random_tensor(grid, rng, kmax_cubic))
    grad_part = _unit(sp.gradient(sp.random_scalar(grid, rng, kmax)))
    skew = sp.random_tensor(grid, rng, kmax)
    skew = 0.5 * (skew - SpectralTensor(grid, skew.coeffs.transpose(1, 0, 2, 3, 4)))
    return u, tau, u_small, U, grad_part, _unit(skew)


def run_suite(seed=42, n=32, trials=100):
    """All identity checks plus their negative controls, seeded.

    Returns one IdentityReport per check: residual is the worst trial
    (max for identities, min for controls), and pass means every trial
    landed on the right side of its threshold.
    """
    if n < 16:
        raise ValueError("suite needs n >= 16")
    if trials == 0:
        return []
    grid = sp.Grid(n)
    kmax = n // 3
    kmax_cubic = (n // 2 - 1) // 3  # conformation is quadratic in U
    params = ModelParams(b=0.3)

    worst = {name: 0.0 for name in TOLERANCES}
    controls = {"n1!nonsymmetric": np.inf, "n1!gradient-u": np.inf,
                "m1!gradient-u": np.inf, "projection-fact!gradient-u": np.inf,
                "eqq!gradient-u": np.inf, "g-closure!b-flipped": np.inf}

    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        u, tau, u_small, U, grad_part, skew = _trial_fields(
            grid, rng, kmax, kmax_cubic)
        u_bad = u + 0.5 * grad_part
        tau_bad = sp.sym_to_full(tau) + 0.5 * skew
        hstate = HookeanState(u_small, U)

        worst["commutator"] = max(worst["commutator"], commutator_residual(u, tau))
        worst["n1"] = max(worst["n1"], n1_residual(u, tau))
        worst["m1"] = max(worst["m1"], m1_residual(u, tau))
        worst["projection-fact"] = max(worst["projection-fact"],
                                       projection_residual(u))
        worst["eqq"] = max(worst["eqq"], eqq_residual(u, tau, params))
        worst["g-closure"] = max(worst["g-closure"], verify_g_closure(hstate))

        controls["n1!nonsymmetric"] = min(controls["n1!nonsymmetric"],
                                          n1_residual(u, tau_bad))
        controls["n1!gradient-u"] = min(controls["n1!gradient-u"],
                                        n1_residual(u_bad, tau))
        controls["m1!gradient-u"] = min(controls["m1!gradient-u"],
                                        m1_residual(u_bad, tau))
        controls["projection-fact!gradient-u"] = min(
            controls["projection-fact!gradient-u"], projection_residual(u_bad))
        controls["eqq!gradient-u"] = min(controls["eqq!gradient-u"],
                                         eqq_residual(u_bad, tau, params))
        controls["g-closure!b-flipped"] = min(
            controls["g-closure!b-flipped"], verify_g_closure(hstate, b=1.0))

    reports = [_report(name, res, trials=trials, seed=seed)
               for name, res in worst.items()]
    reports += [_control_report(name, res, trials, seed)
                for name, res in controls.items()]
    return reports
