"""Incompressible Oldroyd-B dynamics in spectral form.

State is a divergence-free velocity u and a symmetric extra stress tau;
the momentum equation sees the stress through the Leray-projected
divergence, and the stress is driven by the deformation tensor D(u) and
the bilinear rotation/stretching term Q(tau, grad u).
"""

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .spectral import (SpectralSymTensor, SpectralTensor, SpectralVector,
                       SYM_COMPS, SYM_OF_FULL)


@dataclass(frozen=True)
class ModelParams:
    """Coefficients (mu, mu1, mu2, a, b) of the stress-coupled system."""

    mu: float = 1.0
    mu1: float = 1.0
    mu2: float = 1.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.mu < 0 or self.mu1 < 0 or self.mu2 < 0 or self.a < 0:
            raise ValueError("mu, mu1, mu2, a must be nonnegative")
        if not -1.0 <= self.b <= 1.0:
            raise ValueError("slip parameter b must lie in [-1, 1]")


@dataclass(frozen=True)
class OldroydState:
    u: "SpectralVector"
    tau: "SpectralSymTensor"

    def __post_init__(self):
        if not isinstance(self.u, SpectralVector) \
                or not isinstance(self.tau, SpectralSymTensor):
            raise ValueError("state needs a vector u and symmetric tau")
        if self.u.grid != self.tau.grid:
            raise ValueError("u and tau live on different grids")

    @property
    def grid(self):
        return self.u.grid


def projected_stress_div(tau):
    """P div tau, the divergence-free part of the stress forcing."""
    return sp.leray_project(sp.tensor_divergence(tau))


def bilinear_q(tau, u, b=0.0):
    """Q(tau, grad u) = tau Om - Om tau + b (D tau + tau D), dealiased.

    Om and D are the skew and symmetric parts of grad u.  The result is
    symmetrized before truncation to keep the storage contract exact.
    """
    g = tau.grid
    gup = sp.pad_to_physical(g, sp.vector_gradient(u).coeffs)
    taup = sp.pad_to_physical(g, tau.coeffs)[SYM_OF_FULL]
    q6 = _q_sym_physical(taup, gup, b)
    return SpectralSymTensor(g, sp.physical_to_base(g, q6))


def _q_sym_physical(tau33, grad33, b):
    """Pointwise Q on a physical grid; returns six components."""
    gt = grad33.transpose(1, 0, 2, 3, 4)
    omega = 0.5 * (grad33 - gt)
    q = _mm(tau33, omega) - _mm(omega, tau33)
    if b:
        dee = 0.5 * (grad33 + gt)
        q += b * (_mm(dee, tau33) + _mm(tau33, dee))
    q = 0.5 * (q + q.transpose(1, 0, 2, 3, 4))
    rows = [q[i, j] for i, j in SYM_COMPS]
    return np.stack(rows)


def _mm(a, b):
    return np.einsum("ij...,jk...->ik...", a, b)


def _grad_coeffs(grid, comps):
    """d_j applied to every component: shape lead + (3, n, n, nz)."""
    return np.stack([1j * k * comps for k in grid.kvec], axis=-4)


def _advect_physical(up, grad_pad, lead):
    flat = grad_pad.reshape((-1, 3) + up.shape[-3:])
    out = np.einsum("lxyz,clxyz->cxyz", up, flat)
    return out.reshape(lead + up.shape[-3:])


def _leray_arr(grid, v):
    dot = sum(k * v[i] for i, k in enumerate(grid.kvec)) * grid.inv_k2
    return np.stack([v[i] - grid.kvec[i] * dot for i in range(3)])


def _div_sym_arr(grid, t6):
    return np.stack([sum(1j * grid.kvec[j] * t6[SYM_OF_FULL[i, j]]
                         for j in range(3)) for i in range(3)])


def _sym_grad_arr(grid, u):
    kv = grid.kvec
    return np.stack([0.5j * (kv[j] * u[i] + kv[i] * u[j])
                     for i, j in SYM_COMPS])


def nonstiff_rhs(grid, params, u_c, tau_c, linearized=False):
    """Everything except mu Lap u and -a tau, on raw coefficient arrays.

    The stiff diagonal terms are handled exactly by the integrating
    factor, so the stepper only ever sees this part.
    """
    du = params.mu1 * _leray_arr(grid, _div_sym_arr(grid, tau_c))
    dtau = params.mu2 * _sym_grad_arr(grid, u_c)
    if linearized:
        return du, dtau

    up = sp.pad_to_physical(grid, u_c)
    gup = sp.pad_to_physical(grid, _grad_coeffs(grid, u_c))
    adv_u = _advect_physical(up, gup, (3,))
    du -= _leray_arr(grid, sp.physical_to_base(grid, adv_u))

    gtp = sp.pad_to_physical(grid, _grad_coeffs(grid, tau_c))
    adv_tau = _advect_physical(up, gtp, (6,))
    taup = sp.pad_to_physical(grid, tau_c)[SYM_OF_FULL]
    q6 = _q_sym_physical(taup, gup, params.b)
    dtau -= sp.physical_to_base(grid, adv_tau + q6)
    return du, dtau


def oldroyd_rhs(state, params, linearized=False):
    """Full right-hand side (d/dt u, d/dt tau) of the projected system."""
    g = state.grid
    du, dtau = nonstiff_rhs(g, params, state.u.coeffs, state.tau.coeffs,
                            linearized=linearized)
    du += params.mu * (-g.k2) * state.u.coeffs
    dtau -= params.a * state.tau.coeffs
    return SpectralVector(g, du), SpectralSymTensor(g, dtau)


def max_speed(u):
    """Max pointwise |u| on the collocation grid, for CFL accounting."""
    phys = u.to_physical()
    return float(np.sqrt((phys ** 2).sum(axis=0).max()))
