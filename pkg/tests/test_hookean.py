"""Deformation-tensor system and its embedding into the stress system."""

import numpy as np
import pytest

from oldroydb import spectral as sp
from oldroydb.hookean import (REDUCED, HookeanState, hookean_rhs,
                              reduced_params, to_conformation,
                              verify_g_closure)
from oldroydb.integrate import HookeanProblem, OldroydProblem, ifrk4_step
from oldroydb.model import ModelParams, OldroydState


def zero_vector(g):
    return sp.SpectralVector(g, np.zeros((3,) + g.spectral_shape, complex))


def zero_tensor(g):
    return sp.SpectralTensor(g, np.zeros((3, 3) + g.spectral_shape, complex))


def small_state(n, ku, kU, seed, scale=1.0):
    g = sp.Grid(n)
    rng = np.random.default_rng(seed)
    u = sp.random_vector(g, rng, ku, solenoidal=True)
    U = sp.random_tensor(g, rng, kU)
    return HookeanState(scale * u, scale * U)


# ------------------------------------------------------- conformation

def test_conformation_of_identity_deformation():
    g = sp.Grid(8)
    assert sp.l2_norm(to_conformation(zero_tensor(g))) == 0.0


def test_conformation_of_constant_shear():
    # U = eps e12 -> G = eps(e12 + e21) + eps^2 e11
    g = sp.Grid(8)
    eps = 0.25
    coeffs = np.zeros((3, 3) + g.spectral_shape, complex)
    coeffs[0, 1, 0, 0, 0] = eps
    G = to_conformation(sp.SpectralTensor(g, coeffs))
    assert abs(sp.get_mode(G, (0, 0, 0))[0] - eps ** 2) < 1e-14
    assert abs(sp.get_mode(G, (0, 0, 0))[3] - eps) < 1e-14
    assert np.max(np.abs(sp.get_mode(G, (0, 0, 0))[[1, 2, 4, 5]])) < 1e-14


def test_conformation_matches_pointwise_matrix_algebra():
    g = sp.Grid(16)
    rng = np.random.default_rng(0)
    U = sp.random_tensor(g, rng, 3)
    G = to_conformation(U)
    up = sp.inverse(U)
    expected = up + up.transpose(1, 0, 2, 3, 4) \
        + np.einsum("ijxyz,kjxyz->ikxyz", up, up)
    got = sp.inverse(sp.sym_to_full(G))
    assert np.max(np.abs(got - expected)) < 1e-12


# ------------------------------------------------------- right-hand side

def test_hookean_rhs_rest_state():
    g = sp.Grid(8)
    du, dU = hookean_rhs(HookeanState(zero_vector(g), zero_tensor(g)),
                         ModelParams())
    assert sp.l2_norm(du) == 0.0
    assert sp.l2_norm(dU) == 0.0


def test_hookean_rhs_frozen_velocity():
    # u = 0: the deformation does not move and only its stress forces u
    g = sp.Grid(16)
    rng = np.random.default_rng(1)
    U = sp.random_tensor(g, rng, 3)
    du, dU = hookean_rhs(HookeanState(zero_vector(g), U), ModelParams())
    assert sp.l2_norm(dU) == 0.0
    expected = sp.leray_project(
        sp.tensor_divergence(to_conformation(U)))
    assert sp.l2_norm(du - expected) <= 1e-12 * max(1.0, sp.l2_norm(du))


def _deriv(phys, axis, n):
    kv = np.fft.fftfreq(n, 1.0 / n)
    shape = [1, 1, 1]
    shape[axis] = n
    return np.real(np.fft.ifftn(np.fft.fftn(phys) * (1j * kv.reshape(shape))))


def test_hookean_rhs_matches_physical_oracle():
    n = 16
    state = small_state(n, 3, 3, seed=2, scale=0.1)
    params = ModelParams()
    du, dU = hookean_rhs(state, params)

    up = sp.inverse(state.u)
    Up = sp.inverse(state.U)
    fp = Up.copy()
    for i in range(3):
        fp[i, i] += 1.0
    gu = np.stack([np.stack([_deriv(up[i], j, n) for j in range(3)])
                   for i in range(3)])
    gU = np.stack([np.stack([np.stack([_deriv(Up[i, j], l, n)
                                       for l in range(3)])
                             for j in range(3)])
                   for i in range(3)])
    G = np.einsum("ijxyz,kjxyz->ikxyz", fp, fp)
    for i in range(3):
        G[i, i] -= 1.0
    div_g = np.stack([sum(_deriv(G[i, j], j, n) for j in range(3))
                      for i in range(3)])
    adv_u = np.einsum("jxyz,ijxyz->ixyz", up, gu)
    lap_u = np.stack([sum(_deriv(_deriv(up[i], j, n), j, n)
                          for j in range(3)) for i in range(3)])
    raw = -adv_u + params.mu * lap_u + params.mu1 * div_g
    div_raw = sum(_deriv(raw[j], j, n) for j in range(3))
    kv = np.fft.fftfreq(n, 1.0 / n)
    kg = np.meshgrid(kv, kv, kv, indexing="ij")
    k2 = kg[0] ** 2 + kg[1] ** 2 + kg[2] ** 2
    k2[0, 0, 0] = 1.0
    ph = np.fft.fftn(div_raw) / (-k2)
    ph[0, 0, 0] = 0.0
    p_phys = np.real(np.fft.ifftn(ph))
    du_o = raw - np.stack([_deriv(p_phys, i, n) for i in range(3)])
    dU_o = np.einsum("ilxyz,ljxyz->ijxyz", gu, fp) \
        - np.einsum("lxyz,ijlxyz->ijxyz", up, gU)

    scale = max(1.0, np.max(np.abs(du_o)))
    assert np.max(np.abs(sp.inverse(du) - du_o)) <= 1e-12 * scale
    scale = max(1.0, np.max(np.abs(dU_o)))
    assert np.max(np.abs(sp.inverse(dU) - dU_o)) <= 1e-12 * scale


# ------------------------------------------------------- closure check

def test_closure_residual_zero_velocity():
    g = sp.Grid(16)
    rng = np.random.default_rng(3)
    U = sp.random_tensor(g, rng, 2)
    state = HookeanState(zero_vector(g), U)
    assert verify_g_closure(state) <= 1e-12


def test_closure_residual_identity_deformation():
    g = sp.Grid(16)
    rng = np.random.default_rng(4)
    u = sp.random_vector(g, rng, 3, solenoidal=True)
    state = HookeanState(u, zero_tensor(g))
    assert verify_g_closure(state) <= 1e-12


def test_closure_residual_random_band_limited():
    state = small_state(16, 3, 2, seed=5)
    assert verify_g_closure(state) <= 1e-11


def test_closure_residual_detects_flipped_slip_sign():
    state = small_state(16, 3, 2, seed=6)
    assert verify_g_closure(state, b=1.0) > 1e-6


# ------------------------------------------------------- reduction

def test_reduced_params_fixes_stress_coefficients():
    p = reduced_params(ModelParams(mu=0.7, mu1=0.4, mu2=9.0, a=5.0, b=0.9))
    assert (p.mu, p.mu1) == (0.7, 0.4)
    assert (p.mu2, p.a, p.b) == (REDUCED["mu2"], REDUCED["a"], REDUCED["b"])


def test_coevolution_drift_stays_at_integrator_error():
    n = 16
    hstate = small_state(n, 3, 2, seed=7, scale=0.01)
    g = hstate.grid
    params = ModelParams()
    hprob = HookeanProblem(g, params)
    oprob = OldroydProblem(g, reduced_params(params))
    ostate = OldroydState(hstate.u, to_conformation(hstate.U))
    ys_h = hprob.arrays_of(hstate)
    ys_o = oprob.arrays_of(ostate)
    for _ in range(50):
        ys_h = ifrk4_step(hprob, ys_h, 0.01)
        ys_o = ifrk4_step(oprob, ys_o, 0.01)
    hs = hprob.state_of(ys_h)
    os_ = oprob.state_of(ys_o)
    drift = sp.sobolev_norm(to_conformation(hs.U) - os_.tau, 2)
    assert drift <= 1e-9
