"""Per-mode linear dynamics: matrices, eigenvalues, exact propagation.

The confluent-propagator oracle integrates the 2x2 system with a
fine-step classical RK4, an entirely separate code path.
"""

import numpy as np
import pytest

from oldroydb import spectral as sp
from oldroydb.linear import (EmptySupport, ModeState, ZeroMode,
                             decay_prediction, mode_eigenvalues,
                             mode_matrix, propagate_field, propagate_mode)
from oldroydb.model import ModelParams, projected_stress_div

UNIT = ModelParams()


def ode_oracle(k, params, u0, v0, t, nsteps=20000):
    """Classical RK4 on the per-mode 2x2 system with a tiny step."""
    A = mode_matrix(k, params)
    y = np.array([u0, v0], complex)
    h = t / nsteps
    for _ in range(nsteps):
        k1 = A @ y
        k2 = A @ (y + 0.5 * h * k1)
        k3 = A @ (y + 0.5 * h * k2)
        k4 = A @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


# ------------------------------------------------------- matrix and spectrum

def test_mode_matrix_unit_parameters():
    A = mode_matrix((1, 0, 0), UNIT)
    assert np.allclose(A, [[-1.0, 1.0], [-0.5, 0.0]], atol=1e-15)


def test_eigenvalues_on_small_shells():
    lp, lm = mode_eigenvalues((1, 0, 0), UNIT)
    assert abs(lp - (-0.5 + 0.5j)) < 1e-13
    assert abs(lm - (-0.5 - 0.5j)) < 1e-13
    lp, lm = mode_eigenvalues((1, 1, 0), UNIT)
    assert abs(lp - (-1.0)) < 1e-13
    assert abs(lm - (-1.0)) < 1e-13
    lp, lm = mode_eigenvalues((2, 0, 0), UNIT)
    assert abs(lp - (-2.0 + np.sqrt(2.0))) < 1e-13
    assert abs(lm - (-2.0 - np.sqrt(2.0))) < 1e-13


def test_eigenvalues_satisfy_trace_and_determinant():
    rng = np.random.default_rng(0)
    for _ in range(20):
        params = ModelParams(mu=rng.uniform(0.1, 2), mu1=rng.uniform(0.1, 2),
                             mu2=rng.uniform(0.1, 2), a=rng.uniform(0, 1),
                             b=rng.uniform(-1, 1))
        k = tuple(rng.integers(-3, 4, 3))
        if not any(k):
            continue
        lp, lm = mode_eigenvalues(k, params)
        A = mode_matrix(k, params)
        assert abs((lp + lm) - np.trace(A)) < 1e-13 * max(1, abs(np.trace(A)))
        det = np.linalg.det(A)
        assert abs(lp * lm - det) < 1e-12 * max(1, abs(det))


def test_zero_mode_rejected():
    with pytest.raises(ZeroMode):
        mode_matrix((0, 0, 0), UNIT)


def test_mode_state_requires_orthogonal_amplitudes():
    with pytest.raises(ValueError):
        ModeState((1, 0, 0), np.array([1.0, 0, 0], complex),
                  np.array([0, 1.0, 0], complex), UNIT)


# ------------------------------------------------------- propagation

def _mode(k, seed):
    rng = np.random.default_rng(seed)
    ka = np.array(k, float)
    z = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    z -= np.einsum("cj,j->c", z, ka)[:, None] * ka / (ka @ ka)
    return ModeState(k, z[0], z[1], UNIT)


def test_propagation_at_time_zero_is_identity():
    m = _mode((1, 2, 0), seed=1)
    out = propagate_mode(m, 0.0)
    assert np.max(np.abs(out.u_hat - m.u_hat)) < 1e-15
    assert np.max(np.abs(out.v_hat - m.v_hat)) < 1e-15


def test_propagation_semigroup_property():
    m = _mode((2, 1, 0), seed=2)
    once = propagate_mode(m, 0.7)
    twice = propagate_mode(propagate_mode(m, 0.3), 0.4)
    scale = max(1.0, np.max(np.abs(once.u_hat)))
    assert np.max(np.abs(once.u_hat - twice.u_hat)) < 1e-12 * scale
    assert np.max(np.abs(once.v_hat - twice.v_hat)) < 1e-12 * scale


@pytest.mark.parametrize("k", [(1, 0, 0), (1, 1, 0), (2, 0, 0)])
def test_propagation_against_fine_step_ode(k):
    # (1,1,0) sits exactly on the confluent shell |k|^2 = 2 mu1 mu2 / mu^2
    m = _mode(k, seed=3)
    out = propagate_mode(m, 1.0)
    for c in range(3):
        y = ode_oracle(k, UNIT, m.u_hat[c], m.v_hat[c], 1.0)
        assert abs(out.u_hat[c] - y[0]) < 1e-9
        assert abs(out.v_hat[c] - y[1]) < 1e-9


def test_decoupled_mode_is_pure_heat():
    params = ModelParams(mu1=0.0)
    rng = np.random.default_rng(4)
    k = (1, 2, 0)
    ka = np.array(k, float)
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    z -= ka * (ka @ z) / (ka @ ka)
    m = ModeState(k, z, np.zeros(3, complex), params)
    out = propagate_mode(m, 0.8)
    assert np.max(np.abs(out.u_hat - z * np.exp(-5.0 * 0.8))) < 1e-13


def test_field_propagation_matches_mode_propagation():
    g = sp.Grid(16)
    rng = np.random.default_rng(5)
    u = sp.random_vector(g, rng, 3, solenoidal=True)
    tau = sp.random_sym_tensor(g, rng, 3)
    v = projected_stress_div(tau)
    ut, vt = propagate_field(u, v, UNIT, 0.9)
    for k in ((1, 0, 0), (1, 1, 0), (2, 1, 0), (3, 1, 1)):
        m = ModeState(k, sp.get_mode(u, k), sp.get_mode(v, k), UNIT)
        ref = propagate_mode(m, 0.9)
        assert np.max(np.abs(sp.get_mode(ut, k) - ref.u_hat)) < 1e-12
        assert np.max(np.abs(sp.get_mode(vt, k) - ref.v_hat)) < 1e-12


def test_field_propagation_keeps_zero_mode():
    g = sp.Grid(8)
    coeffs = np.zeros((3,) + g.spectral_shape, complex)
    coeffs[0, 0, 0, 0] = 0.75
    u = sp.SpectralVector(g, coeffs)
    v = sp.SpectralVector(g, np.zeros_like(coeffs))
    ut, _ = propagate_field(u, v, UNIT, 2.0)
    assert abs(ut.coeffs[0, 0, 0, 0] - 0.75) < 1e-15


# ------------------------------------------------------- decay prediction

def test_decay_prediction_unit_shell():
    assert abs(decay_prediction([1], UNIT) - (-0.5)) < 1e-14
    assert abs(decay_prediction([(1, 0, 0), (1, 1, 0)], UNIT) - (-0.5)) < 1e-14


def test_decay_prediction_larger_shells_decay_faster():
    r1 = decay_prediction([1], UNIT)
    r4 = decay_prediction([4], UNIT)
    assert r4 < r1 < 0.0


def test_decay_prediction_empty_support():
    with pytest.raises(EmptySupport):
        decay_prediction([0], UNIT)
    with pytest.raises(EmptySupport):
        decay_prediction([], UNIT)
