"""Per-mode dynamics of the linearized system.

For each wavevector k the pair (u_hat, v_hat) with v = P div tau obeys
a 2x2 constant-coefficient system

    d/dt [u, v] = [[-mu |k|^2, mu1], [-mu2 |k|^2 / 2, -a]] [u, v],

the spectral form of a damped wave equation.  The propagator is the
closed-form matrix exponential with a guarded confluent branch.
"""

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .spectral import SpectralVector


class ZeroMode(ValueError):
    """The k = 0 mode has no damped-wave dynamics."""


class EmptySupport(ValueError):
    """A decay prediction needs at least one nonzero mode."""


@dataclass(frozen=True)
class ModeState:
    """Amplitudes of one Fourier mode; both must be orthogonal to k."""

    k: tuple
    u_hat: np.ndarray
    v_hat: np.ndarray
    params: ModelParams = ModelParams()

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(c) for c in self.k))
        object.__setattr__(self, "u_hat", np.asarray(self.u_hat, complex))
        object.__setattr__(self, "v_hat", np.asarray(self.v_hat, complex))
        if self.u_hat.shape != (3,) or self.v_hat.shape != (3,):
            raise ValueError("mode amplitudes must be complex triples")
        kv = np.asarray(self.k, float)
        scale = 1.0 + np.linalg.norm(self.u_hat) + np.linalg.norm(self.v_hat)
        for amp in (self.u_hat, self.v_hat):
            if abs(kv @ amp) > 1e-10 * scale * (1.0 + np.linalg.norm(kv)):
                raise ValueError("mode amplitude not orthogonal to k")


def _k2_of(k):
    k2 = float(sum(int(c) ** 2 for c in k))
    if k2 == 0:
        raise ZeroMode("k = 0 carries no mode dynamics")
    return k2


def mode_matrix(k, params):
    """The 2x2 coefficient matrix at wavevector k."""
    k2 = _k2_of(k)
    return np.array([[-params.mu * k2, params.mu1],
                     [-params.mu2 * k2 / 2.0, -params.a]])


def mode_eigenvalues(k, params):
    """Both eigenvalues, ordered by real part then imaginary part, descending."""
    lp, lm = _eigs(_k2_of(k), params)
    return complex(lp), complex(lm)


def _eigs(k2, params):
    k2 = np.asarray(k2, float)
    tr = -params.mu * k2 - params.a
    det = params.a * params.mu * k2 + params.mu1 * params.mu2 * k2 / 2.0
    disc = np.asarray(tr ** 2 - 4.0 * det, complex)
    root = np.sqrt(disc)
    return (tr + root) / 2.0, (tr - root) / 2.0


def _expm_entries(k2, params, t):
    """Entries of exp(A t) vectorized over an array of |k|^2 values.

    Near-coincident eigenvalues (relative discriminant below 1e-12)
    switch to the confluent form exp(l t)(I + t (A - l I)) to avoid the
    0/0 in the two-eigenvalue formula.
    """
    k2 = np.asarray(k2, float)
    a11 = -params.mu * k2
    a12 = params.mu1 + np.zeros_like(k2)
    a21 = -params.mu2 * k2 / 2.0
    a22 = -params.a + np.zeros_like(k2)
    tr = a11 + a22
    det = a11 * a22 - a12 * a21
    disc = np.asarray(tr ** 2 - 4.0 * det, complex)
    scale = tr ** 2 + 4.0 * np.abs(det)
    confluent = np.abs(disc) <= 1e-12 * np.maximum(scale, 1e-300)

    root = np.sqrt(disc)
    lp = (tr + root) / 2.0
    lm = (tr - root) / 2.0
    dl = np.where(confluent, 1.0, lp - lm)
    ep = np.exp(lp * t)
    em = np.exp(lm * t)
    e11 = (ep * (a11 - lm) - em * (a11 - lp)) / dl
    e12 = (ep - em) * a12 / dl
    e21 = (ep - em) * a21 / dl
    e22 = (ep * (a22 - lm) - em * (a22 - lp)) / dl

    lc = tr / 2.0
    ec = np.exp(lc * t)
    c11 = ec * (1.0 + t * (a11 - lc))
    c12 = ec * t * a12
    c21 = ec * t * a21
    c22 = ec * (1.0 + t * (a22 - lc))

    pick = lambda e, c: np.real(np.where(confluent, c, e))
    return pick(e11, c11), pick(e12, c12), pick(e21, c21), pick(e22, c22)


def propagate_mode(mode, t):
    """Exact linear evolution of one mode over time t."""
    k2 = _k2_of(mode.k)
    e11, e12, e21, e22 = _expm_entries(k2, mode.params, t)
    return ModeState(mode.k,
                     e11 * mode.u_hat + e12 * mode.v_hat,
                     e21 * mode.u_hat + e22 * mode.v_hat,
                     mode.params)


def propagate_field(u, v, params, t):
    """Apply the mode propagator across a whole (u, v) field pair.

    Returns the linearized-in-time velocity and projected stress
    divergence; k = 0 content is left untouched.
    """
    g = u.grid
    e11, e12, e21, e22 = _expm_entries(g.k2, params, t)
    live = g.k2 > 0
    e11 = np.where(live, e11, 1.0)
    e12 = np.where(live, e12, 0.0)
    e21 = np.where(live, e21, 0.0)
    e22 = np.where(live, e22, 1.0)
    return (SpectralVector(g, e11 * u.coeffs + e12 * v.coeffs),
            SpectralVector(g, e21 * u.coeffs + e22 * v.coeffs))


def decay_prediction(support, params):
    """Slowest decay rate max Re lambda_+ over the spectral support.

    Accepts wavevector triples or plain |k|^2 integers; zero modes are
    ignored, and an effectively empty support raises EmptySupport.
    """
    k2s = set()
    for item in support:
        k2 = float(np.dot(item, item)) if np.ndim(item) else float(item)
        if k2 > 0:
            k2s.add(k2)
    if not k2s:
        raise EmptySupport("no nonzero modes in the support")
    lp, _ = _eigs(np.array(sorted(k2s)), params)
    return float(np.max(np.real(lp)))
