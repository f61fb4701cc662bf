"""Sobolev diagnostics and the time-weighted energy functionals.

Three nested quantities track the dissipative structure: e0 collects
the lowest-order sup and dissipation integrals, e1 and e2 the same with
(1+t) and (1+t)^2 weights and one resp. two extra derivatives on u.
All three are nondecreasing by construction (running max plus
nonnegative integrals) and must stay bounded for small data.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .model import projected_stress_div
from .spectral import SYM_MULT

# fixed column order used by the CSV writer
NORM_COLUMNS = (
    "inv_grad_u_h3", "inv_grad_tau_h3",
    "u_l2", "u_h2", "u_h3",
    "grad_u_h2", "grad_u_h1", "grad2_u_h1",
    "inv_grad_ptau_h2", "ptau_l2", "ptau_h1", "grad_ptau_l2",
)


class NonPositiveSeries(ValueError):
    """Log fits need strictly positive samples."""


@dataclass(frozen=True)
class EnergyRecord:
    """One diagnostic row: instantaneous norms plus accumulated energies."""

    t: float
    norms: dict
    integrals: tuple = (0.0, 0.0, 0.0)
    e0: float = 0.0
    e1: float = 0.0
    e2: float = 0.0


def compute_norms(state):
    """All instantaneous quantities the energy functionals are built from."""
    u, tau = state.u, state.tau
    v = projected_stress_div(tau)
    mean = sp.field_mean(tau)
    return {
        "inv_grad_u_h3": sp.sobolev_norm(u, 3, prefix=-1),
        "inv_grad_tau_h3": sp.sobolev_norm(tau, 3, prefix=-1),
        "u_l2": sp.l2_norm(u),
        "u_h2": sp.sobolev_norm(u, 2),
        "u_h3": sp.sobolev_norm(u, 3),
        "grad_u_h2": sp.sobolev_norm(u, 2, prefix=1),
        "grad_u_h1": sp.sobolev_norm(u, 1, prefix=1),
        "grad2_u_h1": sp.sobolev_norm(u, 1, prefix=2),
        "inv_grad_ptau_h2": sp.sobolev_norm(v, 2, prefix=-1),
        "ptau_l2": sp.l2_norm(v),
        "ptau_h1": sp.sobolev_norm(v, 1),
        "grad_ptau_l2": sp.sobolev_norm(v, 0, prefix=1),
        "tau_mean_frobenius": float(np.sqrt(np.sum(SYM_MULT * mean ** 2))),
    }


def _weighted_parts(t, q):
    """(sup arguments, dissipation integrands) for the three energies."""
    w = 1.0 + t
    sups = (q["inv_grad_u_h3"] ** 2 + q["inv_grad_tau_h3"] ** 2,
            w * (q["u_h2"] ** 2 + 2.0 * q["inv_grad_ptau_h2"] ** 2),
            w ** 2 * (q["grad_u_h1"] ** 2 + 2.0 * q["ptau_h1"] ** 2))
    diss = (q["u_h3"] ** 2 + q["inv_grad_ptau_h2"] ** 2,
            w * (q["grad_u_h2"] ** 2 + q["ptau_h1"] ** 2),
            w ** 2 * (q["grad2_u_h1"] ** 2 + q["grad_ptau_l2"] ** 2))
    return sups, diss


class EnergyAccumulator:
    """Running sup terms and trapezoid dissipation integrals.

    push() consumes (t, norms) in time order and returns the assembled
    EnergyRecord for that instant.
    """

    def __init__(self):
        self.sup = [0.0, 0.0, 0.0]
        self.integral = [0.0, 0.0, 0.0]
        self._prev = None

    def push(self, t, norms):
        sups, diss = _weighted_parts(t, norms)
        if self._prev is not None:
            t0, diss0 = self._prev
            if t < t0:
                raise ValueError("records must arrive in time order")
            for i in range(3):
                self.integral[i] += 0.5 * (t - t0) * (diss[i] + diss0[i])
        for i in range(3):
            self.sup[i] = max(self.sup[i], sups[i])
        self._prev = (t, diss)
        e = self.totals()
        return EnergyRecord(float(t), norms, tuple(self.integral),
                            e[0], e[1], e[2])

    def totals(self):
        return tuple(s + i for s, i in zip(self.sup, self.integral))


def energy_record(state, t):
    """Single-instant record (integrals empty, energies = sup terms)."""
    return EnergyAccumulator().push(t, compute_norms(state))


def assemble_energies(records):
    """Re-accumulate a whole history; returns arrays keyed t, e0, e1, e2."""
    acc = EnergyAccumulator()
    rows = [acc.push(r.t, r.norms) for r in records]
    return {"t": np.array([r.t for r in rows]),
            "e0": np.array([r.e0 for r in rows]),
            "e1": np.array([r.e1 for r in rows]),
            "e2": np.array([r.e2 for r in rows])}


def closure_ratio_monitors(records):
    """Max over time of the two closure-inequality ratios.

    The estimates bound e0 by e0(0) + e0^{3/2} + e2^{3/2} and e2 by
    e0 + e0^{3/2} + e2^{3/2} up to absolute constants; the ratios are
    reported, never asserted.
    """
    series = assemble_energies(records)
    e0, e2 = series["e0"], series["e2"]
    if len(e0) == 0:
        return float("nan"), float("nan")
    r1 = e0 / (e0[0] + e0 ** 1.5 + e2 ** 1.5)
    r2 = e2 / (e0 + e0 ** 1.5 + e2 ** 1.5)
    with np.errstate(invalid="ignore"):
        return float(np.nanmax(r1)), float(np.nanmax(r2))


def interpolation_check(field, s):
    """Ratio ||f||^2_{dot H^s} / (||f||_{dot H^{s-1}} ||f||_{dot H^{s+1}}).

    Cauchy-Schwarz in mode space bounds this by 1; the field must be
    mean-zero for the scale below s to make sense.
    """
    sp._require_mean_zero(field, "interpolation ratio")
    num = sp.weighted_pairing(field, field, s)
    lo = sp.weighted_pairing(field, field, s - 1)
    hi = sp.weighted_pairing(field, field, s + 1)
    denom = math.sqrt(max(lo, 0.0)) * math.sqrt(max(hi, 0.0))
    if denom == 0.0:
        return 0.0 if num == 0.0 else float("inf")
    return num / denom


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    r_squared: float
    npoints: int


def _windowed(ts, values, window):
    ts = np.asarray(ts, float)
    values = np.asarray(values, float)
    lo, hi = window
    mask = (ts >= lo) & (ts <= hi)
    if mask.sum() < 10:
        raise ValueError(f"need at least 10 samples in window, got {mask.sum()}")
    vals = values[mask]
    if np.any(vals <= 0):
        raise NonPositiveSeries("series must be strictly positive in the window")
    return ts[mask], vals


def _line_fit(x, y):
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / total if total > 0 else 1.0
    return slope, r2


def decay_fit(ts, values, window):
    """Algebraic decay exponent: slope of log(value) against log(1 + t)."""
    t, v = _windowed(ts, values, window)
    slope, r2 = _line_fit(np.log1p(t), np.log(v))
    return DecayFit(float(slope), float(r2), len(t))


def exponential_rate(ts, values, window):
    """Exponential rate: slope of log(value) against t."""
    t, v = _windowed(ts, values, window)
    slope, r2 = _line_fit(t, np.log(v))
    return DecayFit(float(slope), float(r2), len(t))
