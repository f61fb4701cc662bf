"""Integrating-factor RK4 time stepping.

The stiff diagonal terms (viscous decay of u, damping of the stress
variable) are folded into exact exponential factors; classical RK4 acts
on the remaining nonstiff part.  Stage combinations follow from running
RK4 on the exponentially rescaled variable:

    y2 = E2 (y + h/2 N1)          y3 = E2 y + h/2 N2
    y4 = E y + h E2 N3
    y+ = E y + h/6 (E N1 + 2 E2 (N2 + N3) + N4)

with E = exp(L h), E2 = exp(L h/2).
"""

from dataclasses import dataclass

import numpy as np

from . import hookean as hk
from . import model as md
from .model import OldroydState
from .spectral import SpectralSymTensor, SpectralTensor, SpectralVector


class CflViolation(RuntimeError):
    """Advective CFL number exceeded the configured limit."""


class NonFinite(RuntimeError):
    """A state array picked up NaN or Inf during stepping."""


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_end: float
    scheme: str = "if-rk4"
    cfl_limit: float = 0.5
    diag_interval: int = 10

    def __post_init__(self):
        if self.dt <= 0 or self.t_end < 0:
            raise ValueError("need dt > 0 and t_end >= 0")
        if self.scheme != "if-rk4":
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.cfl_limit <= 0 or self.diag_interval < 1:
            raise ValueError("cfl_limit must be positive, diag_interval >= 1")


class OldroydProblem:
    """Adapter exposing the coupled (u, tau) system to the stepper."""

    def __init__(self, grid, params, linearized=False, project_tau_mean=False):
        self.grid = grid
        self.params = params
        self.linearized = linearized
        self.project_tau_mean = project_tau_mean
        self._factors = {}

    def arrays_of(self, state):
        return [state.u.coeffs, state.tau.coeffs]

    def state_of(self, ys):
        return OldroydState(SpectralVector(self.grid, ys[0]),
                            SpectralSymTensor(self.grid, ys[1]))

    def nonstiff(self, ys):
        du, dtau = md.nonstiff_rhs(self.grid, self.params, ys[0], ys[1],
                                   linearized=self.linearized)
        return [du, dtau]

    def factors(self, h):
        if h not in self._factors:
            self._factors[h] = [np.exp(-self.params.mu * h * self.grid.k2),
                                np.exp(-self.params.a * h)]
        return self._factors[h]

    def max_speed(self, ys):
        return md.max_speed(SpectralVector(self.grid, ys[0]))

    def posthook(self, ys):
        if self.project_tau_mean:
            tau = ys[1].copy()
            tau[:, 0, 0, 0] = 0.0
            return [ys[0], tau]
        return ys


class HookeanProblem:
    """Adapter for the deformation-gradient system (u, U = F - I)."""

    def __init__(self, grid, params):
        self.grid = grid
        self.params = params
        self._factors = {}

    def arrays_of(self, state):
        return [state.u.coeffs, state.U.coeffs]

    def state_of(self, ys):
        return hk.HookeanState(SpectralVector(self.grid, ys[0]),
                               SpectralTensor(self.grid, ys[1]))

    def nonstiff(self, ys):
        du, dU = hk.hookean_nonstiff_rhs(self.grid, self.params, ys[0], ys[1])
        return [du, dU]

    def factors(self, h):
        if h not in self._factors:
            self._factors[h] = [np.exp(-self.params.mu * h * self.grid.k2), 1.0]
        return self._factors[h]

    def max_speed(self, ys):
        return md.max_speed(SpectralVector(self.grid, ys[0]))

    def posthook(self, ys):
        return ys


def ifrk4_step(problem, ys, h):
    """One integrating-factor RK4 step on raw coefficient arrays."""
    E = problem.factors(h)
    E2 = problem.factors(0.5 * h)
    n1 = problem.nonstiff(ys)
    y2 = [e2 * (y + 0.5 * h * k) for e2, y, k in zip(E2, ys, n1)]
    n2 = problem.nonstiff(y2)
    y3 = [e2 * y + 0.5 * h * k for e2, y, k in zip(E2, ys, n2)]
    n3 = problem.nonstiff(y3)
    y4 = [e * y + h * e2 * k for e, e2, y, k in zip(E, E2, ys, n3)]
    n4 = problem.nonstiff(y4)
    out = [e * y + (h / 6.0) * (e * k1 + 2.0 * e2 * (k2 + k3) + k4)
           for e, e2, y, k1, k2, k3, k4 in zip(E, E2, ys, n1, n2, n3, n4)]
    return problem.posthook(out)


def step(state, params, dt, linearized=False):
    """Advance one OldroydState by a single if-rk4 step."""
    problem = OldroydProblem(state.grid, params, linearized=linearized)
    return problem.state_of(ifrk4_step(problem, problem.arrays_of(state), dt))


@dataclass(frozen=True)
class DiagPoint:
    step: int
    t: float
    state: object
    cfl: float
    dt: float


def run_integration(problem, state, cfg, on_diag=None):
    """March to t_end, raising on CFL violation or non-finite values.

    on_diag receives a DiagPoint at t = 0, every diag_interval steps,
    and at the final step.  A trailing fractional step covers t_end
    when it is not a multiple of dt.
    """
    ys = problem.arrays_of(state)
    dx = 2.0 * np.pi / problem.grid.n
    nfull = int(np.floor(cfg.t_end / cfg.dt + 1e-9))
    rest = cfg.t_end - nfull * cfg.dt
    sizes = [cfg.dt] * nfull + ([rest] if rest > 1e-12 * max(1.0, cfg.t_end) else [])

    def emit(step, t, cfl):
        if on_diag is not None:
            on_diag(DiagPoint(step, t, problem.state_of(ys), cfl, cfg.dt))

    speed = problem.max_speed(ys)
    emit(0, 0.0, speed * cfg.dt / dx)
    t = 0.0
    for istep, h in enumerate(sizes, start=1):
        cfl = speed * h / dx
        if cfl > cfg.cfl_limit:
            raise CflViolation(
                f"cfl {cfl:.3f} > limit {cfg.cfl_limit} at t = {t:.6g}")
        ys = ifrk4_step(problem, ys, h)
        t = istep * cfg.dt if istep <= nfull else cfg.t_end
        for arr in ys:
            if not np.all(np.isfinite(arr)):
                raise NonFinite(f"non-finite state at t = {t:.6g}")
        speed = problem.max_speed(ys)
        if istep % cfg.diag_interval == 0 or istep == len(sizes):
            emit(istep, t, speed * cfg.dt / dx)
    return problem.state_of(ys)


@dataclass(frozen=True)
class OrderFit:
    order: float
    dts: tuple
    errors: tuple
    floor_reached: bool


def convergence_order(error_of_dt, dts, floor=1e-12):
    """Observed order from a log-log fit of error against step size.

    error_of_dt maps a step size to a scalar error.  When the errors
    sit at round-off (all below `floor`) the fit is meaningless and the
    result is flagged instead.
    """
    dts = tuple(float(h) for h in dts)
    errors = tuple(float(error_of_dt(h)) for h in dts)
    if all(e < floor for e in errors):
        return OrderFit(float("nan"), dts, errors, True)
    order = np.polyfit(np.log(dts), np.log(np.maximum(errors, 1e-300)), 1)[0]
    return OrderFit(float(order), dts, errors, False)
