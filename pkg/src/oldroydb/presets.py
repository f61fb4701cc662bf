"""Initial-data presets shared by the runner and the test suite."""

import numpy as np

from . import spectral as sp
from .hookean import HookeanState
from .model import OldroydState
from .spectral import Grid, SpectralSymTensor, SpectralTensor, SpectralVector


class BadPreset(ValueError):
    """Unknown preset name or preset/model mismatch."""


PRESETS = ("taylor-green", "random-band", "hookean-generic")


def data_norm(u, tensor):
    """Size functional used to scale small data: ||u||_{H^3,-1} + ||T||_{H^3,-1}."""
    return sp.sobolev_norm(u, 3, prefix=-1) + sp.sobolev_norm(tensor, 3, prefix=-1)


def _taylor_green(grid, amplitude):
    x, y, z = grid.mesh()
    samples = np.stack([
        amplitude * np.sin(x) * np.cos(y) * np.cos(z),
        -amplitude * np.cos(x) * np.sin(y) * np.cos(z),
        np.zeros_like(x),
    ])
    u = sp.forward(grid, samples)
    tau = SpectralSymTensor(grid, np.zeros((6, grid.n, grid.n, grid.nz), complex))
    return OldroydState(u, tau)


def _random_band(grid, amplitude, kmax, seed):
    rng = np.random.default_rng(seed)
    u = sp.random_vector(grid, rng, kmax, solenoidal=True)
    tau = sp.random_sym_tensor(grid, rng, kmax)
    if amplitude == 0.0:
        zv = np.zeros_like(u.coeffs)
        zt = np.zeros_like(tau.coeffs)
        return OldroydState(SpectralVector(grid, zv), SpectralSymTensor(grid, zt))
    scale = amplitude / data_norm(u, tau)
    return OldroydState(scale * u, scale * tau)


def _hookean_generic(grid, amplitude, kmax, seed):
    rng = np.random.default_rng(seed)
    u = sp.random_vector(grid, rng, kmax, solenoidal=True)
    U = sp.random_tensor(grid, rng, kmax)
    # the displacement gradient must be neither curl- nor divergence-free
    # so the reduction is exercised off every special submanifold
    div = sp.tensor_divergence(U)
    curl = _row_curl(U)
    if sp.l2_norm(div) < 1e-8 or sp.l2_norm(curl) < 1e-8:
        raise BadPreset("hookean-generic draw degenerate; change seed")
    if amplitude == 0.0:
        zv = np.zeros_like(u.coeffs)
        zt = np.zeros_like(U.coeffs)
        return HookeanState(SpectralVector(grid, zv), SpectralTensor(grid, zt))
    scale = amplitude / data_norm(u, U)
    return HookeanState(scale * u, scale * U)


def _row_curl(U):
    """Curl applied to each row of U, stacked as a 3x3 field."""
    g = U.grid
    k = [g.kx, g.ky, g.kz]
    c = U.coeffs
    rows = []
    for i in range(3):
        rows.append(np.stack([
            1j * (k[1] * c[i, 2] - k[2] * c[i, 1]),
            1j * (k[2] * c[i, 0] - k[0] * c[i, 2]),
            1j * (k[0] * c[i, 1] - k[1] * c[i, 0]),
        ]))
    return SpectralTensor(g, np.stack(rows))


def make_initial(preset, amplitude, kmax, seed, grid):
    """Build initial data on the given grid.

    random presets are seeded and byte-reproducible; band-limited
    presets require 3*kmax <= n so products of the data are exactly
    representable after dealiasing.
    """
    if not isinstance(grid, Grid):
        grid = Grid(grid)
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    if preset in ("random-band", "hookean-generic"):
        if 3 * kmax > grid.n:
            raise ValueError(f"kmax={kmax} too large for n={grid.n}; need 3*kmax <= n")
    if preset == "taylor-green":
        return _taylor_green(grid, amplitude)
    if preset == "random-band":
        return _random_band(grid, amplitude, kmax, seed)
    if preset == "hookean-generic":
        return _hookean_generic(grid, amplitude, kmax, seed)
    raise BadPreset(f"unknown preset {preset!r}")
