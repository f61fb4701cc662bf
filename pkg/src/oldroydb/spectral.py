"""Half-complex spectral toolbox on the 2*pi-periodic cube.

Fields live in rfftn layout (n, n, n//2 + 1) per component, with the
convention that a stored coefficient is the amplitude of e^{i k.x}.
Quadratic terms go through a zero-padded 3/2 grid so the retained modes
are exact convolutions; Nyquist planes are dropped by the padding and
all derivative wavenumbers zero them as well.
"""

import numpy as np
from scipy import fft as sfft

LENGTH = 2.0 * np.pi
VOLUME = LENGTH ** 3

# symmetric storage order (11, 22, 33, 12, 13, 23)
SYM_COMPS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
SYM_OF_FULL = np.array([[0, 3, 4], [3, 1, 5], [4, 5, 2]])
SYM_MULT = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])


class MeanNotZero(ValueError):
    """Raised when an inverse-type multiplier meets a nonzero mean."""


class Grid:
    """Uniform n^3 grid on [0, 2*pi)^3 with cached wavenumber arrays.

    Wavenumbers are integers; the arrays kx, ky, kz are the derivative
    wavenumbers (Nyquist plane set to zero) broadcastable over the
    spectral shape.  pad_n is the 3/2 dealiasing grid, rounded up to
    the next even size.
    """

    def __init__(self, n):
        if n < 8 or n % 2:
            raise ValueError(f"grid size must be even and >= 8, got {n}")
        self.n = n
        self.nz = n // 2 + 1
        self.pad_n = ((3 * n // 2) + 1) // 2 * 2
        self.pad_nz = self.pad_n // 2 + 1

        kx = np.fft.fftfreq(n, 1.0 / n)
        kx[n // 2] = 0.0
        kz = np.arange(self.nz, dtype=float)
        kz[-1] = 0.0
        self.kx = kx.reshape(n, 1, 1)
        self.ky = kx.reshape(1, n, 1)
        self.kz = kz.reshape(1, 1, self.nz)
        self.kvec = (self.kx, self.ky, self.kz)

        self.k2 = self.kx ** 2 + self.ky ** 2 + self.kz ** 2
        self.knorm = np.sqrt(self.k2)
        # |k|^2 with the Nyquist planes counted at their true n/2, for
        # band masks (never for derivatives)
        kt = np.fft.fftfreq(n, 1.0 / n)
        kt[n // 2] = n // 2
        kzt = np.arange(self.nz, dtype=float)
        self.true_k2 = (kt.reshape(n, 1, 1) ** 2 + kt.reshape(1, n, 1) ** 2
                        + kzt.reshape(1, 1, self.nz) ** 2)
        with np.errstate(divide="ignore"):
            inv = 1.0 / self.k2
        inv[self.k2 == 0] = 0.0
        self.inv_k2 = inv

        # Parseval weight: interior kz columns stand for a conjugate pair
        w = np.full((1, 1, self.nz), 2.0)
        w[..., 0] = 1.0
        w[..., -1] = 1.0
        self.weight = w

        h = n // 2
        m = self.pad_n
        self._src = (slice(0, h), slice(h + 1, n))
        self._dst = (slice(0, h), slice(m - h + 1, m))

    @property
    def spectral_shape(self):
        return (self.n, self.n, self.nz)

    @property
    def physical_shape(self):
        return (self.n, self.n, self.n)

    def mesh(self):
        """Physical coordinates, shape (3, n, n, n)."""
        x = np.arange(self.n) * (LENGTH / self.n)
        return np.stack(np.meshgrid(x, x, x, indexing="ij"))

    def __eq__(self, other):
        return isinstance(other, Grid) and other.n == self.n

    def __repr__(self):
        return f"Grid(n={self.n})"


# ----------------------------------------------------------------- fields

class SpectralField:
    """Immutable wrapper around a coefficient array on a grid."""

    LEAD = ()

    def __init__(self, grid, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        want = self.LEAD + grid.spectral_shape
        if coeffs.shape != want:
            raise ValueError(f"coefficient shape {coeffs.shape}, expected {want}")
        self.grid = grid
        self.coeffs = coeffs
        coeffs.flags.writeable = False

    @classmethod
    def from_physical(cls, grid, samples):
        samples = np.asarray(samples, dtype=float)
        want = cls.LEAD + grid.physical_shape
        if samples.shape != want:
            raise ValueError(f"sample shape {samples.shape}, expected {want}")
        return cls(grid, _forward(grid, samples))

    def to_physical(self):
        return _inverse(self.grid, self.coeffs)

    def __add__(self, other):
        _same_kind(self, other)
        return type(self)(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_kind(self, other)
        return type(self)(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return type(self)(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(self.grid, -self.coeffs)


class SpectralScalar(SpectralField):
    LEAD = ()


class SpectralVector(SpectralField):
    LEAD = (3,)


class SpectralSymTensor(SpectralField):
    """Symmetric 3x3 field stored as six components (11,22,33,12,13,23)."""

    LEAD = (6,)


class SpectralTensor(SpectralField):
    """Full 3x3 tensor field, components [i, j] = row i, column j."""

    LEAD = (3, 3)


_KIND_BY_LEAD = {
    (): SpectralScalar,
    (3,): SpectralVector,
    (6,): SpectralSymTensor,
    (3, 3): SpectralTensor,
}


def _same_kind(a, b):
    if type(a) is not type(b) or a.grid != b.grid:
        raise ValueError("mismatched field kinds or grids")


def forward(grid, samples):
    """Transform physical samples to a field, kind inferred from shape."""
    samples = np.asarray(samples, dtype=float)
    kind = _KIND_BY_LEAD.get(samples.shape[:-3])
    if kind is None or samples.shape[-3:] != grid.physical_shape:
        raise ValueError(f"cannot infer field kind from shape {samples.shape}")
    return kind.from_physical(grid, samples)


def inverse(field):
    """Physical samples of a field on its own grid."""
    return _inverse(field.grid, field.coeffs)


def _forward(grid, samples):
    return sfft.rfftn(samples, axes=(-3, -2, -1), workers=1) / grid.n ** 3


def _inverse(grid, coeffs):
    n = grid.n
    return sfft.irfftn(coeffs, s=(n, n, n), axes=(-3, -2, -1), workers=1) * n ** 3


# -------------------------------------------------- dealiased products

def _pad_spectrum(grid, coeffs):
    m, mz = grid.pad_n, grid.pad_nz
    out = np.zeros(coeffs.shape[:-3] + (m, m, mz), dtype=np.complex128)
    h = grid.n // 2
    for sa, da in zip(grid._src, grid._dst):
        for sb, db in zip(grid._src, grid._dst):
            out[..., da, db, 0:h] = coeffs[..., sa, sb, 0:h]
    return out


def _unpad_spectrum(grid, padded):
    n, nz = grid.n, grid.nz
    out = np.zeros(padded.shape[:-3] + (n, n, nz), dtype=np.complex128)
    h = n // 2
    for sa, da in zip(grid._src, grid._dst):
        for sb, db in zip(grid._src, grid._dst):
            out[..., sa, sb, 0:h] = padded[..., da, db, 0:h]
    return out


def pad_to_physical(grid, coeffs):
    """Evaluate base-grid coefficients on the 3/2 padded grid."""
    m = grid.pad_n
    big = _pad_spectrum(grid, coeffs)
    return sfft.irfftn(big, s=(m, m, m), axes=(-3, -2, -1), workers=1) * m ** 3


def physical_to_base(grid, samples):
    """Transform padded-grid samples and truncate to the base modes."""
    m = grid.pad_n
    big = sfft.rfftn(samples, axes=(-3, -2, -1), workers=1) / m ** 3
    return _unpad_spectrum(grid, big)


def pointwise_product(a, b):
    """Dealiased product of two scalar fields."""
    _same_kind(a, b)
    g = a.grid
    prod = pad_to_physical(g, a.coeffs) * pad_to_physical(g, b.coeffs)
    return SpectralScalar(g, physical_to_base(g, prod))


def advect(u, f):
    """u . grad f for a velocity u and a field f of any kind, dealiased."""
    if not isinstance(u, SpectralVector):
        raise ValueError("advecting velocity must be a vector field")
    g = u.grid
    up = pad_to_physical(g, u.coeffs)
    lead = f.coeffs.shape[:-3]
    grads = np.stack([1j * k * f.coeffs for k in g.kvec], axis=-4)
    gp = pad_to_physical(g, grads).reshape((-1, 3) + up.shape[-3:])
    out = np.einsum("lxyz,clxyz->cxyz", up, gp)
    return type(f)(g, physical_to_base(g, out.reshape(lead + up.shape[-3:])))


def matmul(a, b):
    """Pointwise matrix product of two tensor fields (full result)."""
    g = a.grid
    ap = pad_to_physical(g, _as_full(a))
    bp = pad_to_physical(g, _as_full(b))
    prod = np.einsum("ij...,jk...->ik...", ap, bp)
    return SpectralTensor(g, physical_to_base(g, prod))


def outer(a, b):
    """Pointwise outer product a_i b_j of two vector fields."""
    if not isinstance(a, SpectralVector) or not isinstance(b, SpectralVector):
        raise ValueError("outer product expects two vector fields")
    g = a.grid
    ap = pad_to_physical(g, a.coeffs)
    bp = pad_to_physical(g, b.coeffs)
    prod = np.einsum("i...,j...->ij...", ap, bp)
    return SpectralTensor(g, physical_to_base(g, prod))


def product(a, b, kind):
    """Dispatch on contraction kind: pointwise | advect | matmul | outer."""
    table = {"pointwise": pointwise_product, "advect": advect,
             "matmul": matmul, "outer": outer}
    if kind not in table:
        raise ValueError(f"unknown product kind {kind!r}")
    return table[kind](a, b)


def _as_full(field):
    if isinstance(field, SpectralTensor):
        return field.coeffs
    if isinstance(field, SpectralSymTensor):
        return field.coeffs[SYM_OF_FULL]
    raise ValueError("expected a tensor field")


def sym_to_full(field):
    return SpectralTensor(field.grid, field.coeffs[SYM_OF_FULL])


def sym_part(field):
    """Symmetric part of a full tensor field, in six-component storage."""
    c = field.coeffs
    rows = [0.5 * (c[i, j] + c[j, i]) for i, j in SYM_COMPS]
    return SpectralSymTensor(field.grid, np.stack(rows))


# ------------------------------------------------------------ operators

def multiplier(field, s):
    """Fourier multiplier |grad|^s; the k = 0 coefficient maps to 0 for s != 0."""
    g = field.grid
    if s == 0:
        return field
    if s < 0:
        _require_mean_zero(field, "|grad|^s with s < 0")
    kn = g.knorm
    with np.errstate(divide="ignore"):
        mult = np.where(kn > 0, kn, 1.0) ** s
    mult[kn == 0] = 0.0
    return type(field)(g, field.coeffs * mult)


def _require_mean_zero(field, what):
    mean = field.coeffs[..., 0, 0, 0]
    scale = np.max(np.abs(field.coeffs)) + 1.0
    if np.max(np.abs(mean)) > 1e-12 * scale:
        raise MeanNotZero(f"{what} needs a mean-zero field")


def field_mean(field):
    """The k = 0 coefficient, i.e. the average over the box."""
    return np.real(field.coeffs[..., 0, 0, 0])


def gradient(f):
    if not isinstance(f, SpectralScalar):
        raise ValueError("gradient expects a scalar field")
    g = f.grid
    return SpectralVector(g, np.stack([1j * k * f.coeffs for k in g.kvec]))


def divergence(v):
    if not isinstance(v, SpectralVector):
        raise ValueError("divergence expects a vector field")
    g = v.grid
    c = sum(1j * k * v.coeffs[i] for i, k in enumerate(g.kvec))
    return SpectralScalar(g, c)


def vector_gradient(u):
    """Full gradient tensor with [i, j] = d_j u_i."""
    g = u.grid
    rows = np.stack([np.stack([1j * k * u.coeffs[i] for k in g.kvec])
                     for i in range(3)])
    return SpectralTensor(g, rows)


def sym_grad(u):
    """Deformation tensor D(u) = (grad u + grad u^T) / 2, six components."""
    g = u.grid
    kv = g.kvec
    rows = [0.5j * (kv[j] * u.coeffs[i] + kv[i] * u.coeffs[j])
            for i, j in SYM_COMPS]
    return SpectralSymTensor(g, np.stack(rows))


def skew_grad(u):
    """Vorticity tensor Omega(u) = (grad u - grad u^T) / 2, full storage."""
    g = u.grid
    kv = g.kvec
    rows = np.empty((3, 3) + g.spectral_shape, dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            rows[i, j] = 0.5j * (kv[j] * u.coeffs[i] - kv[i] * u.coeffs[j])
    return SpectralTensor(g, rows)


def tensor_divergence(t):
    """Row-wise divergence [div t]_i = sum_j d_j t_ij for sym or full t."""
    g = t.grid
    full = _as_full(t)
    c = np.stack([sum(1j * g.kvec[j] * full[i, j] for j in range(3))
                  for i in range(3)])
    return SpectralVector(g, c)


def double_divergence(t):
    """Scalar sum_ij d_i d_j t_ij of a symmetric tensor field."""
    g = t.grid
    full = _as_full(t)
    c = -sum(g.kvec[i] * g.kvec[j] * full[i, j]
             for i in range(3) for j in range(3))
    return SpectralScalar(g, c)


def laplacian(field):
    return type(field)(field.grid, -field.grid.k2 * field.coeffs)


def inv_laplacian(field):
    _require_mean_zero(field, "inverse Laplacian")
    g = field.grid
    return type(field)(g, -g.inv_k2 * field.coeffs)


def leray_project(v):
    """Remove the gradient part: v - k (k.v) / |k|^2, k = 0 untouched."""
    if not isinstance(v, SpectralVector):
        raise ValueError("Leray projection expects a vector field")
    g = v.grid
    dot = sum(k * v.coeffs[i] for i, k in enumerate(g.kvec)) * g.inv_k2
    out = np.stack([v.coeffs[i] - g.kvec[i] * dot for i in range(3)])
    return SpectralVector(g, out)


def divergence_carrier(tau):
    """Symmetric sigma with div sigma = div tau, exactly, mode by mode.

    sigma = -i/|k|^2 [w k^T + k w^T - (k.w) k k^T / |k|^2] with w the
    divergence of tau; tau - sigma is divergence-free to round-off.
    """
    if not isinstance(tau, SpectralSymTensor):
        raise ValueError("expected a symmetric tensor field")
    g = tau.grid
    w = tensor_divergence(tau).coeffs
    kdotw = sum(k * w[i] for i, k in enumerate(g.kvec))
    c = -1j * g.inv_k2
    rows = []
    for i, j in SYM_COMPS:
        term = w[i] * g.kvec[j] + g.kvec[i] * w[j] \
            - kdotw * g.kvec[i] * g.kvec[j] * g.inv_k2
        rows.append(c * term)
    return SpectralSymTensor(g, np.stack(rows))


# -------------------------------------------------- inner products, norms

def _multiplicity(field):
    if isinstance(field, SpectralSymTensor):
        return SYM_MULT.reshape(6, 1, 1, 1)
    return 1.0


def l2_inner(a, b):
    """Real L^2 inner product over the box, full tensor contraction.

    Symmetric storage counts off-diagonal components twice, so pairings
    agree with the full nine-entry contraction.
    """
    _same_kind(a, b)
    quad = np.real(a.coeffs * np.conj(b.coeffs)) * _multiplicity(a)
    return VOLUME * np.sum(a.grid.weight * quad)


def l2_norm(field):
    return np.sqrt(max(l2_inner(field, field), 0.0))


def weighted_pairing(a, b, p):
    """Sum over modes of |k|^{2p} <a, b>, i.e. <grad^j |grad|^r a, ...> pairings.

    Modes with |k| = 0 are dropped whenever p < 0.
    """
    _same_kind(a, b)
    g = a.grid
    if p < 0:
        with np.errstate(divide="ignore"):
            wk = np.where(g.k2 > 0, g.k2, 1.0) ** p
        wk[g.k2 == 0] = 0.0
    else:
        wk = g.k2 ** p
    quad = np.real(a.coeffs * np.conj(b.coeffs)) * _multiplicity(a)
    return VOLUME * np.sum(g.weight * wk * quad)


def sobolev_norm(field, s, prefix=0, homogeneous=False):
    """Sobolev norm || |grad|^prefix field ||_{H^s}; mean dropped if prefix < 0.

    With homogeneous=True only the top derivative term |k|^{2(s+prefix)}
    is kept (the dot-H^s seminorm of the prefixed field).
    """
    if s < 0 or s != int(s):
        raise ValueError("order must be a nonnegative integer")
    powers = [s + prefix] if homogeneous else [j + prefix for j in range(s + 1)]
    total = sum(weighted_pairing(field, field, p) for p in powers)
    return np.sqrt(max(total, 0.0))


# ------------------------------------------------------- mode utilities

def _half_index(grid, k):
    kx, ky, kz = (int(c) for c in k)
    if kz < 0:
        raise ValueError("stored half-spectrum has kz >= 0")
    return kx % grid.n, ky % grid.n, kz


def get_mode(field, k):
    """Amplitude of e^{i k.x}; negative kz read via the conjugate partner."""
    kx, ky, kz = (int(c) for c in k)
    if kz < 0:
        return np.conj(get_mode(field, (-kx, -ky, -kz)))
    return field.coeffs[(Ellipsis,) + _half_index(field.grid, k)]

def field_from_modes(grid, modes, kind=SpectralScalar):
    """Build a real field as sum over entries of a e^{ik.x} + conj(a) e^{-ik.x}.

    The k = 0 entry contributes once and must be real.  Amplitudes are
    scalars or arrays matching the field kind's component shape.
    """
    coeffs = np.zeros(kind.LEAD + grid.spectral_shape, dtype=np.complex128)
    for k, amp in modes.items():
        kx, ky, kz = (int(c) for c in k)
        amp = np.asarray(amp, dtype=np.complex128)
        if (kx, ky, kz) == (0, 0, 0):
            if np.max(np.abs(amp.imag)) > 0:
                raise ValueError("k = 0 amplitude must be real")
            coeffs[(Ellipsis,) + (0, 0, 0)] += amp
            continue
        if kz > 0:
            coeffs[(Ellipsis,) + _half_index(grid, (kx, ky, kz))] += amp
        elif kz < 0:
            coeffs[(Ellipsis,) + _half_index(grid, (-kx, -ky, -kz))] += np.conj(amp)
        else:
            coeffs[(Ellipsis,) + _half_index(grid, (kx, ky, 0))] += amp
            coeffs[(Ellipsis,) + _half_index(grid, (-kx, -ky, 0))] += np.conj(amp)
    return kind(grid, coeffs)


def hermitian_defect(field):
    """Max deviation from conjugate symmetry on the self-paired kz planes."""
    g = field.grid
    idx = (-np.arange(g.n)) % g.n
    worst = 0.0
    for plane in (0, g.nz - 1):
        p = field.coeffs[..., plane]
        mirrored = p[..., idx, :][..., :, idx]
        worst = max(worst, float(np.max(np.abs(p - np.conj(mirrored)))))
    return worst


# -------------------------------------------------------- random fields

def _band_mask(grid, kmax, mean_zero):
    mask = grid.true_k2 <= kmax ** 2 + 0.5
    if mean_zero:
        mask = mask & (grid.true_k2 > 0)
    return mask


def random_scalar(grid, rng, kmax, mean_zero=True):
    f = forward(grid, rng.standard_normal(grid.physical_shape))
    return SpectralScalar(grid, f.coeffs * _band_mask(grid, kmax, mean_zero))


def random_vector(grid, rng, kmax, solenoidal=False):
    f = forward(grid, rng.standard_normal((3,) + grid.physical_shape))
    v = SpectralVector(grid, f.coeffs * _band_mask(grid, kmax, True))
    return leray_project(v) if solenoidal else v


def random_sym_tensor(grid, rng, kmax, mean_zero=True):
    f = forward(grid, rng.standard_normal((6,) + grid.physical_shape))
    return SpectralSymTensor(grid, f.coeffs * _band_mask(grid, kmax, mean_zero))


def random_tensor(grid, rng, kmax, mean_zero=True):
    f = forward(grid, rng.standard_normal((3, 3) + grid.physical_shape))
    return SpectralTensor(grid, f.coeffs * _band_mask(grid, kmax, mean_zero))
