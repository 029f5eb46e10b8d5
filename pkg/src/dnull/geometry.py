"""Discrete differential geometry on compact 2-sections.

Grids are equiangular (theta, phi) on the sphere (cell-centered, poles
excluded) or periodic (x, y) on the flat torus.  Angular derivatives are
4th-order centered finite differences, one-sided near the theta boundary
rows, with a mild Fourier low-pass applied to the two rows nearest each
pole whenever a theta/phi derivative is taken.  Quadrature is cell-mass
weighted midpoint (trapezoidal in the periodic direction), exact for
round-metric area elements.

Tensor fields are stored as coordinate-basis component arrays:
rank 0 -> (n1, n2), rank 1 -> (2, n1, n2), rank 2 -> (2, 2, n1, n2).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .tolerances import TOL

SPHERE = "sphere"
TORUS = "torus"


@dataclass(frozen=True)
class Grid2D:
    topology: str
    n1: int
    n2: int
    theta1: np.ndarray
    theta2: np.ndarray
    d1: float
    d2: float
    quad_w: np.ndarray
    size_param: tuple

    def coords(self):
        return np.meshgrid(self.theta1, self.theta2, indexing="ij")

    @property
    def shape(self):
        return (self.n1, self.n2)


def build_grid(topology, n1, n2, size_param):
    """Node layout and quadrature weights for one section.

    size_param: radius for the sphere, (L1, L2) periods for the torus.
    """
    if n1 < 8 or n2 < 8 or n1 % 2 or n2 % 2:
        raise ValueError("resolutions must be even and >= 8, got %d x %d" % (n1, n2))
    if topology == SPHERE:
        r = float(size_param)
        if r <= 0:
            raise ValueError("radius must be positive")
        d1 = np.pi / n1
        d2 = 2 * np.pi / n2
        th = (np.arange(n1) + 0.5) * d1
        ph = np.arange(n2) * d2
        # exact cell mass of sin(theta) over each theta cell, against the
        # node value of sin(theta); makes round-metric area integrals exact
        cell_mass = np.cos(np.arange(n1) * d1) - np.cos((np.arange(n1) + 1) * d1)
        w1 = cell_mass / np.sin(th)
        qw = np.outer(w1, np.full(n2, d2))
        return Grid2D(SPHERE, n1, n2, th, ph, d1, d2, qw, (r,))
    if topology == TORUS:
        L1, L2 = (float(size_param[0]), float(size_param[1]))
        if L1 <= 0 or L2 <= 0:
            raise ValueError("periods must be positive")
        d1, d2 = L1 / n1, L2 / n2
        x = np.arange(n1) * d1
        y = np.arange(n2) * d2
        qw = np.full((n1, n2), d1 * d2)
        return Grid2D(TORUS, n1, n2, x, y, d1, d2, qw, (L1, L2))
    raise ValueError("unknown topology %r" % (topology,))


@dataclass
class SurfaceField:
    rank: int
    data: np.ndarray
    symmetric: bool = False
    traceless: bool = False

    @staticmethod
    def scalar(arr):
        return SurfaceField(0, np.asarray(arr, dtype=float))

    @staticmethod
    def oneform(arr):
        return SurfaceField(1, np.asarray(arr, dtype=float))

    @staticmethod
    def symtensor(arr, traceless=False):
        return SurfaceField(2, np.asarray(arr, dtype=float), symmetric=True,
                            traceless=traceless)

    def copy(self):
        return replace(self, data=self.data.copy())


# -- finite differences ------------------------------------------------------

_D1_4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
# 5-point one-sided / offset first-derivative stencils (4th order)
_D1_OFF = {
    0: np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    1: np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
}


def _diff_periodic(arr, axis, h):
    out = np.zeros_like(arr)
    for k, c in zip((-2, -1, 1, 2), (_D1_4[0], _D1_4[1], _D1_4[3], _D1_4[4])):
        out += c * np.roll(arr, -k, axis=axis)
    return out / h


def _diff_bounded(arr, axis, h):
    a = np.moveaxis(arr, axis, 0)
    out = np.zeros_like(a)
    n = a.shape[0]
    out[2:-2] = (a[0:-4] * _D1_4[0] + a[1:-3] * _D1_4[1]
                 + a[3:-1] * _D1_4[3] + a[4:] * _D1_4[4])
    for i in (0, 1):
        st = _D1_OFF[i]
        out[i] = sum(st[k] * a[k] for k in range(5))
        out[n - 1 - i] = -sum(st[k] * a[n - 1 - k] for k in range(5))
    return np.moveaxis(out, 0, axis) / h


def _pole_repair(arr, n_rows=2, n_fit=4):
    """Replace the outer theta rows by cubic extrapolation from the interior.

    Used for pole-amplified scalars (Gauss curvature) whose finite-difference
    values in the outermost rows divide by det(gamma) ~ sin^2(theta).
    """
    out = arr.copy()
    idx = np.arange(n_rows, n_rows + n_fit, dtype=float)
    V = np.vander(idx, n_fit, increasing=True)
    for i in range(n_rows):
        w = np.linalg.solve(V.T, np.array([float(i) ** k for k in range(n_fit)]))
        out[i] = np.tensordot(w, arr[n_rows:n_rows + n_fit], axes=(0, 0))
        w2 = w
        out[-1 - i] = np.tensordot(w2, arr[-1 - n_rows:-1 - n_rows - n_fit:-1],
                                   axes=(0, 0))
    return out


def _pole_filter(arr, grid, rows=2, keep=3):
    """Fourier low-pass in phi on the rows nearest each pole (in place)."""
    n2 = grid.n2
    kmax = max(keep, n2 // 4)
    for i in list(range(rows)) + list(range(grid.n1 - rows, grid.n1)):
        spec = np.fft.rfft(arr[..., i, :], axis=-1)
        spec[..., kmax + 1:] = 0.0
        arr[..., i, :] = np.fft.irfft(spec, n=n2, axis=-1)
    return arr


def partial(grid, arr, axis):
    """Coordinate partial derivative along theta^1 (axis=0) or theta^2 (axis=1)."""
    nd_axis = arr.ndim - 2 + axis
    h = grid.d1 if axis == 0 else grid.d2
    if grid.topology == TORUS or axis == 1:
        out = _diff_periodic(arr, nd_axis, h)
    else:
        out = _diff_bounded(arr, nd_axis, h)
    if grid.topology == SPHERE:
        out = _pole_filter(out.copy(), grid)
    return out


# -- geometry of one section --------------------------------------------------

@dataclass
class SphereGeometry:
    grid: Grid2D
    gamma: SurfaceField
    gamma_inv: SurfaceField
    sqrt_det: np.ndarray
    christoffel: np.ndarray          # (2, 2, 2, n1, n2): Gamma^A_{BC}
    gauss_K: np.ndarray
    eps_lower: np.ndarray            # (2, 2, n1, n2)
    eps_upper: np.ndarray

    @property
    def area(self):
        return float(np.sum(self.grid.quad_w * self.sqrt_det))


class NonPositiveMetric(ValueError):
    def __init__(self, node):
        self.node = node
        super().__init__("section metric not positive definite at node %s" % (node,))


def geometry_from_metric(grid, gamma):
    """Derived geometry of a section metric (inverse, connection, curvature)."""
    g = gamma.data if isinstance(gamma, SurfaceField) else np.asarray(gamma)
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    bad = (det <= 0) | (g[0, 0] <= 0)
    if np.any(bad):
        raise NonPositiveMetric(tuple(int(x) for x in np.argwhere(bad)[0]))
    inv = np.empty_like(g)
    inv[0, 0] = g[1, 1] / det
    inv[1, 1] = g[0, 0] / det
    inv[0, 1] = inv[1, 0] = -g[0, 1] / det
    sq = np.sqrt(det)
    dg = np.stack([partial(grid, g, 0), partial(grid, g, 1)])  # (D,A,B,n1,n2)
    chr_ = np.empty((2, 2, 2) + g.shape[2:])
    for a in range(2):
        for b in range(2):
            for c in range(2):
                s = np.zeros_like(det)
                for d in range(2):
                    s += inv[a, d] * (dg[b, d, c] + dg[c, d, b] - dg[d, b, c])
                chr_[a, b, c] = 0.5 * s
    # intrinsic curvature K = R_{1212}/det from the direct lowered formula;
    # the connection enters through values only, which stays accurate in the
    # near-pole rows where d(cot theta) is badly resolved
    d11_g22 = partial(grid, dg[0, 1, 1], 0)
    d22_g11 = partial(grid, dg[1, 0, 0], 1)
    d12_g12 = partial(grid, dg[1, 0, 1], 0)
    r1212 = d12_g12 - 0.5 * (d11_g22 + d22_g11)
    for e in range(2):
        for fq in range(2):
            r1212 += g[e, fq] * (chr_[e, 0, 1] * chr_[fq, 1, 0]
                                 - chr_[e, 1, 1] * chr_[fq, 0, 0])
    K = r1212 / det
    if grid.topology == SPHERE:
        K = _pole_repair(K)
    eye = np.array([[0.0, 1.0], [-1.0, 0.0]])
    epsl = eye[:, :, None, None] * sq
    epsu = eye[:, :, None, None] / sq
    gam = gamma if isinstance(gamma, SurfaceField) else SurfaceField.symtensor(gamma)
    return SphereGeometry(grid, gam, SurfaceField(2, inv, symmetric=True), sq,
                          chr_, K, epsl, epsu)


def round_sphere_metric(grid, radius):
    th, _ = grid.coords()
    g = np.zeros((2, 2) + grid.shape)
    g[0, 0] = radius ** 2
    g[1, 1] = (radius * np.sin(th)) ** 2
    return SurfaceField.symtensor(g)


def flat_torus_metric(grid, conformal=None):
    g = np.zeros((2, 2) + grid.shape)
    g[0, 0] = g[1, 1] = 1.0
    if conformal is not None:
        g[0, 0] = g[1, 1] = np.exp(2.0 * conformal)
    return SurfaceField.symtensor(g)


# -- covariant derivative and the first-order operators -----------------------

def covd_data(geom, arr, rank):
    """Surface covariant derivative of raw component data; new first index."""
    grid, chr_ = geom.grid, geom.christoffel
    if rank == 0:
        return np.stack([partial(grid, arr, 0), partial(grid, arr, 1)])
    if rank == 1:
        out = np.empty((2, 2) + grid.shape)
        d = np.stack([partial(grid, arr, 0), partial(grid, arr, 1)])
        for b in range(2):
            for c in range(2):
                out[b, c] = d[b, c] - chr_[0, b, c] * arr[0] - chr_[1, b, c] * arr[1]
        return out
    if rank == 2:
        out = np.empty((2, 2, 2) + grid.shape)
        d = np.stack([partial(grid, arr, 0), partial(grid, arr, 1)])
        for b in range(2):
            for c in range(2):
                for e in range(2):
                    t = d[b, c, e]
                    for dd in range(2):
                        t = t - chr_[dd, b, c] * arr[dd, e] - chr_[dd, b, e] * arr[c, dd]
                    out[b, c, e] = t
        return out
    raise ValueError("rank > 2 not supported")


def covd(fld, geom):
    if fld.rank > 2:
        raise ValueError("rank > 2 not supported")
    return SurfaceField(fld.rank + 1, covd_data(geom, fld.data, fld.rank))


def div_data(geom, arr, rank):
    gi = geom.gamma_inv.data
    D = covd_data(geom, arr, rank)
    if rank == 1:
        return np.einsum("bc...,bc...->...", gi, D)
    if rank == 2:
        return np.einsum("bc...,bca...->a...", gi, D)
    raise ValueError("div needs rank >= 1")


def curl_data(geom, arr):
    D = covd_data(geom, arr, 1)
    return (D[0, 1] - D[1, 0]) / geom.sqrt_det


def noh_data(geom, arr):
    D = covd_data(geom, arr, 1)
    dv = np.einsum("bc...,bc...->...", geom.gamma_inv.data, D)
    g = geom.gamma.data
    out = np.empty_like(D)
    for a in range(2):
        for b in range(2):
            out[a, b] = D[a, b] + D[b, a] - g[a, b] * dv
    return out


def first_order_ops(fld, geom, which):
    if which == "div":
        if fld.rank < 1:
            raise ValueError("div needs rank >= 1")
        return SurfaceField(fld.rank - 1, div_data(geom, fld.data, fld.rank))
    if which == "curl":
        if fld.rank != 1:
            raise ValueError("curl implemented for rank 1")
        return SurfaceField.scalar(curl_data(geom, fld.data))
    if which == "nabla_hat_otimes":
        if fld.rank != 1:
            raise ValueError("nabla_hat_otimes needs rank 1")
        return SurfaceField(2, noh_data(geom, fld.data), symmetric=True,
                            traceless=True)
    raise ValueError("unknown operator %r" % (which,))


# -- pointwise bilinear algebra ------------------------------------------------

def dot_data(geom, a, ra, b, rb):
    gi = geom.gamma_inv.data
    if ra == rb == 1:
        return np.einsum("ab...,a...,b...->...", gi, a, b)
    if ra == rb == 2:
        return np.einsum("ac...,bd...,ab...,cd...->...", gi, gi, a, b)
    raise ValueError("dot needs equal ranks 1 or 2")


def con21_data(geom, G, F):
    gi = geom.gamma_inv.data
    return np.einsum("bc...,ab...,c...->a...", gi, G, F)


def oh_data(geom, a, b):
    g = geom.gamma.data
    d = dot_data(geom, a, 1, b, 1)
    out = np.empty((2, 2) + d.shape)
    for i in range(2):
        for j in range(2):
            out[i, j] = a[i] * b[j] + a[j] * b[i] - g[i, j] * d
    return out


def wedge_data(geom, G, H):
    return np.einsum("ab...,cd...,ac...,bd...->...",
                     geom.eps_upper, geom.gamma_inv.data, G, H)


def star1_data(geom, F):
    return np.einsum("ac...,cb...,b...->a...", geom.gamma.data, geom.eps_upper, F)


def star2_data(geom, G):
    return np.einsum("bd...,dc...,ac...->ab...", geom.gamma.data, geom.eps_upper, G)


def trace_data(geom, G):
    return np.einsum("ab...,ab...->...", geom.gamma_inv.data, G)


def bilinear_ops(F1, F2, geom, which):
    if which == "dot":
        return SurfaceField.scalar(dot_data(geom, F1.data, F1.rank, F2.data, F2.rank))
    if which == "hat_otimes":
        if F1.rank != 1 or F2.rank != 1:
            raise ValueError("hat_otimes needs two 1-forms")
        return SurfaceField(2, oh_data(geom, F1.data, F2.data), symmetric=True,
                            traceless=True)
    if which == "wedge":
        if F1.rank != 2 or F2.rank != 2:
            raise ValueError("wedge needs two rank-2 fields")
        return SurfaceField.scalar(wedge_data(geom, F1.data, F2.data))
    if which == "star":
        if F1.rank == 1:
            return SurfaceField(1, star1_data(geom, F1.data))
        if F1.rank == 2:
            return SurfaceField(2, star2_data(geom, F1.data))
        raise ValueError("star needs rank 1 or 2")
    if which == "trace":
        if F1.rank < 2:
            raise ValueError("trace needs rank >= 2")
        return SurfaceField.scalar(trace_data(geom, F1.data))
    raise ValueError("unknown operation %r" % (which,))


def pointwise_norm(geom, fld):
    """sqrt(<f,f>_gamma) per node."""
    if fld.rank == 0:
        return np.abs(fld.data)
    sq = dot_data(geom, fld.data, fld.rank, fld.data, fld.rank)
    return np.sqrt(np.maximum(sq, 0.0))


def integrate(geom, scalar_data):
    return float(np.sum(geom.grid.quad_w * geom.sqrt_det * scalar_data))


def integrate_and_norm(fld, geom, p):
    """L^p(S) norm with the gamma-contraction magnitude."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if not np.all(np.isfinite(fld.data)):
        raise ValueError("field has non-finite entries")
    mag = pointwise_norm(geom, fld)
    if p == np.inf:
        return float(np.max(mag))
    return integrate(geom, mag ** p) ** (1.0 / p)


def tensor_magnitude_sq(geom, fld):
    if fld.rank == 0:
        return fld.data ** 2
    return dot_data(geom, fld.data, fld.rank, fld.data, fld.rank)


def random_band_limited(grid, seed, rank=0, kmax=3, amplitude=1.0):
    """Deterministic low-band random field used for test profiles and the
    angular shapes of singular data."""
    rng = np.random.default_rng(seed)
    t1, t2 = grid.coords()
    if grid.topology == SPHERE:
        u1, u2 = t1, t2
        per1 = False
    else:
        L1, L2 = grid.size_param
        u1, u2 = 2 * np.pi * t1 / L1, 2 * np.pi * t2 / L2
        per1 = True
    ncomp = {0: 1, 1: 2, 2: 4}[rank]
    comps = []
    for _ in range(ncomp):
        f = np.zeros(grid.shape)
        for k1 in range(0, kmax + 1):
            for k2 in range(0, kmax + 1):
                a, b, c, d = rng.normal(size=4) / (1 + k1 + k2) ** 2
                if per1:
                    f += a * np.cos(k1 * u1 + k2 * u2) + b * np.sin(k1 * u1 + k2 * u2)
                    f += c * np.cos(k1 * u1 - k2 * u2) + d * np.sin(k1 * u1 - k2 * u2)
                else:
                    # vanish fast enough at the poles that the chart components
                    # of tensors stay regular
                    base = np.sin(u1) ** max(2, rank + 1)
                    f += base * (a * np.cos(k1 * u1) + b * np.sin(k1 * u1)) \
                        * (np.cos(k2 * u2) if k2 else 1.0) \
                        + base * (c * np.sin(k2 * u2) if k2 else 0.0)
        comps.append(amplitude * f)
    if rank == 0:
        return SurfaceField.scalar(comps[0])
    if rank == 1:
        return SurfaceField.oneform(np.stack(comps))
    data = np.empty((2, 2) + grid.shape)
    data[0, 0], data[0, 1] = comps[0], comps[1]
    data[1, 0], data[1, 1] = comps[1], comps[2]
    return SurfaceField(2, data, symmetric=True)


def make_traceless(geom, fld):
    """Remove the gamma-trace of a symmetric rank-2 field."""
    tr = trace_data(geom, fld.data)
    g = geom.gamma.data
    out = fld.data.copy()
    for a in range(2):
        for b in range(2):
            out[a, b] -= 0.5 * tr * g[a, b]
    return SurfaceField(2, out, symmetric=True, traceless=True)


def check_field_invariants(geom, fld, name="field"):
    """Violations of the declared symmetric/traceless flags."""
    out = []
    if fld.rank == 2 and fld.symmetric:
        asym = np.max(np.abs(fld.data[0, 1] - fld.data[1, 0]))
        if asym > 0:
            out.append(("symmetry", name, asym))
    if fld.rank == 2 and fld.traceless:
        tr = np.abs(trace_data(geom, fld.data))
        scale = max(float(np.max(np.abs(fld.data))), 1e-300)
        worst = float(np.max(tr))
        if worst > TOL["traceless"] * scale:
            out.append(("traceless", name, worst / scale))
    return out
