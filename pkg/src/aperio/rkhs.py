"""Translation-covariant reproducing kernels on R^d.

Two concrete kernels are provided:

* ``paley_wiener``: band limitation to a frequency box; the kernel factorizes
  into modulated sinc factors per coordinate and the critical density equals
  the band volume.
* ``gabor_gaussian``: matrix coefficients of time-frequency shifts of the
  L2-normalized Gaussian window on R^(2n).  The shift convention is
  ``pi(x, w) f(t) = exp(2 pi i w t) f(t - x)`` with Heisenberg cocycle
  ``sigma((x, w), (x', w')) = exp(-2 pi i x' . w)``; any other cocycle
  convention yields unitarily equivalent Gram spectra, which is all the frame
  diagnostics consume.  With Lebesgue measure on R^(2n) the critical density
  is 1.  The inequalities checked downstream are products of critical density
  and covolume and therefore do not depend on this normalization choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter

from .errors import DimensionMismatchError, GridTooCoarseError

Band = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class KernelSpec:
    """A reproducing kernel: ``paley_wiener`` with a band box, or ``gabor_gaussian``.

    ``norm_sq_ke`` (the squared norm of the kernel at the identity) is the
    critical density separating sampling from interpolation.
    """

    kind: str
    band: Band | None = None
    n: int | None = None

    def __post_init__(self):
        if self.kind == "paley_wiener":
            if not self.band:
                raise ValueError("paley_wiener kernel needs a band box")
            band = tuple((float(lo), float(hi)) for lo, hi in self.band)
            for lo, hi in band:
                if not lo < hi:
                    raise ValueError("band intervals must be nondegenerate")
            object.__setattr__(self, "band", band)
        elif self.kind == "gabor_gaussian":
            if not self.n or self.n < 1:
                raise ValueError("gabor_gaussian kernel needs n >= 1")
        else:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @property
    def space_dim(self) -> int:
        """Dimension of the space the points live in."""
        if self.kind == "paley_wiener":
            return len(self.band)
        return 2 * self.n

    @property
    def norm_sq_ke(self) -> float:
        if self.kind == "paley_wiener":
            vol = 1.0
            for lo, hi in self.band:
                vol *= hi - lo
            return vol
        return 1.0


def paley_wiener(band) -> KernelSpec:
    """Band-limited kernel; ``band`` is a list of (lo, hi) frequency intervals."""
    return KernelSpec(kind="paley_wiener", band=tuple((lo, hi) for lo, hi in band))


def gabor_gaussian(n: int) -> KernelSpec:
    """Gaussian time-frequency kernel on R^(2n)."""
    return KernelSpec(kind="gabor_gaussian", n=n)


@dataclass(frozen=True)
class CocycleSpec:
    """A continuous 2-cocycle phase on pairs of points.

    ``trivial`` is identically 1; ``heisenberg`` is the time-frequency phase
    ``sigma((x, w), (x', w')) = exp(-2 pi i x' . w)`` on R^(2n).
    """

    kind: str
    n: int | None = None

    def __post_init__(self):
        if self.kind not in ("trivial", "heisenberg"):
            raise ValueError(f"unknown cocycle kind {self.kind!r}")
        if self.kind == "heisenberg" and (not self.n or self.n < 1):
            raise ValueError("heisenberg cocycle needs n >= 1")

    def phase(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        q = np.asarray(q, dtype=np.float64)
        if self.kind == "trivial":
            return np.ones(np.broadcast_shapes(p.shape[:-1], q.shape[:-1]), dtype=np.complex128)
        n = self.n
        x_q = q[..., :n]
        w_p = p[..., n:]
        return np.exp(-2j * np.pi * np.sum(x_q * w_p, axis=-1))


def _sinc_factor(u: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Integral of exp(2 pi i w u) over [lo, hi]; diagonal limit hi - lo."""
    width = hi - lo
    small = np.abs(u) < 1e-308
    us = np.where(small, 1.0, u)
    out = np.exp(1j * np.pi * (lo + hi) * u) * np.sin(np.pi * width * us) / (np.pi * us)
    out[small] = width
    return out


def _pw_matrix(spec: KernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - Y[None, :, :]
    out = np.ones(diff.shape[:2], dtype=np.complex128)
    for k, (lo, hi) in enumerate(spec.band):
        out *= _sinc_factor(diff[..., k], lo, hi)
    return out


def _gabor_matrix(spec: KernelSpec, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    n = spec.n
    xp, wp = P[:, None, :n], P[:, None, n:]
    xq, wq = Q[None, :, :n], Q[None, :, n:]
    # phase exponent (x_q - x_p).(w_p + w_q), in units of pi*i
    expo = np.sum((xq - xp) * (wp + wq), axis=-1)
    dist_sq = np.sum((P[:, None, :] - Q[None, :, :]) ** 2, axis=-1)
    return np.exp(1j * np.pi * expo - np.pi * dist_sq / 2.0)


def kernel_matrix(spec: KernelSpec, xs, ys) -> np.ndarray:
    """Matrix ``K[i, j] = kernel_value(xs[i], ys[j])`` evaluated in bulk."""
    X = np.asarray(xs, dtype=np.float64).reshape(-1, spec.space_dim)
    Y = np.asarray(ys, dtype=np.float64).reshape(-1, spec.space_dim)
    if spec.kind == "paley_wiener":
        return _pw_matrix(spec, X, Y)
    return _gabor_matrix(spec, X, Y)


def kernel_value(spec: KernelSpec, x, y) -> complex:
    """Kernel value k(x, y); Hermitian and translation-covariant in magnitude."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if len(x) != spec.space_dim or len(y) != spec.space_dim:
        raise DimensionMismatchError(
            f"points must have dimension {spec.space_dim}, got {len(x)} and {len(y)}"
        )
    return complex(kernel_matrix(spec, x[None, :], y[None, :])[0, 0])


def kernel_at_identity(spec: KernelSpec, u: np.ndarray) -> np.ndarray:
    """The generating function ``k_e`` evaluated at rows of ``u`` (complex)."""
    u = np.asarray(u, dtype=np.float64).reshape(-1, spec.space_dim)
    if spec.kind == "paley_wiener":
        out = np.ones(len(u), dtype=np.complex128)
        for k, (lo, hi) in enumerate(spec.band):
            out *= _sinc_factor(u[:, k], lo, hi)
        return out
    n = spec.n
    expo = -np.sum(u[:, :n] * u[:, n:], axis=1)
    return np.exp(1j * np.pi * expo - np.pi * np.sum(u**2, axis=1) / 2.0)


def critical_density(spec: KernelSpec) -> float:
    """The critical sampling/interpolation density ``norm_sq_ke``."""
    return spec.norm_sq_ke


def wiener_amalgam_norm(
    spec: KernelSpec,
    q_radius: float,
    trunc_radius: float,
    grid_step: float,
) -> float:
    """Truncated L2 norm of the local maximum function of ``k_e``.

    The local maximum function takes the sup of ``|k_e|`` over sliding boxes
    of half-width ``q_radius``; a finite value is evidence that the kernel
    satisfies the localization (Wiener-amalgam) assumption.  Evaluation is a
    grid sup (maximum filter) plus a Riemann sum over
    ``[-trunc_radius, trunc_radius]^dim``.
    """
    if grid_step >= q_radius:
        raise GridTooCoarseError("grid too coarse: need grid_step < q_radius")
    if trunc_radius <= q_radius:
        raise ValueError("trunc_radius must exceed q_radius")
    dim = spec.space_dim
    half = trunc_radius + q_radius
    count = int(math.ceil(2 * half / grid_step)) + 1
    axis = np.linspace(-half, half, count)
    step = axis[1] - axis[0]
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    mag = np.abs(kernel_at_identity(spec, pts)).reshape([count] * dim)
    win = 2 * int(round(q_radius / step)) + 1
    local_max = maximum_filter(mag, size=win, mode="nearest")
    inner = np.abs(axis) <= trunc_radius + 1e-12
    sl = tuple(np.ix_(*([np.where(inner)[0]] * dim)))
    norm_sq = float((local_max[sl] ** 2).sum() * step**dim)
    return math.sqrt(norm_sq)
