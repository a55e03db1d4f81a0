"""Cut-and-project schemes: model sets in R^d from lattices in R^(d+m).

A scheme is a lattice basis in R^(d+m) together with a window in the internal
space R^m.  The generated set is the physical projection of the lattice points
whose internal projection falls in the window.  ``m = 0`` is allowed and means
the set is the (projected) lattice itself, with covolume ``|det basis|``; this
is the calibration case for every density test downstream.

Windows are finite unions of disjoint half-open boxes ``[lo, hi)``.  Half-open
faces make covolumes exact under tilings and dodge boundary double-counting;
window membership is tested with an exactness epsilon of 0, so users wanting
robustness against borderline windows should place window faces away from
internal lattice coordinates (``regularity_diagnostics`` reports how close a
finite sample gets).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateBasisError, EmptyWindowError
from .pointset import Box, PointPatch, as_box

_ENUM_LIMIT = 200_000_000  # hard cap on integer candidates per generate call


@dataclass(frozen=True, eq=False)
class Window:
    """Finite union of pairwise disjoint half-open boxes in R^m."""

    m: int
    boxes: tuple[tuple[tuple[float, float], ...], ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("window dimension must be >= 1")
        boxes = tuple(as_box(b) for b in self.boxes)
        for b in boxes:
            if len(b) != self.m:
                raise ValueError("window box dimension mismatch")
        for b1, b2 in itertools.combinations(boxes, 2):
            if all(lo1 < hi2 and lo2 < hi1 for (lo1, hi1), (lo2, hi2) in zip(b1, b2)):
                raise ValueError("window boxes must be pairwise disjoint")
        object.__setattr__(self, "boxes", boxes)

    @property
    def volume(self) -> float:
        vol = 0.0
        for b in self.boxes:
            part = 1.0
            for lo, hi in b:
                part *= hi - lo
            vol += part
        return vol

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def bounding_box(self) -> Box:
        if self.is_empty:
            raise EmptyWindowError("empty window")
        lo = [min(b[k][0] for b in self.boxes) for k in range(self.m)]
        hi = [max(b[k][1] for b in self.boxes) for k in range(self.m)]
        return tuple(zip(lo, hi))

    def contains(self, y: np.ndarray) -> np.ndarray:
        """Half-open membership mask for sample rows ``y`` of shape (n, m)."""
        y = np.asarray(y, dtype=np.float64).reshape(-1, self.m)
        mask = np.zeros(len(y), dtype=bool)
        for b in self.boxes:
            lo = np.array([iv[0] for iv in b])
            hi = np.array([iv[1] for iv in b])
            mask |= np.all((y >= lo) & (y < hi), axis=1)
        return mask

    def boundary_distance(self, y: np.ndarray) -> np.ndarray:
        """Sup-norm distance from each sample to the nearest box face (diagnostic)."""
        y = np.asarray(y, dtype=np.float64).reshape(-1, self.m)
        dist = np.full(len(y), np.inf)
        for b in self.boxes:
            lo = np.array([iv[0] for iv in b])
            hi = np.array([iv[1] for iv in b])
            below = lo - y
            above = y - hi
            outside = np.maximum(below, above).max(axis=1)
            inside = np.minimum(y - lo, hi - y).min(axis=1)
            d = np.where(outside > 0, outside, inside)
            dist = np.minimum(dist, np.abs(d))
        return dist

    def __eq__(self, other):
        if not isinstance(other, Window):
            return NotImplemented
        return self.m == other.m and self.boxes == other.boxes


@dataclass(frozen=True, eq=False)
class CutProjectScheme:
    """Lattice basis in R^(d+m) plus an internal window; ``window=None`` iff ``m=0``.

    The basis columns generate the lattice.  Construction runs a finite
    injectivity check: no nonzero integer combination with coordinates up to
    ``injectivity_radius`` may have (numerically) vanishing physical part.
    This is a necessary-condition check, not a proof.
    """

    d: int
    m: int
    basis: np.ndarray
    window: Window | None = None
    injectivity_radius: int = 3
    injectivity_tol: float = 1e-9

    def __post_init__(self):
        if self.d < 1 or self.m < 0:
            raise ValueError("need d >= 1 and m >= 0")
        n = self.d + self.m
        basis = np.asarray(self.basis, dtype=np.float64).reshape(n, n)
        basis = basis.copy()
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        det = np.linalg.det(basis)
        if not np.isfinite(det) or abs(det) < 1e-12:
            raise DegenerateBasisError("lattice basis is singular")
        if self.m == 0:
            if self.window is not None:
                raise ValueError("m = 0 schemes take window=None")
        else:
            if self.window is None or self.window.m != self.m:
                raise ValueError("window dimension must equal m")
        if self.m > 0 and self.injectivity_radius > 0:
            self._check_injectivity()

    def _check_injectivity(self):
        r = self.injectivity_radius
        axes = [np.arange(-r, r + 1)] * (self.d + self.m)
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d + self.m)
        grid = grid[np.any(grid != 0, axis=1)]
        phys = grid @ self.basis.T[:, : self.d]
        bad = np.abs(phys).max(axis=1) < self.injectivity_tol
        if bad.any():
            raise ValueError(
                "projection to physical space is not injective on the lattice "
                f"(nonzero vector with |p_G| < {self.injectivity_tol})"
            )

    @property
    def abs_det(self) -> float:
        return float(abs(np.linalg.det(self.basis)))

    def physical_part(self, gamma: np.ndarray) -> np.ndarray:
        return gamma[..., : self.d]

    def internal_part(self, gamma: np.ndarray) -> np.ndarray:
        return gamma[..., self.d :]


def lattice_scheme(basis, d: int | None = None) -> CutProjectScheme:
    """Scheme with m = 0: the generated set is the lattice spanned by ``basis``."""
    basis = np.asarray(basis, dtype=np.float64)
    if basis.ndim == 0:
        basis = basis.reshape(1, 1)
    if d is None:
        d = basis.shape[0]
    return CutProjectScheme(d=d, m=0, basis=basis, window=None)


def _integer_bounds(scheme: CutProjectScheme, region: Box) -> tuple[np.ndarray, np.ndarray]:
    """Integer coordinate bounds covering all lattice points in the region.

    The region corners are mapped through the inverse basis; the enclosing
    integer box is inflated by 1 per coordinate to guard against rounding at
    the region faces.
    """
    inv = np.linalg.inv(scheme.basis)
    corners = np.array(list(itertools.product(*region)))
    pre = corners @ inv.T
    lo = np.floor(pre.min(axis=0)).astype(np.int64) - 1
    hi = np.ceil(pre.max(axis=0)).astype(np.int64) + 1
    return lo, hi


def generate_model_set(scheme: CutProjectScheme, box) -> PointPatch:
    """All points ``p_G(gamma)`` with ``p_H(gamma)`` in the window and ``p_G(gamma)`` in ``box``.

    Enumeration is complete: integer coordinates are bounded through the
    inverse basis applied to ``box x bbox(window)``, so no qualifying lattice
    point is missed.  An empty window yields an empty patch.
    """
    box = as_box(box)
    if len(box) != scheme.d:
        raise ValueError("box dimension must equal the physical dimension d")
    if scheme.m > 0 and scheme.window.is_empty:
        return PointPatch(dim=scheme.d, box=box, points=np.empty((0, scheme.d)))
    region = box if scheme.m == 0 else box + scheme.window.bounding_box()
    lo, hi = _integer_bounds(scheme, region)
    counts = (hi - lo + 1).astype(np.int64)
    total = int(np.prod(counts))
    if total > _ENUM_LIMIT:
        raise ValueError(f"enumeration of {total} integer candidates exceeds the limit")
    box_lo = np.array([b[0] for b in box])
    box_hi = np.array([b[1] for b in box])
    rest_axes = [np.arange(lo[k], hi[k] + 1) for k in range(1, scheme.d + scheme.m)]
    rest = (
        np.stack(np.meshgrid(*rest_axes, indexing="ij"), axis=-1).reshape(-1, len(rest_axes))
        if rest_axes
        else np.zeros((1, 0), dtype=np.int64)
    )
    chunk = max(1, int(2_000_000 // max(1, len(rest))))
    found = []
    for start in range(int(lo[0]), int(hi[0]) + 1, chunk):
        firsts = np.arange(start, min(start + chunk, int(hi[0]) + 1))
        ints = np.concatenate(
            [
                np.repeat(firsts, len(rest))[:, None],
                np.tile(rest, (len(firsts), 1)),
            ],
            axis=1,
        )
        gamma = ints @ scheme.basis.T
        phys = gamma[:, : scheme.d]
        mask = np.all((phys >= box_lo) & (phys <= box_hi), axis=1)
        if scheme.m > 0:
            mask &= scheme.window.contains(gamma[:, scheme.d :])
        if mask.any():
            found.append(phys[mask])
    pts = np.concatenate(found) if found else np.empty((0, scheme.d))
    return PointPatch(dim=scheme.d, box=box, points=pts)


def model_set_covolume(scheme: CutProjectScheme) -> float:
    """``|det basis| / vol(window)``; for m = 0 the lattice covolume ``|det basis|``."""
    if scheme.m == 0:
        return scheme.abs_det
    vol = scheme.window.volume
    if vol <= 0:
        raise EmptyWindowError("empty window")
    return scheme.abs_det / vol


def internal_density_diagnostic(
    scheme: CutProjectScheme,
    radius: float,
    resolution: float,
) -> tuple[bool, float]:
    """Check that sampled internal projections fill the window to ``resolution``.

    Enumerates lattice points with physical part in ``[-radius, radius]^d``
    and reports the largest distance from a point of the window to the sample
    set, together with whether it stays below ``resolution``.  The internal
    projections of a genuine cut-and-project lattice are dense, so failures at
    generous radii point at a degenerate scheme.  Diagnostic only.
    """
    if scheme.m == 0:
        return True, 0.0
    if radius <= 0 or resolution <= 0:
        raise ValueError("radius and resolution must be positive")
    bbox = scheme.window.bounding_box()
    region = tuple((-radius, radius) for _ in range(scheme.d)) + bbox
    lo, hi = _integer_bounds(scheme, region)
    axes = [np.arange(lo[k], hi[k] + 1) for k in range(scheme.d + scheme.m)]
    if int(np.prod([len(a) for a in axes])) > _ENUM_LIMIT:
        raise ValueError("diagnostic enumeration too large; reduce radius")
    ints = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, scheme.d + scheme.m)
    gamma = ints @ scheme.basis.T
    keep = np.abs(gamma[:, : scheme.d]).max(axis=1) <= radius
    internal = gamma[keep, scheme.d :]
    internal = internal[scheme.window.contains(internal)]
    if len(internal) == 0:
        return False, math.inf
    probe_axes = []
    for wlo, whi in bbox:
        count = max(2, int(math.ceil((whi - wlo) / (resolution / 2.0))) + 1)
        probe_axes.append(np.linspace(wlo, whi, count))
    mesh = np.meshgrid(*probe_axes, indexing="ij")
    probes = np.stack([m.ravel() for m in mesh], axis=1)
    probes = probes[scheme.window.contains(probes)]
    dist, _ = cKDTree(internal).query(probes, k=1, p=np.inf)
    worst = float(dist.max())
    return worst <= resolution, worst


@dataclass(frozen=True)
class RegularityReport:
    """Finite-radius window-regularity diagnostic; never a proof."""

    min_boundary_distance: float | None
    n_inspected: int
    suspect: bool
    note: str


def regularity_diagnostics(
    scheme: CutProjectScheme,
    radius: float,
    internal_margin: float | None = None,
    tol: float = 1e-9,
) -> RegularityReport:
    """Minimum distance from sampled internal projections to the window faces.

    Inspects lattice points with physical part in ``[-radius, radius]^d`` and
    internal part within the window bounding box inflated by
    ``internal_margin``.  Flags "suspect non-regular" when any sampled
    internal projection sits within ``tol`` of a window face.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if scheme.m == 0:
        return RegularityReport(None, 0, False, "lattice scheme has no window; nothing to check")
    bbox = scheme.window.bounding_box()
    if internal_margin is None:
        internal_margin = max(hi - lo for lo, hi in bbox) / 2.0
    region = tuple((-radius, radius) for _ in range(scheme.d)) + tuple(
        (lo - internal_margin, hi + internal_margin) for lo, hi in bbox
    )
    lo, hi = _integer_bounds(scheme, region)
    axes = [np.arange(lo[k], hi[k] + 1) for k in range(scheme.d + scheme.m)]
    total = int(np.prod([len(a) for a in axes]))
    if total > _ENUM_LIMIT:
        raise ValueError("diagnostic enumeration too large; reduce radius")
    ints = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, scheme.d + scheme.m)
    gamma = ints @ scheme.basis.T
    phys_ok = np.abs(gamma[:, : scheme.d]).max(axis=1) <= radius
    internal = gamma[phys_ok, scheme.d :]
    lo_r = np.array([iv[0] for iv in region[scheme.d :]])
    hi_r = np.array([iv[1] for iv in region[scheme.d :]])
    internal = internal[np.all((internal >= lo_r) & (internal <= hi_r), axis=1)]
    if len(internal) == 0:
        return RegularityReport(None, 0, False, "insufficient sample")
    dist = float(scheme.window.boundary_distance(internal).min())
    suspect = dist < tol
    note = "suspect non-regular" if suspect else f"finite-window evidence at radius {radius}"
    return RegularityReport(dist, int(len(internal)), suspect, note)
