"""Beurling and hull Beurling densities along Folner boxes, covolume estimators.

Folner windows are centered boxes ``[-n, n]^d``.  In d = 1 the inf/sup over
window positions is computed by an exact event sweep (extrema occur when a
window face touches a point); in d >= 2 a translate grid is used and the
estimates are grid-certified only.  Extrapolation to the density limit is
last-value-with-spread; no rate model is fitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cutproject import CutProjectScheme
from .errors import CoverageError, PatchSizeError
from .pointset import (
    Box,
    PointPatch,
    as_box,
    box_edge_lengths,
    box_volume,
    shrink_box,
    _pairwise_min_gap,
)

DEFAULT_GRID_STEP = 0.1


@dataclass(frozen=True)
class FolnerSpec:
    """Increasing centered-box sizes and the translate grid step for d >= 2."""

    sizes: tuple[float, ...]
    translate_grid_step: float | None = None

    def __post_init__(self):
        sizes = tuple(float(n) for n in self.sizes)
        if not sizes:
            raise ValueError("need at least one Folner size")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("Folner sizes must be strictly increasing")
        if any(n <= 0 for n in sizes):
            raise ValueError("Folner sizes must be positive")
        if self.translate_grid_step is not None and self.translate_grid_step <= 0:
            raise ValueError("translate_grid_step must be positive")
        object.__setattr__(self, "sizes", sizes)


@dataclass(frozen=True)
class DensityReport:
    """Per-size inf/sup density estimates with a last-value extrapolation.

    ``lower``/``upper`` hold ``(n, estimate)`` pairs; ``uncertainty`` is the
    spread between the last two sizes, and the extrapolated values are the
    last-size estimates.  ``method`` records per-size provenance tags.
    """

    lower: tuple[tuple[float, float], ...]
    upper: tuple[tuple[float, float], ...]
    extrapolated_lower: float
    extrapolated_upper: float
    uncertainty: float
    certified_region_note: str
    method: tuple[str, ...]
    extras_used_lower: bool = False
    extras_used_upper: bool = False
    covolume_bounds: tuple[float, float] | None = None

    @property
    def sizes(self) -> tuple[float, ...]:
        return tuple(n for n, _ in self.lower)


def _max_feasible_size(patch: PointPatch) -> float:
    return min(box_edge_lengths(patch.box)) / 2.0


def _check_sizes(patch: PointPatch, sizes):
    feasible = _max_feasible_size(patch)
    bad = [n for n in sizes if n > feasible]
    if bad:
        raise PatchSizeError(
            f"patch too small for Folner size {max(bad)}; max feasible n is {feasible}"
        )


def _count_interval(x: np.ndarray, lo, hi) -> np.ndarray:
    """Closed-interval counts |{p : lo <= p <= hi}| for sorted x, vectorized."""
    return np.searchsorted(x, hi, side="right") - np.searchsorted(x, lo, side="left")


def _extrema_1d(x: np.ndarray, n: float, region: tuple[float, float]) -> tuple[float, float]:
    """Exact inf/sup of |patch ^ [c-n, c+n]| / (2n) over centers c in region."""
    a, b = region
    events = np.concatenate([x - n, x + n, [a, b]])
    events = np.unique(events[(events >= a) & (events <= b)])
    if len(events) == 0:
        events = np.array([(a + b) / 2.0])
    sup_counts = _count_interval(x, events - n, events + n)
    mids = (events[1:] + events[:-1]) / 2.0
    inf_cands = np.concatenate([mids, [a, b]])
    inf_counts = _count_interval(x, inf_cands - n, inf_cands + n)
    vol = 2.0 * n
    return float(inf_counts.min() / vol), float(sup_counts.max() / vol)


def _grid_centers(region: Box, step: float) -> list[np.ndarray]:
    axes = []
    for lo, hi in region:
        count = max(1, int(math.floor((hi - lo) / step + 1e-9)) + 1)
        axes.append(lo + step * np.arange(count))
    return axes


def _extrema_grid(pts: np.ndarray, n: float, region: Box, step: float) -> tuple[float, float]:
    """Grid inf/sup of normalized window counts; overcounts inf, undercounts sup."""
    axes = _grid_centers(region, step)
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=1)
    vol = (2.0 * n) ** pts.shape[1]
    best_min, best_max = np.inf, -np.inf
    chunk = max(1, int(20_000_000 // max(1, len(pts))))
    for start in range(0, len(centers), chunk):
        c = centers[start : start + chunk]
        inside = np.ones((len(c), len(pts)), dtype=bool)
        for k in range(pts.shape[1]):
            inside &= np.abs(pts[None, :, k] - c[:, k, None]) <= n
        counts = inside.sum(axis=1)
        best_min = min(best_min, counts.min())
        best_max = max(best_max, counts.max())
    return float(best_min / vol), float(best_max / vol)


def _patch_extrema(patch: PointPatch, n: float, step: float | None) -> tuple[float, float, str]:
    region = shrink_box(patch.box, n)
    if patch.dim == 1:
        lo, hi = _extrema_1d(patch.points[:, 0], n, region[0])
        return lo, hi, "exact"
    if step is None:
        gap = _pairwise_min_gap(patch.points)
        step = min(DEFAULT_GRID_STEP, gap / 2.0) if np.isfinite(gap) else DEFAULT_GRID_STEP
    lo, hi = _extrema_grid(patch.points, n, region, step)
    return lo, hi, f"grid(step={step})"


def _assemble_report(
    patches: list[PointPatch],
    spec: FolnerSpec,
    note: str,
) -> DensityReport:
    """inf/sup per size over every supplied patch (first = base, rest = extras)."""
    for p in patches:
        if p.is_empty:
            raise PatchSizeError("cannot estimate density of an empty patch")
        _check_sizes(p, spec.sizes)
    lower, upper, methods = [], [], []
    extras_lo = extras_hi = False
    for n in spec.sizes:
        infs, sups = [], []
        tags = []
        for p in patches:
            lo, hi, tag = _patch_extrema(p, n, spec.translate_grid_step)
            infs.append(lo)
            sups.append(hi)
            tags.append(tag)
        j_lo = int(np.argmin(infs))
        j_hi = int(np.argmax(sups))
        extras_lo |= j_lo > 0
        extras_hi |= j_hi > 0
        lower.append((n, infs[j_lo]))
        upper.append((n, sups[j_hi]))
        methods.append(tags[0])
    if len(spec.sizes) >= 2:
        unc = max(
            abs(lower[-1][1] - lower[-2][1]),
            abs(upper[-1][1] - upper[-2][1]),
        )
    else:
        unc = abs(upper[-1][1] - lower[-1][1])
    return DensityReport(
        lower=tuple(lower),
        upper=tuple(upper),
        extrapolated_lower=lower[-1][1],
        extrapolated_upper=upper[-1][1],
        uncertainty=float(unc),
        certified_region_note=note,
        method=tuple(methods),
        extras_used_lower=extras_lo,
        extras_used_upper=extras_hi,
    )


def beurling_density(patch: PointPatch, spec: FolnerSpec) -> DensityReport:
    """Translate inf/sup of ``|patch ^ (x + [-n,n]^d)| / (2n)^d`` per Folner size.

    Centers range over the patch box shrunk by ``n`` (the certified region);
    the extrapolated values estimate the lower/upper Beurling densities.
    """
    note = (
        f"centers certified on the box shrunk by each Folner size; "
        f"max feasible n = {_max_feasible_size(patch)}"
    )
    return _assemble_report([patch], spec, note)


def hull_beurling_density(
    patch: PointPatch,
    spec: FolnerSpec,
    extra_limit_patches=(),
) -> DensityReport:
    """Density estimates where inf/sup additionally range over supplied limit patches.

    The extra patches are finite stand-ins for orbit-closure limits that
    translate sampling alone cannot reach.  For separated sets the sup side
    needs no extras; the report records which sides actually used them.
    """
    patches = [patch, *extra_limit_patches]
    note = (
        "hull estimate over base patch plus "
        f"{len(patches) - 1} injected limit patch(es); "
        "finite-window evidence only"
    )
    return _assemble_report(patches, spec, note)


@dataclass(frozen=True)
class CovolumeBounds:
    """Certified covolume bounds derived from a density report.

    ``covol_minus`` lies in ``[covol_minus_lo, covol_minus_hi]`` and
    ``covol_plus <= covol_plus_hi``; the latter holds with equality when the
    set was verified relatively dense (``covol_plus_exact``).
    """

    covol_minus_lo: float
    covol_minus_hi: float
    covol_plus_hi: float
    covol_plus_exact: bool

    def as_interval(self) -> tuple[float, float]:
        """Interval containing every invariant-measure covolume."""
        return (self.covol_minus_lo, self.covol_plus_hi)


def covolume_bounds_from_density(
    report: DensityReport,
    ell: int,
    relatively_dense: bool = False,
) -> CovolumeBounds:
    """Covolume bounds certified by the density-covolume comparison.

    Uses the extrapolated hull densities ``D--``/``D++``: the upper covolume
    is at most ``1 / D--`` (equality recorded when relative denseness was
    verified), and the lower covolume lies in ``[1/D++, ell/D++]``.  Zero
    densities yield unbounded covolumes (``inf``).
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    d_minus = report.extrapolated_lower
    d_plus = report.extrapolated_upper
    plus_hi = (1.0 / d_minus) if d_minus > 0 else math.inf
    minus_lo = (1.0 / d_plus) if d_plus > 0 else math.inf
    minus_hi = (ell / d_plus) if d_plus > 0 else math.inf
    return CovolumeBounds(
        covol_minus_lo=minus_lo,
        covol_minus_hi=minus_hi,
        covol_plus_hi=plus_hi,
        covol_plus_exact=bool(relatively_dense),
    )


@dataclass(frozen=True)
class ErgodicEstimate:
    """Covolume estimate from orbit averages; valid only under unique ergodicity."""

    covolume: float
    n_translates: int
    s_box: Box
    provenance: str = "assumes-unique-ergodicity"


def covolume_ergodic_estimate(patch: PointPatch, s_box, translates) -> ErgodicEstimate:
    """Reciprocal of the average windowed density over the supplied translates.

    Counts use half-open windows ``[lo, hi)`` so lattice estimates are exact
    whenever the window side is a multiple of the lattice spacing.  The
    average over an orbit sample estimates the covolume only when the hull
    carries a unique invariant measure; the result is tagged accordingly.
    """
    s_box = as_box(s_box)
    vecs = np.asarray(translates, dtype=np.float64).reshape(-1, patch.dim)
    if len(vecs) == 0:
        raise ValueError("need at least one translate")
    lo = np.array([b[0] for b in s_box])
    hi = np.array([b[1] for b in s_box])
    plo = np.array([b[0] for b in patch.box])
    phi = np.array([b[1] for b in patch.box])
    if np.any(lo + vecs.min(axis=0) < plo - 1e-12) or np.any(hi + vecs.max(axis=0) > phi + 1e-12):
        raise CoverageError("box too small: some translate window exceeds the patch box")
    if patch.dim == 1:
        x = patch.points[:, 0]
        counts = (
            np.searchsorted(x, vecs[:, 0] + hi[0], side="left")
            - np.searchsorted(x, vecs[:, 0] + lo[0], side="left")
        ).astype(np.float64)
    else:
        counts = np.zeros(len(vecs))
        chunk = max(1, int(20_000_000 // max(1, patch.n_points)))
        for start in range(0, len(vecs), chunk):
            v = vecs[start : start + chunk]
            inside = np.ones((len(v), patch.n_points), dtype=bool)
            for k in range(patch.dim):
                shifted = patch.points[None, :, k] - v[:, k, None]
                inside &= (shifted >= lo[k]) & (shifted < hi[k])
            counts[start : start + len(v)] = inside.sum(axis=1)
    vol = box_volume(s_box)
    mean_density = float(np.sort(counts).sum() / len(counts) / vol)
    if mean_density <= 0:
        raise ValueError("orbit average density is zero; covolume estimate unbounded")
    return ErgodicEstimate(
        covolume=1.0 / mean_density,
        n_translates=len(vecs),
        s_box=s_box,
    )


@dataclass(frozen=True)
class TestFunction:
    """Compactly supported test function with an exact integral, for the lattice check.

    ``triangle``: product of 1-d hat functions supported on ``[-1, 1]``.
    ``gaussian``: ``exp(-|x|^2)`` truncated to ``[-trunc, trunc]^d``.
    """

    kind: str
    trunc: float = 8.0

    def __post_init__(self):
        if self.kind not in ("triangle", "gaussian"):
            raise ValueError(f"unknown test function kind {self.kind!r}")

    @property
    def support_radius(self) -> float:
        return 1.0 if self.kind == "triangle" else self.trunc

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "triangle":
            return np.prod(np.maximum(0.0, 1.0 - np.abs(x)), axis=-1)
        inside = np.abs(x).max(axis=-1) <= self.trunc
        return np.where(inside, np.exp(-(x**2).sum(axis=-1)), 0.0)

    def exact_integral(self, dim: int) -> float:
        if self.kind == "triangle":
            return 1.0
        one_dim = math.sqrt(math.pi) * math.erf(self.trunc)
        return one_dim**dim


def weil_check(scheme: CutProjectScheme, f: TestFunction, quadrature_n: int) -> float:
    """Relative residual of the lattice periodization identity.

    Compares the exact integral of ``f`` against the quadrature of the
    lattice-periodized ``f`` over a fundamental domain ``basis * [0,1)^d``.
    The identity is exact for lattices, so the residual measures only
    quadrature error.  Requires an ``m = 0`` scheme.
    """
    if scheme.m != 0:
        raise ValueError("Weil check requires lattice (m = 0 scheme)")
    if quadrature_n < 1:
        raise ValueError("quadrature_n must be positive")
    d = scheme.d
    per_dim = max(1, int(round(quadrature_n ** (1.0 / d))))
    axes = [(np.arange(per_dim) + 0.5) / per_dim] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    unit_nodes = np.stack([m.ravel() for m in mesh], axis=1)
    nodes = unit_nodes @ scheme.basis.T
    # integer translate range covering the support of f around the domain
    inv = np.linalg.inv(scheme.basis)
    r = f.support_radius
    corners = []
    for signs in np.ndindex(*([2] * d)):
        corner = np.array([r if s else -r for s in signs])
        corners.append(corner)
    pre = (np.array(corners) - 0.0) @ inv.T
    margin = int(np.ceil(np.abs(pre).max())) + 2
    shift_axes = [np.arange(-margin, margin + 1)] * d
    shifts = np.stack(np.meshgrid(*shift_axes, indexing="ij"), axis=-1).reshape(-1, d)
    gammas = shifts @ scheme.basis.T
    total = np.zeros(len(nodes))
    for g in gammas:
        total += f(nodes + g)
    rhs = scheme.abs_det * float(total.mean())
    lhs = f.exact_integral(d)
    return abs(lhs - rhs) / abs(lhs)
