"""Shared corpus fixtures: lattices, the Fibonacci model set, and the
non-separated integers-with-satellites set used across the suite.
"""

import math

import numpy as np
import pytest

from aperio import PointPatch, generate_model_set
from aperio.cutproject import CutProjectScheme, Window, lattice_scheme
from aperio.rkhs import gabor_gaussian, paley_wiener

TAU = (1 + math.sqrt(5)) / 2
TAU_CONJ = (1 - math.sqrt(5)) / 2
SQRT5 = math.sqrt(5)


def make_lattice_patch(spacing: float, half_width: float, dim: int = 1) -> PointPatch:
    basis = np.diag([spacing] * dim) if dim > 1 else [[spacing]]
    box = [(-half_width, half_width)] * dim
    return generate_model_set(lattice_scheme(basis), box)


def make_fibonacci_scheme(window_halfwidth: float = 0.5) -> CutProjectScheme:
    return CutProjectScheme(
        d=1,
        m=1,
        basis=[[1.0, TAU], [1.0, TAU_CONJ]],
        window=Window(m=1, boxes=(((-window_halfwidth, window_halfwidth),),)),
    )


def make_satellites_patch(half_width: float) -> PointPatch:
    """Integers plus a satellite at distance 1/k from each integer k != 0.

    Not separated: satellite gaps shrink like 1/k.  The integer lattice is a
    translation-orbit limit of this set.
    """
    vals = {float(k) for k in range(-int(half_width), int(half_width) + 1)}
    k = 1
    while k <= half_width:
        for s in (k + 1.0 / k, -k - 1.0 / k):
            if abs(s) <= half_width:
                vals.add(s)
        k += 1
    pts = np.array(sorted(vals))[:, None]
    return PointPatch(dim=1, box=[(-half_width, half_width)], points=pts)


@pytest.fixture(scope="session")
def z_patch():
    return make_lattice_patch(1.0, 200.0)


@pytest.fixture(scope="session")
def fibonacci_scheme():
    return make_fibonacci_scheme()


@pytest.fixture(scope="session")
def fibonacci_patch(fibonacci_scheme):
    return generate_model_set(fibonacci_scheme, [(-500, 500)])


@pytest.fixture(scope="session")
def satellites_patch():
    return make_satellites_patch(400.0)


@pytest.fixture(scope="session")
def pw_kernel():
    return paley_wiener([(-0.5, 0.5)])


@pytest.fixture(scope="session")
def gabor_kernel():
    return gabor_gaussian(1)


def brute_force_window_max(points: np.ndarray, width: float, sweep_step: float) -> int:
    """Independent oracle: slide an open 1-d window densely and take the max count.

    Scans centers on a fine grid plus all point-anchored positions; intended
    for cross-checking the production sweep on small patches.
    """
    x = np.sort(points.ravel())
    centers = np.concatenate(
        [
            np.arange(x[0], x[-1] + sweep_step, sweep_step),
            x + width / 2 - 1e-12,
            x - width / 2 + 1e-12,
            x,
        ]
    )
    half = width / 2
    best = 0
    for c in centers:
        best = max(best, int(np.sum((x > c - half) & (x < c + half))))
    return best


def fibonacci_enumeration_oracle(half_width: float, window_halfwidth: float = 0.5) -> np.ndarray:
    """Independent brute-force enumeration of the Fibonacci model set.

    Solves the integer ranges directly from the two linear forms rather than
    going through the inverse-basis corner box used by the generator.
    """
    out = []
    b_max = int((half_width + window_halfwidth) / SQRT5) + 2
    for b in range(-b_max, b_max + 1):
        # x = a + b*tau in [-L, L]  =>  a in [-L - b*tau, L - b*tau]
        a_lo = int(math.floor(-half_width - b * TAU)) - 1
        a_hi = int(math.ceil(half_width - b * TAU)) + 1
        for a in range(a_lo, a_hi + 1):
            x = a + b * TAU
            y = a + b * TAU_CONJ
            if -half_width <= x <= half_width and -window_halfwidth <= y < window_halfwidth:
                out.append(x)
    return np.sort(np.array(out))
