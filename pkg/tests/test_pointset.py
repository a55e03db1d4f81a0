import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aperio import PointPatch, is_relatively_dense, rel_separation, translate
from aperio.errors import EmptyPatchError, WindowTooLargeError
from aperio.pointset import (
    box_volume,
    inflate_box,
    points_in_box,
    rel_separation_sweep,
    restrict,
    shrink_box,
    window_count_bound,
)

from conftest import brute_force_window_max, make_lattice_patch, make_satellites_patch


def grid_patch(spacing, half_width):
    pts = np.arange(-half_width, half_width + spacing / 2, spacing)[:, None]
    return PointPatch(dim=1, box=[(-half_width, half_width)], points=pts)


class TestPointPatchInvariants:
    def test_points_sorted_canonically(self):
        p = PointPatch(dim=1, box=[(-5, 5)], points=[[3.0], [-2.0], [0.0]])
        assert p.points.ravel().tolist() == [-2.0, 0.0, 3.0]

    def test_lex_sort_in_2d(self):
        p = PointPatch(dim=2, box=[(-5, 5), (-5, 5)], points=[[1, 2], [0, 3], [1, -1]])
        assert p.points.tolist() == [[0, 3], [1, -1], [1, 2]]

    def test_duplicate_points_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            PointPatch(dim=1, box=[(0, 1)], points=[[0.5], [0.5]])

    def test_point_outside_box_rejected(self):
        with pytest.raises(ValueError, match="inside"):
            PointPatch(dim=1, box=[(0, 1)], points=[[2.0]])

    def test_merge_eps_dedupes_imported_data(self):
        p = PointPatch.from_points(1, [(0, 1)], [[0.5], [0.5 + 1e-12], [0.9]], merge_eps=1e-9)
        assert p.n_points == 2

    def test_empty_patch_is_a_value(self):
        p = PointPatch(dim=1, box=[(0, 1)], points=np.empty((0, 1)))
        assert p.is_empty
        with pytest.raises(EmptyPatchError, match="empty"):
            rel_separation(p, 0.1)


class TestRelSeparation:
    def test_unit_lattice_unit_window(self):
        assert rel_separation(grid_patch(1.0, 10), 0.5).ell == 1

    def test_interleaved_pair_lattice(self):
        pts = np.sort(np.concatenate([np.arange(-10, 11.0), np.arange(-10, 10.0) + 0.1]))
        p = PointPatch(dim=1, box=[(-10, 10)], points=pts[:, None])
        assert rel_separation(p, 0.5).ell == 2

    def test_satellites_patch(self):
        p = make_satellites_patch(100.0)
        assert rel_separation(p, 0.5).ell == 2

    def test_against_brute_force_sweep(self):
        p = make_satellites_patch(30.0)
        for u in (0.3, 0.5, 0.8, 1.0):
            expected = brute_force_window_max(p.points, u, sweep_step=0.001)
            assert rel_separation(p, u).ell == expected

    def test_2d_oracle_small(self):
        rng = np.random.default_rng(3)
        pts = rng.uniform(-4, 4, size=(40, 2))
        p = PointPatch(dim=2, box=[(-4, 4), (-4, 4)], points=pts)
        u = 1.2
        # brute force over a dense center grid plus coordinate-anchored boxes
        best = 0
        xs = np.concatenate([pts[:, 0], np.arange(-4, 4, 0.05)])
        ys = np.concatenate([pts[:, 1], np.arange(-4, 4, 0.05)])
        for cx in xs:
            inx = (pts[:, 0] >= cx) & (pts[:, 0] < cx + u)
            if not inx.any():
                continue
            sub = pts[inx, 1]
            for cy in ys:
                best = max(best, int(np.sum((sub >= cy) & (sub < cy + u))))
        assert rel_separation(p, u).ell == best

    def test_min_gap_and_max_gap_radius(self):
        s = rel_separation(grid_patch(1.0, 10), 0.5)
        assert s.min_gap == 1.0
        assert s.max_gap_radius == pytest.approx(0.5, abs=1e-9)

    def test_certified_box_recorded(self):
        s = rel_separation(grid_patch(1.0, 10), 0.5)
        assert s.certified_box == ((-9.5, 9.5),)

    def test_window_exceeding_patch_rejected(self):
        with pytest.raises(WindowTooLargeError, match="window exceeds patch"):
            rel_separation(grid_patch(1.0, 2), 4.5)

    def test_sweep_reports_per_window_counts(self):
        p = make_satellites_patch(50.0)
        stats = rel_separation_sweep(p, [1.0, 0.5, 0.25])
        assert [s.u_radius for s in stats] == [0.25, 0.5, 1.0]
        assert [s.ell for s in stats] == [2, 2, 3]


class TestRelativeDenseness:
    def test_unit_lattice(self):
        assert is_relatively_dense(grid_patch(1.0, 10), 0.5) is True
        assert is_relatively_dense(grid_patch(1.0, 10), 0.4) is False

    def test_doubled_lattice(self):
        assert is_relatively_dense(grid_patch(2.0, 10), 1.0) is True

    def test_2d_grid(self):
        p = make_lattice_patch(1.0, 6.0, dim=2)
        assert is_relatively_dense(p, 0.5) is True
        assert is_relatively_dense(p, 0.45) is False


class TestTranslate:
    def test_identity_shift(self, z_patch):
        assert translate(z_patch, [0.0]) == z_patch

    def test_quarter_shift(self):
        p = grid_patch(1.0, 2)
        q = translate(p, [0.25])
        assert q.points.ravel().tolist() == [-1.75, -0.75, 0.25, 1.25, 2.25]
        assert q.box == ((-1.75, 2.25),)

    @given(st.floats(-7, 7).map(lambda s: round(s, 4)))
    @settings(max_examples=40, deadline=None)
    def test_round_trip(self, shift):
        p = grid_patch(0.5, 5)
        q = translate(translate(p, [shift]), [-shift])
        assert np.allclose(q.points, p.points, atol=1e-9)
        assert np.allclose(q.box, p.box, atol=1e-9)

    @given(st.floats(-50, 50).map(lambda s: round(s, 3)), st.sampled_from([0.3, 0.5, 1.0]))
    @settings(max_examples=25, deadline=None)
    def test_stats_translation_invariant(self, shift, u):
        p = make_satellites_patch(60.0)
        a = rel_separation(p, u)
        b = rel_separation(translate(p, [shift]), u)
        assert a.ell == b.ell
        assert a.min_gap == pytest.approx(b.min_gap, abs=1e-9)


class TestWindowMonotonicityAndBound:
    def test_ell_monotone_in_window_size(self):
        p = make_satellites_patch(80.0)
        ells = [rel_separation(p, u).ell for u in (0.2, 0.4, 0.6, 0.9, 1.2)]
        assert ells == sorted(ells)

    @given(st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_counting_bound_on_random_subboxes(self, seed):
        rng = np.random.default_rng(seed)
        p = make_satellites_patch(60.0)
        u = 0.5
        stats = rel_separation(p, u)
        lo, hi = shrink_box(p.box, u)[0]
        a = rng.uniform(lo, hi - 0.5)
        length = rng.uniform(0.5, min(20.0, hi - a))
        k_box = ((a, a + length),)
        count = int(points_in_box(p.points, k_box).sum())
        assert count <= window_count_bound(stats.ell, u, k_box) + 1e-9

    def test_counting_bound_formula(self):
        # ell * vol(K + U) / vol(U) with U the open box of side u
        assert window_count_bound(2, 0.5, ((0.0, 3.0),)) == pytest.approx(2 * 3.5 / 0.5)


class TestRestrict:
    def test_restrict_is_exact_intersection(self, fibonacci_patch):
        sub = restrict(fibonacci_patch, [(-100, 100)])
        mask = np.abs(fibonacci_patch.points[:, 0]) <= 100
        assert np.array_equal(sub.points, fibonacci_patch.points[mask])

    def test_box_helpers(self):
        assert box_volume(((0, 2), (0, 3))) == 6
        assert inflate_box(((0, 2),), 0.5) == ((-0.5, 2.5),)
