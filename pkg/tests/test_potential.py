import math
from fractions import Fraction

import numpy as np
import pytest

from hyperzeros.errors import (
    BranchCollisionError,
    InvalidInputError,
    NonConvergenceError,
    SaddleAtSeedError,
)
from hyperzeros.exact import ComplexRational
from hyperzeros.hyppoly import ParameterSchedule
from hyperzeros.potential import (
    _crosses_cut,
    classify_regions,
    harmonic_value_by_integration,
    level_seed_on_ray,
    make_harmonic_system,
    psi_value,
    trace_conjectured_loop,
    trace_level_curve,
)

CR = ComplexRational
F = Fraction

K1 = ParameterSchedule.loop_2f1(1)
ALPHA = CR(F(1, 2), -1)
CONJ = ParameterSchedule.loop_2f1(ALPHA)
FIG5 = ParameterSchedule.diagonal((CR(0, 1), CR(1, 2)))


@pytest.fixture(scope="module")
def sys_k1():
    return make_harmonic_system(K1)


@pytest.fixture(scope="module")
def sys_conj():
    return make_harmonic_system(CONJ)


@pytest.fixture(scope="module")
def sys_fig5():
    return make_harmonic_system(FIG5)


class TestClosedForms:
    def test_normalized_at_basepoint(self, sys_k1):
        p = sys_k1.basepoint
        assert sys_k1.harmonic(1, p) == 0.0
        assert sys_k1.harmonic(2, p) == 0.0

    def test_shift_matches_h1_at_branch_point(self, sys_conj):
        p2 = sys_conj.branch_point_list[0]
        assert abs(sys_conj.shifted(2, p2) - sys_conj.harmonic(1, p2)) < 1e-12

    def test_lemniscate_identity(self, sys_k1):
        # H~_2 - H_1 = 0 iff |z(1-z)| = 1/4
        for z in (1.2071067811865475, 0.5 + 0.001j, 1.1 + 0.2j):
            lhs = sys_k1.difference((1, 2), z)
            rhs = math.log(abs(z * (1 - z))) - math.log(0.25)
            assert abs(float(lhs) - rhs) < 1e-12

    def test_complex_slope_closed_form(self, sys_conj):
        # alpha = 1/2 - i at z = 2: H_2 = -(1/2) log 2 + const (Arg 2 = 0)
        p = sys_conj.basepoint
        expected = (-0.5 * math.log(2)
                    + 0.5 * math.log(abs(p)) - (-1.0) * np.angle(p))
        assert abs(sys_conj.harmonic(2, 2.0) - expected) < 1e-12

    def test_singularities_rejected(self, sys_k1):
        with pytest.raises(InvalidInputError):
            sys_k1.harmonic(1, 1.0)
        with pytest.raises(InvalidInputError):
            sys_k1.harmonic(2, 0.0)

    def test_closed_forms_need_degenerate(self):
        sched = ParameterSchedule((-1, 1), (0, 1), (F(9, 8),), (1,))
        sys_ = make_harmonic_system(sched, basepoint=2.0 + 1.0j)
        assert sys_.mode == "integral"
        with pytest.raises(InvalidInputError):
            sys_.harmonic(1, 2.0)


class TestIntegration:
    def test_agrees_with_closed_forms(self, sys_k1):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 12:
            z = complex(rng.uniform(0.1, 2.5), rng.uniform(-1.5, 1.5))
            if abs(z) < 0.2 or abs(z - 1) < 0.2:
                continue
            for i in (1, 2):
                hv = float(sys_k1.harmonic(i, z))
                hq = harmonic_value_by_integration(sys_k1, i, z)
                assert abs(hv - hq) < 1e-10
            checked += 1

    def test_complex_slope_agreement(self, sys_conj):
        for z in (2.0 + 0.3j, 0.4 - 0.9j, 1.4 - 1.1j):
            for i in (1, 2):
                hv = float(sys_conj.harmonic(i, z))
                hq = harmonic_value_by_integration(sys_conj, i, z)
                assert abs(hv - hq) < 1e-10

    def test_closed_null_homotopic_path(self, sys_k1):
        v = harmonic_value_by_integration(
            sys_k1, 1, sys_k1.basepoint, path=[1.6 + 0.6j, 1.6 - 0.6j]
        )
        assert abs(v) < 1e-10

    def test_branch_one_is_log(self, sys_k1):
        z = 2.3 + 0.4j
        v = harmonic_value_by_integration(sys_k1, 1, z)
        expected = math.log(abs(1 - z)) - math.log(abs(1 - sys_k1.basepoint))
        assert abs(v - expected) < 1e-10

    def test_integral_mode_machinery(self):
        sched = ParameterSchedule((-1, 1), (0, 1), (F(9, 8),), (1,))
        sys_ = make_harmonic_system(sched, basepoint=2.0 + 1.0j)
        # a null-homotopic loop integrates to zero without closed forms
        v = harmonic_value_by_integration(
            sys_, 1, sys_.basepoint, path=[2.5 + 1.5j, 2.5 + 0.5j]
        )
        assert abs(v) < 1e-9

    def test_collision_on_path_through_branch_point(self):
        sched = ParameterSchedule((-1, 1), (0, 1), (F(9, 8),), (1,))
        sys_ = make_harmonic_system(sched, basepoint=2.0 + 1.0j)
        from hyperzeros.algcurve import branch_points, build_curve

        bp = branch_points(build_curve(sched), sched, 128).points[0]
        target = complex(bp) + (complex(bp) - 2.0 - 1.0j) * 0.2
        with pytest.raises((BranchCollisionError, NonConvergenceError)):
            harmonic_value_by_integration(sys_, 1, target, path=[complex(bp)])


class TestTrace:
    def test_lemniscate_loop(self, sys_k1):
        seed = level_seed_on_ray(sys_k1, (1, 2), 1.0, 1.0)
        curve = trace_level_curve(sys_k1, (1, 2), seed, step=0.005)
        assert curve.closed
        vals = np.abs(curve.points * (1 - curve.points))
        assert np.max(np.abs(vals - 0.25)) < 1e-10
        assert np.max(np.abs(curve.residuals)) < 1e-10

    def test_saddle_detected_on_loop(self, sys_k1):
        curve = trace_conjectured_loop(sys_k1, 2, step=0.005)
        assert curve.closed
        assert any(abs(c.location - 0.5) < 1e-9 for c in curve.critical_points)

    def test_seeding_at_saddle_reports_split(self, sys_k1):
        with pytest.raises(SaddleAtSeedError) as err:
            trace_level_curve(sys_k1, (1, 2), 0.5, step=0.005)
        assert len(err.value.directions) == 4
        dirs = sorted(set(round(d % math.pi, 9) for d in err.value.directions))
        # lemniscate crosses itself at 45 degrees at z = 1/2
        assert abs(dirs[0] - math.pi / 4) < 1e-6
        assert abs(dirs[1] - 3 * math.pi / 4) < 1e-6

    def test_conjectured_loop_complex_alpha(self, sys_conj):
        curve = trace_conjectured_loop(sys_conj, 2, step=0.004)
        assert curve.closed
        p2 = sys_conj.branch_point_list[0]
        assert np.min(np.abs(curve.points - p2)) < 1e-9
        eta, zeta = 0.5, -1.0
        lhs = (np.abs(curve.points) ** eta * np.abs(1 - curve.points)
               * np.exp(-zeta * np.angle(curve.points)))
        rhs = (abs(p2) ** eta * abs(1 - p2) * math.exp(-zeta * np.angle(p2)))
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_same_index_rejected(self, sys_k1):
        with pytest.raises(InvalidInputError):
            trace_level_curve(sys_k1, (1, 1), 1.2)

    def test_far_seed_rejected(self, sys_k1):
        with pytest.raises(InvalidInputError):
            trace_level_curve(sys_k1, (1, 2), 50.0 + 50.0j)


class TestIntegralModeTrace:
    def test_matches_closed_form_level_set(self, sys_k1):
        """Force integral mode on the k=1 system: the traced level set through a
        lemniscate point must coincide with the closed-form lemniscate."""
        from hyperzeros.potential import HarmonicSystem

        forced = HarmonicSystem(
            sys_k1.schedule, sys_k1.basepoint, "integral", sys_k1.curve, (), ()
        )
        seed = level_seed_on_ray(sys_k1, (1, 2), 1.0, 1.0)
        # at the seed the lexicographically sorted branches are (-1/z, 1/(z-1)),
        # so integral-mode pair (1, 2) traces the same difference up to sign
        curve = trace_level_curve(forced, (1, 2), seed, step=0.01, max_points=2000)
        assert len(curve.points) > 50
        vals = np.abs(curve.points * (1 - curve.points))
        assert np.max(np.abs(vals - 0.25)) < 1e-8

    def test_gradient_consistency(self):
        """Integral-mode H along a short segment matches its branch-value gradient."""
        sched = ParameterSchedule((-1, 1), (0, 1), (F(9, 8),), (1,))
        sys_ = make_harmonic_system(sched, basepoint=2.0 + 1.0j)
        z0 = 1.8 + 0.9j
        h = 1e-5
        v0 = harmonic_value_by_integration(sys_, 1, z0)
        v1 = harmonic_value_by_integration(sys_, 1, z0 + h)
        v2 = harmonic_value_by_integration(sys_, 1, z0 + 1j * h)
        from hyperzeros.potential import _BranchTracker

        tracker = _BranchTracker(sys_.curve)
        ws = sorted(tracker.all_branches(sys_.basepoint), key=lambda v: (v.real, v.imag))
        w = ws[0]
        steps = 40
        for k in range(1, steps + 1):
            w, _ = tracker.step(sys_.basepoint + (z0 - sys_.basepoint) * k / steps, w)
        # gradient of Re int f ds is conj(f)
        assert abs((v1 - v0) / h - w.real) < 1e-4
        assert abs((v2 - v0) / h - (-w.imag)) < 1e-4


class TestPsi:
    def test_inside_lobe_argmax_two(self, sys_k1):
        assert psi_value(sys_k1, 1.05).index == 2

    def test_far_outside_argmax_one(self, sys_k1):
        assert psi_value(sys_k1, 1e6 + 0j).index == 1

    def test_tie_on_curve(self, sys_k1):
        seed = level_seed_on_ray(sys_k1, (1, 2), 1.0, 1.0)
        pv = psi_value(sys_k1, seed)
        assert pv.tie
        assert pv.index == 1

    def test_permutation_invariance(self):
        a2, a3 = CR(0, 1), CR(1, 2)
        s1 = ParameterSchedule.diagonal((a2, a3))
        s2 = ParameterSchedule.diagonal((a3, a2))
        g1 = make_harmonic_system(s1, basepoint=0.5 + 0.5j)
        g2 = make_harmonic_system(s2, basepoint=0.5 + 0.5j)
        for z in (1.3 + 0.2j, 0.8 - 0.4j, 2.0 + 1.0j):
            v1 = psi_value(g1, z)
            v2 = psi_value(g2, z)
            assert abs(v1.value - v2.value) < 1e-12
            perm = {1: 1, 2: 3, 3: 2}
            assert v2.index == perm[v1.index] or v1.tie


class TestRegions:
    def test_two_labels_and_boundary_matches_trace(self, sys_k1):
        grid = classify_regions(sys_k1, (-1.0, 2.0, -1.5, 1.5), 200)
        assert grid.labels_present() == [1, 2]
        curve = trace_conjectured_loop(sys_k1, 2, step=0.01)
        kpts = grid.k_points()
        # traced curve and grid boundary agree within 2 cell diagonals
        for z in curve.points[:: max(1, len(curve.points) // 60)]:
            assert np.min(np.abs(kpts - z)) < 2 * grid.cell_diagonal

    def test_fig5_three_labels(self, sys_fig5):
        grid = classify_regions(sys_fig5, (-1.0, 2.0, -1.5, 1.5), 150)
        assert grid.labels_present() == [1, 2, 3]

    def test_single_region_no_k(self, sys_k1):
        grid = classify_regions(sys_k1, (50.0, 51.0, 50.0, 51.0), 32)
        assert grid.labels_present() == [1]
        assert int(grid.kmask.sum()) == 0

    def test_integral_mode_rejected(self):
        sched = ParameterSchedule((-1, 1), (0, 1), (F(9, 8),), (1,))
        sys_ = make_harmonic_system(sched, basepoint=2.0 + 1.0j)
        with pytest.raises(InvalidInputError):
            classify_regions(sys_, (-1, 2, -1, 1), 50)


class TestCutBarrier:
    def test_crossing_predicate(self):
        assert _crosses_cut(-1 + 0.1j, -1 - 0.1j)
        assert not _crosses_cut(1 + 0.1j, 1 - 0.1j)
        assert not _crosses_cut(-1 + 0.1j, -1 + 0.2j)
        assert _crosses_cut(-1 + 0j, -2 + 0j)
