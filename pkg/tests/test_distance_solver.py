import numpy as np
import pytest

from feasilab import convex_sets as cs
from feasilab.distance_solver import (SolveConfig, distance_lower_bound,
                                      min_distance_pair, piecewise_min_distance)
from feasilab.families import example_cone_hyperplane, example_nonconvex

v = cs.validate


class TestMinDistancePair:
    def test_disjoint_balls(self):
        r = min_distance_pair(v(cs.Ball(np.zeros(2), 1.0)),
                              v(cs.Ball(np.array([4.0, 0.0]), 1.0)))
        assert r.distance == pytest.approx(2.0, abs=1e-10)
        assert np.allclose(r.a, [1.0, 0.0], atol=1e-8)
        assert np.allclose(r.b, [3.0, 0.0], atol=1e-8)
        assert r.status == "converged"

    def test_intersecting_distance_zero(self):
        r = min_distance_pair(v(cs.Halfspace(np.array([1.0, 0.0]), 0.0)),
                              v(cs.Ball(np.zeros(2), 1.0)))
        assert r.distance <= 1e-9

    def test_truncated_cone_vs_hyperplane(self):
        fam = example_cone_hyperplane(4, 8)
        r = min_distance_pair(fam.A_n, fam.B_n)
        assert r.distance == pytest.approx(0.25, abs=1e-12)
        assert r.lower_bound == pytest.approx(0.25, abs=1e-12)

    def test_pair_memberships(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            d = int(rng.integers(2, 5))
            A = v(cs.Ball(rng.normal(size=d), 0.5 + rng.random()))
            B = v(cs.Box(2.5 + rng.random(d), 4.0 + rng.random(d)))
            r = min_distance_pair(A, B)
            assert cs.contains(A, r.a, 1e-8)
            assert cs.contains(B, r.b, 1e-8)
            assert r.distance == pytest.approx(np.linalg.norm(r.a - r.b),
                                               abs=1e-10)

    def test_trace_nonincreasing(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            d = int(rng.integers(2, 4))
            A = v(cs.Ball(rng.normal(size=d), 0.5 + rng.random()))
            B = v(cs.Ball(rng.normal(size=d) + 3.0, 0.5 + rng.random()))
            r = min_distance_pair(A, B)
            assert np.all(np.diff(r.trace) <= 1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(15):
            d = int(rng.integers(2, 4))
            A = v(cs.MotzkinSet(rng.normal(size=(4, d)), np.zeros((0, d))))
            B = v(cs.Ball(rng.normal(size=d) + 4.0, 0.5))
            ab = min_distance_pair(A, B).distance
            ba = min_distance_pair(B, A).distance
            assert ab == pytest.approx(ba, abs=1e-9)

    def test_certificate_below_sampled_cross_pairs(self):
        rng = np.random.default_rng(4)
        A = v(cs.MotzkinSet(rng.normal(size=(5, 3)) - 3.0, np.zeros((0, 3))))
        B = v(cs.Ball(np.array([3.0, 0.0, 0.0]), 1.0))
        r = min_distance_pair(A, B)
        assert r.lower_bound <= r.distance + 1e-8
        for _ in range(100):
            lam = rng.dirichlet(np.ones(5))
            a = A.points.T @ lam
            u = rng.normal(size=3)
            b = B.center + B.radius * u / np.linalg.norm(u) * rng.random()
            assert r.distance <= np.linalg.norm(a - b) + 1e-9

    def test_start_respected_on_nonunique_instances(self):
        # parallel strips: the reached pair depends on the (deterministic) start
        A = v(cs.Box(np.array([-np.inf, 0.0]), np.array([np.inf, 1.0])))
        B = v(cs.Box(np.array([-np.inf, 3.0]), np.array([np.inf, 4.0])))
        r1 = min_distance_pair(A, B, SolveConfig(start=np.array([5.0, 0.0])))
        r2 = min_distance_pair(A, B, SolveConfig(start=np.array([-5.0, 0.0])))
        assert r1.distance == pytest.approx(2.0, abs=1e-10)
        assert r2.distance == pytest.approx(2.0, abs=1e-10)
        assert abs(r1.a[0] - r2.a[0]) > 5.0


class TestLowerBound:
    def test_halfspace_vs_ball(self):
        lb = distance_lower_bound(
            v(cs.Halfspace(np.array([1.0, 0.0]), 0.0)),
            v(cs.Ball(np.array([4.0, 0.0]), 1.0)), np.array([1.0, 0.0]))
        assert lb.value == pytest.approx(3.0, abs=1e-12)
        assert lb.certified

    def test_cone_family_certificate(self):
        for n in (2, 4, 8):
            fam = example_cone_hyperplane(n, 8)
            lb = distance_lower_bound(fam.A_n, fam.B_n, np.eye(8)[0])
            assert lb.value == pytest.approx(1.0 / n, abs=1e-12)

    def test_orthogonal_functional_useless(self):
        A = v(cs.Box(np.array([-np.inf, 0.0]), np.array([np.inf, 1.0])))
        B = v(cs.Box(np.array([-np.inf, 3.0]), np.array([np.inf, 4.0])))
        lb = distance_lower_bound(A, B, np.array([1.0, 0.0]))
        assert lb.value == 0.0
        assert not lb.certified


class TestPiecewise:
    def test_counterexample_n2(self):
        fam = example_nonconvex(2)
        rep = piecewise_min_distance(fam.A_n, fam.B_n)
        assert rep.report.distance == pytest.approx(0.5, abs=1e-9)
        assert np.allclose(rep.report.a, [-0.25, 32.0], atol=1e-8)
        assert np.allclose(rep.report.b, [0.25, 32.0], atol=1e-8)
        assert rep.winner == (1, 1)

    def test_counterexample_n4(self):
        fam = example_nonconvex(4)
        rep = piecewise_min_distance(fam.A_n, fam.B_n)
        assert rep.report.distance == pytest.approx(0.25, abs=1e-9)
        assert np.allclose(rep.report.a, [-0.125, 128.0], atol=1e-8)

    def test_identical_single_piece(self):
        ball = v(cs.Ball(np.zeros(2), 1.0))
        pw = v(cs.PiecewiseSet((ball,)))
        rep = piecewise_min_distance(pw, pw)
        assert rep.report.distance <= 1e-10
        assert rep.winner == (0, 0)

    def test_report_serialization(self):
        fam = example_nonconvex(2)
        rep = piecewise_min_distance(fam.A_n, fam.B_n).report
        obj = rep.to_obj(include_trace=False)
        assert "trace" not in obj
        assert obj["distance"] == rep.distance
        assert "trace" in rep.to_obj()
