import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feasilab.errors import InputError
from feasilab.opt_kernels import (LinearProgram, lp_minimize, nnls,
                                  project_simplex, qp_point_to_motzkin,
                                  solve_lp)


def brute_force_polygon_max(objective, A_ub, b_ub):
    """Independent LP oracle: enumerate vertices from row pairs and maximize
    the objective over the feasible ones."""
    A = np.asarray(A_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    best, arg = -np.inf, None
    for i, j in itertools.combinations(range(A.shape[0]), 2):
        M = A[[i, j]]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        v = np.linalg.solve(M, b[[i, j]])
        if np.all(A @ v <= b + 1e-9):
            val = float(np.asarray(objective) @ v)
            if val > best:
                best, arg = val, v
    return best, arg


class TestSolveLp:
    def test_simplex_vertex_optimum(self):
        # maximize x1+x2 over the standard simplex
        lp = LinearProgram.build([1.0, 1.0], [[1.0, 1.0]], [1.0], ["="],
                                 lower=[0.0, 0.0], maximize=True)
        out = solve_lp(lp)
        assert out.status == "optimal"
        assert out.optimal_value == pytest.approx(1.0, abs=1e-9)

    def test_contradictory_bounds_infeasible(self):
        lp = LinearProgram.build([0.0], [[1.0]], [-1.0], ["<="], lower=[0.0])
        assert solve_lp(lp).status == "infeasible"

    def test_polygon_optimum_matches_vertex_enumeration(self):
        # maximize <(0,1), x> over {x2 <= x1, x1 <= 2, x >= 0}
        A_ub = np.array([[-1.0, 1.0], [1.0, 0.0], [-1.0, 0.0], [0.0, -1.0]])
        b_ub = np.array([0.0, 2.0, 0.0, 0.0])
        oracle, arg = brute_force_polygon_max([0.0, 1.0], A_ub, b_ub)
        assert oracle == pytest.approx(2.0)
        out = lp_minimize([0.0, 1.0], A_ub=A_ub, b_ub=b_ub, maximize=True)
        assert out.status == "optimal"
        assert out.optimal_value == pytest.approx(oracle, abs=1e-9)
        assert np.allclose(out.primal_solution, [2.0, 2.0], atol=1e-8)

    def test_unbounded(self):
        out = lp_minimize([-1.0, 0.0], A_ub=[[0.0, 1.0]], b_ub=[1.0])
        assert out.status == "unbounded"

    def test_feasibility_recheck(self):
        # optimal outcomes re-satisfy their constraints within tolerance
        rng = np.random.default_rng(0)
        for _ in range(25):
            d = rng.integers(2, 5)
            m = rng.integers(d + 1, 2 * d + 4)
            A = rng.normal(size=(m, d))
            b = A @ rng.normal(size=d) + rng.random(m) + 0.1
            c = rng.normal(size=d)
            out = lp_minimize(c, A_ub=A, b_ub=b, lower=-10 * np.ones(d),
                              upper=10 * np.ones(d))
            assert out.status == "optimal"
            assert np.max(A @ out.primal_solution - b) <= 1e-8

    def test_against_scipy_reference(self):
        scipy_opt = pytest.importorskip("scipy.optimize")
        rng = np.random.default_rng(7)
        for _ in range(30):
            d = rng.integers(2, 6)
            m = rng.integers(2, 8)
            A = rng.normal(size=(m, d))
            b = rng.random(m) + 0.2
            c = rng.normal(size=d)
            ours = lp_minimize(c, A_ub=A, b_ub=b, lower=np.zeros(d),
                               upper=np.full(d, 5.0))
            ref = scipy_opt.linprog(c, A_ub=A, b_ub=b, bounds=[(0, 5)] * d,
                                    method="highs")
            assert ours.status == "optimal" and ref.status == 0
            assert ours.optimal_value == pytest.approx(ref.fun, abs=1e-7)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            LinearProgram.build([1.0, 2.0], [[1.0]], [1.0], ["<="])


class TestNnls:
    G = np.array([[1.0, 1.0], [0.0, 1.0]])  # columns (1,0), (1,1)

    def test_target_inside_cone(self):
        lam = nnls(self.G, [2.0, 1.0])
        assert np.allclose(lam, [1.0, 1.0], atol=1e-10)
        assert np.linalg.norm(self.G @ lam - [2.0, 1.0]) < 1e-10

    def test_polar_cone_optimality_vs_grid(self):
        x = np.array([-1.0, 2.0])
        lam = nnls(self.G, x)
        fit = self.G @ lam
        assert np.allclose(fit, [0.5, 0.5], atol=1e-9)
        # oracle: 2-D grid search over nonnegative coefficients
        grid = np.linspace(0.0, 3.0, 301)
        best = min(np.linalg.norm(a * self.G[:, 0] + b * self.G[:, 1] - x)
                   for a in grid for b in grid)
        assert np.linalg.norm(fit - x) <= best + 1e-9
        # polar condition: <residual, g> <= 0 for both generators
        resid = fit - x
        assert np.all(self.G.T @ resid >= -1e-10)

    def test_target_in_polar_half(self):
        lam = nnls(np.array([[1.0], [0.0]]), [-3.0, 4.0])
        assert lam[0] == pytest.approx(0.0, abs=1e-12)

    def test_kkt_on_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            m, n = rng.integers(2, 7), rng.integers(1, 7)
            G = rng.normal(size=(m, n))
            y = rng.normal(size=m)
            lam = nnls(G, y, tol=1e-11)
            w = G.T @ (G @ lam - y)
            assert np.all(lam >= 0)
            assert np.all(w >= -1e-9)
            assert np.all(np.abs(w[lam > 1e-10]) <= 1e-8)


class TestProjectSimplex:
    def test_already_on_simplex(self):
        assert np.allclose(project_simplex([0.2, 0.8]), [0.2, 0.8])

    def test_clamped_vertex(self):
        assert np.allclose(project_simplex([2.0, 0.0]), [1.0, 0.0])

    def test_symmetric_point_vs_search_oracle(self):
        out = project_simplex([0.6, 0.6, 0.6])
        assert np.allclose(out, np.ones(3) / 3, atol=1e-12)
        # oracle: dense barycentric grid search
        target = np.array([0.6, 0.6, 0.6])
        best = np.inf
        for a in np.linspace(0, 1, 101):
            for b in np.linspace(0, 1 - a, int(101 * (1 - a)) + 1):
                p = np.array([a, b, 1 - a - b])
                best = min(best, np.linalg.norm(p - target))
        assert np.linalg.norm(out - target) <= best + 1e-9

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=8))
    @settings(max_examples=200, deadline=None)
    def test_idempotent_and_feasible(self, entries):
        p = project_simplex(np.array(entries))
        assert np.all(p >= 0)
        assert np.sum(p) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(project_simplex(p), p, atol=1e-12)


class TestMotzkinQp:
    def test_cone_projection_matches_nnls_oracle(self):
        lam, mu, point, resid, _ = qp_point_to_motzkin(
            [[0.0, 0.0]], [[1.0, 0.0], [1.0, 1.0]], [-1.0, 2.0])
        assert np.allclose(point, [0.5, 0.5], atol=1e-9)
        assert resid <= 1e-9

    def test_segment_foot_clamp(self):
        # oracle: perpendicular foot of (2,5) on the segment clamps to (1,0)
        a, b, x = np.zeros(2), np.array([1.0, 0.0]), np.array([2.0, 5.0])
        t = np.clip((x - a) @ (b - a) / ((b - a) @ (b - a)), 0, 1)
        foot = a + t * (b - a)
        _, _, point, resid, _ = qp_point_to_motzkin(
            [[0.0, 0.0], [1.0, 0.0]], [], x)
        assert np.allclose(point, foot, atol=1e-10)
        assert np.allclose(point, [1.0, 0.0], atol=1e-10)

    def test_single_point(self):
        _, _, point, _, _ = qp_point_to_motzkin([[3.0, 3.0]], [], [0.0, 0.0])
        assert np.allclose(point, [3.0, 3.0])

    def test_point_heavy_hull_membership_is_exact(self):
        # regression: a non-support point column must be able to enter the
        # active set even when the violation surfaces on support duals
        rng = np.random.default_rng(99)
        P = rng.normal(size=(9, 5))
        R = rng.normal(size=(3, 5))
        for _ in range(50):
            lam = rng.dirichlet(np.ones(9))
            mu = rng.exponential(0.5, 3)
            inside = P.T @ lam + R.T @ mu
            _, _, point, resid, _ = qp_point_to_motzkin(P, R, inside,
                                                        tol=1e-11)
            assert np.linalg.norm(point - inside) <= 1e-9
            assert resid <= 1e-9

    def test_matches_slow_projected_gradient_oracle(self):
        from feasilab import kernels as k

        def pg_oracle(M, npts, x, iters=20000):
            K = M.shape[1]
            th = np.zeros(K)
            th[0] = 1.0
            L = k.power_sqnorm(M, 100)
            for _ in range(iters):
                g = M.T @ (M @ th - x)
                raw = th - g / L
                th[:npts] = k.simplex_project_core(
                    np.ascontiguousarray(raw[:npts]))
                th[npts:] = np.maximum(raw[npts:], 0.0)
            return M @ th

        rng = np.random.default_rng(5)
        for _ in range(6):
            d = int(rng.integers(2, 6))
            npts = int(rng.integers(2, 9))
            nrays = int(rng.integers(0, 4))
            M = np.ascontiguousarray(rng.normal(size=(d, npts + nrays)))
            x = rng.normal(size=d) * 3
            th, resid, _, _ = k.motzkin_core(M, npts, x, 1e-11, 100000)
            assert resid <= 1e-9
            ours = np.linalg.norm(M @ th - x)
            ref = np.linalg.norm(pg_oracle(M, npts, x) - x)
            assert ours <= ref + 1e-9

    def test_beats_sampled_feasible_points(self):
        # 1000 deterministically sampled feasible points never do better
        rng = np.random.default_rng(42)
        P = rng.normal(size=(4, 3))
        R = rng.normal(size=(2, 3))
        x = rng.normal(size=3) * 3
        _, _, point, resid, _ = qp_point_to_motzkin(P, R, x, tol=1e-11)
        d_star = np.linalg.norm(point - x)
        for _ in range(1000):
            lam = rng.dirichlet(np.ones(4))
            mu = rng.exponential(1.0, 2)
            z = P.T @ lam + R.T @ mu
            assert d_star <= np.linalg.norm(z - x) + 1e-9
