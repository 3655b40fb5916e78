"""Iteration caps, failure propagation, and diagnostic surfaces."""

import json

import numpy as np
import pytest

from feasilab import convex_sets as cs
from feasilab.cli import main
from feasilab.distance_solver import SolveConfig, min_distance_pair, \
    piecewise_min_distance
from feasilab.errors import NumericalFailureError
from feasilab.opt_kernels import LinearProgram, nnls, qp_point_to_motzkin, \
    solve_lp

v = cs.validate


class TestIterationCaps:
    def test_lp_cap_carries_best_point(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(12, 8))
        b = A @ rng.normal(size=8) + 1.0
        lp = LinearProgram.build(rng.normal(size=8), A, b, ["<="] * 12,
                                 lower=-5 * np.ones(8), upper=5 * np.ones(8))
        with pytest.raises(NumericalFailureError) as e:
            solve_lp(lp, max_iter=1)
        assert e.value.best is not None
        assert e.value.best.shape == (8,)

    def test_nnls_cap_carries_best_iterate(self):
        rng = np.random.default_rng(1)
        G = rng.normal(size=(10, 6))
        y = rng.normal(size=10)
        with pytest.raises(NumericalFailureError) as e:
            nnls(G, y, max_iter=1)
        assert e.value.best is not None

    def test_qp_cap_carries_best_point(self):
        P = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
        with pytest.raises(NumericalFailureError) as e:
            qp_point_to_motzkin(P, [], [0.55, 2.0], tol=1e-14, max_iter=1)
        assert e.value.best is not None
        assert e.value.residual > 0

    def test_solver_cap_reached_status(self):
        A = v(cs.Ball(np.zeros(2), 1.0))
        B = v(cs.Ball(np.array([9.0, 0.0]), 1.0))
        rep = min_distance_pair(A, B, SolveConfig(max_iter=1))
        assert rep.status == "cap_reached"
        assert rep.trace.size >= 1

    def test_piecewise_partial_marking(self):
        ball_far = v(cs.PiecewiseSet((cs.Ball(np.zeros(2), 1.0),)))
        other = v(cs.PiecewiseSet((cs.Ball(np.array([9.0, 0.0]), 1.0),)))
        rep = piecewise_min_distance(ball_far, other, SolveConfig(max_iter=1))
        assert rep.partial
        assert rep.failed_pairs == ((0, 0),)


class TestCliSurfaces:
    def test_metrics_aw_grid(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        a.write_text('{"type":"motzkin","points":[[0.5,0],[0,0.5]],'
                     '"rays":[[1,0]]}')
        b = tmp_path / "b.json"
        b.write_text('{"type":"motzkin","points":[[0,0]],"rays":[[1,0]]}')
        code = main(["metrics", "aw", "--a", str(a), "--b", str(b),
                     "--N-grid", "1,2,4", "--directions", "8",
                     "--format", "csv"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "metric,N,lower,upper,witness"
        assert len(lines) == 4
        lowers = [float(l.split(",")[2]) for l in lines[1:]]
        assert all(x >= 0 for x in lowers)

    def test_analyze_bounded_min(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        a.write_text('{"type":"ball","center":[0,0],"radius":1}')
        b = tmp_path / "b.json"
        b.write_text('{"type":"ball","center":[4,0],"radius":1}')
        code = main(["analyze", "bounded-min", "--a", str(a), "--b", str(b)])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["minimal_set_bounded"]

    def test_analyze_slice_and_expose(self, tmp_path, capsys):
        s = tmp_path / "s.json"
        s.write_text('{"type":"ball","center":[0,0],"radius":1}')
        code = main(["analyze", "slice", "--set", str(s), "--f", "1,0",
                     "--alpha", "0.02"])
        assert code == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["diameter"]["lower"] == pytest.approx(
            2 * np.sqrt(2 * 0.02 - 0.02 ** 2), rel=1e-3)
        code = main(["analyze", "expose", "--set", str(s), "--f", "1,0",
                     "--point", "1,0", "--alpha-grid", "0.1,0.05,0.02"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["exposes"]

    def test_analyze_lur(self, tmp_path, capsys):
        s = tmp_path / "s.json"
        s.write_text('{"type":"ball","center":[0,0],"radius":1}')
        code = main(["analyze", "lur", "--set", str(s), "--point", "1,0",
                     "--eps-grid", "1.0"])
        assert code == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["delta"][0] == pytest.approx(1 - np.sqrt(0.75), rel=0.05)

    def test_example_hulls_and_two_cones(self, capsys):
        assert main(["example", "hulls", "--n-range", "2..3"]) == 0
        capsys.readouterr()
        assert main(["example", "two-cones", "--n-range", "3..4",
                     "--truncation", "8", "--shift-sign", "literal"]) == 0
        capsys.readouterr()

    def test_check_small_suites(self, capsys):
        assert main(["check", "fact2", "--trials", "3"]) == 0
        capsys.readouterr()
        assert main(["check", "lemma-recession", "--trials", "5"]) == 0
        capsys.readouterr()
        assert main(["check", "hull-lemmas", "--samples", "300",
                     "--truncation", "4"]) == 0
        capsys.readouterr()
        assert main(["check", "thm-stability", "--trials", "2",
                     "--steps", "10"]) == 1  # needs >= 95 converged of 100
        capsys.readouterr()
        assert main(["check", "prop-bounded"]) == 0
        capsys.readouterr()
