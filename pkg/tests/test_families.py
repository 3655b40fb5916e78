import json

import numpy as np
import pytest

from feasilab import convex_sets as cs
from feasilab.errors import InputError
from feasilab.families import (example_cone_hyperplane, example_hulls,
                               example_nonconvex, example_two_cones,
                               family_from_obj)
from feasilab.projections import project


class TestNonconvexFamily:
    def test_expected_records(self):
        fam = example_nonconvex(2)
        assert fam.expected["distance"] == pytest.approx(0.5)
        assert np.allclose(fam.expected["pair_a"], [-0.25, 32.0])
        assert np.allclose(fam.expected["pair_b"], [0.25, 32.0])
        assert fam.metadata["provenance"]["distance"] == "closed_form"

    def test_limit_intersection_point(self):
        fam = example_nonconvex(2)
        pt = fam.expected["limit_intersection_point"]
        assert cs.contains(fam.limit_A.pieces[0], pt, 1e-9)
        assert cs.contains(fam.limit_B.pieces[0], pt, 1e-9)

    def test_tangent_cuts_are_valid(self):
        # every cut halfplane contains the curved region: check 1000 points
        # on the curve x2 = 2/x1^2 (convex on x1 < 0, curvature 12/x1^4 > 0)
        fam = example_nonconvex(3)
        cap = fam.A_n.pieces[1]
        xs = np.linspace(-1.0, -1.0 / 6.0, 1000)
        curve = np.column_stack([xs, 2.0 / xs ** 2])
        vals = curve @ cap.normals.T - cap.offsets
        box_rows = np.abs(cap.normals[:, 1]) < 1e-12
        cut_rows = ~box_rows & (cap.normals[:, 1] < 0)
        assert np.all(vals[:, cut_rows] <= 1e-9)

    def test_cap_corner_is_cut_exact(self):
        fam = example_nonconvex(4)
        corner = np.array([-1.0 / 8.0, 128.0])
        assert cs.contains(fam.A_n.pieces[1], corner, 1e-9)
        # the corner support: x1 cannot exceed -1/(2n) inside the cap piece
        assert cs.support(fam.A_n.pieces[1], np.array([1.0, 0.0])) == \
            pytest.approx(-1.0 / 8.0, abs=1e-12)

    def test_pair_points_live_in_pieces(self):
        for n in (2, 8):
            fam = example_nonconvex(n)
            assert cs.contains(fam.A_n.pieces[1], fam.expected["pair_a"], 1e-9)
            assert cs.contains(fam.B_n.pieces[1], fam.expected["pair_b"], 1e-9)

    def test_n_below_two_rejected(self):
        with pytest.raises(InputError):
            example_nonconvex(1)

    def test_json_round_trip(self):
        fam = example_nonconvex(2)
        back = family_from_obj(json.loads(fam.to_json()))
        assert back.to_json() == fam.to_json()


class TestHullFamily:
    def test_limits_match_formulas(self):
        fam = example_hulls(2)
        C, D = fam.limit_A, fam.limit_B
        assert cs.contains(C, np.array([-0.5, 0.5]), 1e-9)
        assert not cs.contains(C, np.array([-0.5, 0.4]), 1e-9)
        assert cs.contains(D, np.array([0.5, 0.5]), 1e-9)
        # common ray: x1 = 0, x2 >= 1
        for t in (1.0, 5.0, 50.0):
            assert cs.contains(C, np.array([0.0, t]), 1e-9)
            assert cs.contains(D, np.array([0.0, t]), 1e-9)
        assert not cs.contains(C, np.array([0.0, 0.5]), 1e-9)

    def test_hull_contains_both_pieces(self):
        base = example_nonconvex(2)
        hull = example_hulls(2)
        rng = np.random.default_rng(9)
        for piece in base.A_n.pieces:
            for _ in range(40):
                x = rng.normal(size=2) * np.array([0.5, 40.0])
                p = project(piece, x).point
                assert cs.contains(hull.A_n, p, 1e-7)

    def test_hull_vertices_bounded(self):
        fam = example_hulls(4)
        assert fam.A_n.rays.shape[0] == 0
        assert np.max(fam.A_n.points[:, 1]) == pytest.approx(128.0)


class TestConeHyperplaneFamily:
    def test_listed_point_membership(self):
        fam = example_cone_hyperplane(4, 8)
        far = np.log(4) * np.eye(8)[3] + 0.25 * np.eye(8)[0]
        assert cs.contains(fam.A_n, far, 1e-9)

    def test_pair_norm_formula(self):
        for n, K in ((2, 8), (8, 16)):
            fam = example_cone_hyperplane(n, K)
            assert np.linalg.norm(fam.expected["pair_a"]) == pytest.approx(
                fam.expected["pair_a_norm"], abs=1e-12)
            assert fam.expected["pair_a_norm"] == pytest.approx(
                np.sqrt(np.log(n) ** 2 + 1.0 / n ** 2), abs=1e-12)

    def test_limit_intersection_origin_only(self):
        fam = example_cone_hyperplane(3, 6)
        assert cs.contains(fam.limit_A, np.zeros(6), 1e-9)
        assert cs.contains(fam.limit_B, np.zeros(6), 1e-9)
        # limit cone sits strictly on the positive side elsewhere
        rng = np.random.default_rng(4)
        for _ in range(40):
            mu = rng.exponential(1.0, 6)
            z = fam.limit_A.rays.T @ mu
            if np.linalg.norm(z) > 1e-6:
                assert z[0] > 0

    def test_range_validation(self):
        with pytest.raises(InputError):
            example_cone_hyperplane(9, 8)
        with pytest.raises(InputError):
            example_cone_hyperplane(2, 200)


class TestTwoConesFamily:
    def test_segments_inside_both_limits(self):
        fam = example_two_cones(4, 8)
        for k in range(1, 9):
            e = np.zeros(16)
            e[2 * k - 2] = 1.0 / k
            for pt in (e, -e):
                assert cs.contains(fam.limit_A, pt, 1e-9)
                assert cs.contains(fam.limit_B, pt, 1e-9)

    def test_vertical_segments_inside(self):
        fam = example_two_cones(4, 8)
        for k in (1, 3, 8):
            e = np.zeros(16)
            e[2 * k - 1] = 1.0
            assert cs.contains(fam.limit_A, e, 1e-9)
            assert cs.contains(fam.limit_B, e, 1e-9)

    def test_shift_sign_membership_records(self):
        # the claimed common point n e_{2n}: false under literal shifts,
        # true only up to height 1 + n/ln(n) under opposite shifts
        n, N = 4, 8
        lit = example_two_cones(n, N, shift_sign="literal")
        opp = example_two_cones(n, N, shift_sign="opposite")
        pt = np.zeros(16)
        pt[2 * n - 1] = n
        in_lit = (cs.contains(lit.A_n, pt, 1e-8)
                  and cs.contains(lit.B_n, pt, 1e-8))
        assert not in_lit
        height = opp.expected["block_common_height"]
        assert height == pytest.approx(1 + n / np.log(n))
        capped = np.zeros(16)
        capped[2 * n - 1] = height - 1e-6
        assert cs.contains(opp.A_n, capped, 1e-7)
        assert cs.contains(opp.B_n, capped, 1e-7)
        over = np.zeros(16)
        over[2 * n - 1] = height + 1e-3
        assert not (cs.contains(opp.A_n, over, 1e-8)
                    and cs.contains(opp.B_n, over, 1e-8))

    def test_recession_cones_intersect_trivially(self):
        from feasilab.variational_geometry import (cones_intersection_trivial,
                                                   recession_cone)

        fam = example_two_cones(3, 6)
        assert cones_intersection_trivial(recession_cone(fam.limit_A),
                                          recession_cone(fam.limit_B))

    def test_hull_representation_absorbs_piece_combinations(self):
        # the single generator-form set must contain every sampled convex
        # combination of per-block cone points (hull-of-union cross-check)
        from feasilab.families import block_cones, _embed

        N = 6
        fam = example_two_cones(3, N)
        rng = np.random.default_rng(99)
        for _ in range(200):
            lam = rng.dirichlet(np.ones(N))
            x = np.zeros(2 * N)
            for k in range(1, N + 1):
                apex, rays, _, _ = block_cones(k)
                mu = rng.exponential(1.0, 2) * (rng.random(2) < 0.7)
                pt2 = apex + rays.T @ mu
                x += lam[k - 1] * _embed(pt2, k, N)
            assert cs.contains(fam.limit_A, x, 1e-8)

    def test_json_round_trip(self):
        fam = example_two_cones(3, 6)
        back = family_from_obj(json.loads(fam.to_json()))
        assert back.to_json() == fam.to_json()

    def test_range_validation(self):
        with pytest.raises(InputError):
            example_two_cones(2, 8)
        with pytest.raises(InputError):
            example_two_cones(4, 40)
