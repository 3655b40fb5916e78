import json

import numpy as np
import pytest

from feasilab import convex_sets as cs
from feasilab.errors import InputError, ParseError, ValidationError
from feasilab.families import example_cone_hyperplane

v = cs.validate


def unit_ball(d=2):
    return v(cs.Ball(np.zeros(d), 1.0))


class TestValidate:
    def test_halfspace_normalization(self):
        h = v(cs.Halfspace(np.array([2.0, 0.0]), 4.0))
        assert np.allclose(h.normal, [1.0, 0.0])
        assert h.offset == pytest.approx(2.0)

    def test_inverted_box_rejected(self):
        with pytest.raises(ValidationError) as e:
            v(cs.Box(np.array([0.0, 0.0]), np.array([-1.0, 1.0])))
        assert e.value.field == "upper"

    def test_motzkin_accepted(self):
        m = v(cs.MotzkinSet(np.array([[0.0, 0.0]]),
                            np.array([[1.0, 0.0], [1.0, 1.0]])))
        assert m.dim == 2

    def test_zero_normal_rejected(self):
        with pytest.raises(ValidationError):
            v(cs.Halfspace(np.zeros(2), 1.0))

    def test_negative_radius_rejected(self):
        with pytest.raises(ValidationError):
            v(cs.Ball(np.zeros(2), -0.5))

    def test_empty_polyhedron_rejected(self):
        with pytest.raises(ValidationError):
            v(cs.HPolyhedron(np.array([[1.0, 0.0], [-1.0, 0.0]]),
                             np.array([-1.0, 0.0])))

    def test_dimension_mismatch(self):
        with pytest.raises((ValidationError, InputError)):
            v(cs.Translate(unit_ball(2), np.array([1.0, 0.0, 0.0])))


class TestContains:
    def test_ball_boundary(self):
        assert cs.contains(unit_ball(), np.array([0.6, 0.8]), 1e-9)

    def test_halfspace_outside(self):
        h = v(cs.Halfspace(np.array([1.0, 0.0]), 0.0))
        assert not cs.contains(h, np.array([1e-3, 0.0]), 1e-9)

    def test_truncated_cone_listed_point(self):
        fam = example_cone_hyperplane(4, 8)
        x = 0.25 * np.eye(8)[0]
        assert cs.contains(fam.A_n, x, 1e-9)

    def test_projection_lands_inside_all_variants(self):
        rng = np.random.default_rng(3)
        from feasilab.projections import project

        variants = _variant_zoo()
        for s in variants:
            for _ in range(100):
                x = rng.normal(size=s.dim) * 3
                p = project(s, x).point
                assert cs.contains(s, p, 1e-8), type(s).__name__


def _variant_zoo():
    return [
        v(cs.Halfspace(np.array([1.0, 2.0]), 1.0)),
        v(cs.Hyperplane(np.array([0.0, 1.0]), 0.5)),
        unit_ball(),
        v(cs.Box(np.array([0.0, -1.0]), np.array([1.0, 1.0]))),
        v(cs.HPolyhedron(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]),
                         np.array([1.0, 1.0, 1.0]))),
        v(cs.MotzkinSet(np.array([[0.0, 0.0], [1.0, 0.5]]),
                        np.array([[0.0, 1.0]]))),
        v(cs.Translate(unit_ball(), np.array([2.0, -1.0]))),
        v(cs.Intersection((unit_ball(),
                           cs.Halfspace(np.array([1.0, 0.0]), 0.5)))),
        v(cs.BallSum(cs.Box(np.zeros(2), np.ones(2)), 0.25)),
    ]


class TestSupport:
    def test_ball(self):
        assert cs.support(unit_ball(), np.array([3.0, 4.0])) == pytest.approx(5.0)

    def test_motzkin_finite_direction(self):
        m = v(cs.MotzkinSet(np.array([[0.0, 0.0], [1.0, 2.0]]),
                            np.array([[1.0, 0.0]])))
        assert cs.support(m, np.array([0.0, 1.0])) == pytest.approx(2.0)

    def test_motzkin_ray_aligned(self):
        m = v(cs.MotzkinSet(np.array([[0.0, 0.0], [1.0, 2.0]]),
                            np.array([[1.0, 0.0]])))
        assert cs.support(m, np.array([1.0, 0.0])) == np.inf

    def test_motzkin_finite_iff_rays_nonpositive(self):
        rng = np.random.default_rng(5)
        m = v(cs.MotzkinSet(rng.normal(size=(3, 3)), rng.normal(size=(2, 3))))
        for _ in range(50):
            u = rng.normal(size=3)
            finite = np.isfinite(cs.support(m, u))
            assert finite == bool(np.all(m.rays @ u <= 1e-10 * np.linalg.norm(u)
                                         * np.linalg.norm(m.rays, axis=1)))

    def test_sublinear_on_samples(self):
        rng = np.random.default_rng(8)
        for s in _variant_zoo():
            for _ in range(20):
                u1, u2 = rng.normal(size=s.dim), rng.normal(size=s.dim)
                s1, s2 = cs.support(s, u1), cs.support(s, u2)
                s12 = cs.support(s, u1 + u2) if np.linalg.norm(u1 + u2) > 1e-9 \
                    else -np.inf
                if np.isfinite(s1) and np.isfinite(s2) and np.isfinite(s12):
                    assert s12 <= s1 + s2 + 1e-9

    def test_zero_direction_rejected(self):
        with pytest.raises(InputError):
            cs.support(unit_ball(), np.zeros(2))


class TestTranslateAndEnlarge:
    def test_ball_translate_simplifies(self):
        t = cs.translate(unit_ball(), np.array([2.0, 0.0]))
        assert isinstance(t, cs.Ball)
        assert np.allclose(t.center, [2.0, 0.0])

    def test_translate_membership_shift(self):
        rng = np.random.default_rng(13)
        for s in _variant_zoo():
            shift = rng.normal(size=s.dim)
            t = cs.translate(s, shift)
            for _ in range(20):
                x = rng.normal(size=s.dim) * 2
                assert cs.contains(t, x + shift, 1e-8) == cs.contains(s, x, 1e-8)

    def test_zero_enlargement_identity(self):
        box = v(cs.Box(np.zeros(2), np.ones(2)))
        assert cs.minkowski_ball(box, 0.0) is box

    def test_enlargement_distance_shift(self):
        from feasilab.projections import project

        box = v(cs.Box(np.zeros(2), np.ones(2)))
        fat = cs.minkowski_ball(box, 0.25)
        rng = np.random.default_rng(17)
        for _ in range(30):
            x = rng.normal(size=2) * 3
            d0 = project(box, x).distance
            d1 = project(fat, x).distance
            assert d1 == pytest.approx(max(0.0, d0 - 0.25), abs=1e-9)

    def test_negative_radius_rejected(self):
        with pytest.raises(InputError):
            cs.minkowski_ball(unit_ball(), -0.1)


class TestJsonRoundTrip:
    def test_examples_from_schema(self):
        ball = cs.set_from_obj({"type": "ball", "center": [0, 0], "radius": 1})
        assert isinstance(ball, cs.Ball)
        mot = cs.set_from_obj({"type": "motzkin", "points": [[0, 0]],
                               "rays": [[1, 0], [1, 1]]})
        assert isinstance(mot, cs.MotzkinSet)
        with pytest.raises(ParseError) as e:
            cs.set_from_obj({"type": "box", "lower": [0, 0], "upper": [-1, 1]})
        assert "/upper" in str(e.value)

    def test_decimal_strings_accepted(self):
        ball = cs.set_from_obj({"type": "ball", "center": ["0.125", "2"],
                                "radius": "1e-3"})
        assert ball.center[0] == 0.125 and ball.radius == 1e-3

    def test_bit_exact_round_trip(self):
        rng = np.random.default_rng(23)
        for s in _variant_zoo():
            obj = cs.set_to_obj(s)
            back = cs.set_from_obj(json.loads(json.dumps(obj)))
            assert json.dumps(cs.set_to_obj(back), sort_keys=True) == \
                json.dumps(obj, sort_keys=True)
        # awkward exact values survive
        ball = v(cs.Ball(np.array([1 / 3, np.pi]), np.e))
        back = cs.set_from_obj(json.loads(json.dumps(cs.set_to_obj(ball))))
        assert back.center[1] == ball.center[1] and back.radius == ball.radius

    def test_unknown_tag(self):
        with pytest.raises(ParseError) as e:
            cs.set_from_obj({"type": "banana"})
        assert "/type" in str(e.value)
