"""Closed convex set descriptions.

Each variant is an immutable dataclass; :func:`validate` checks invariants and
returns a normalized copy (unit normals with rescaled offsets, reconciled
dimensions).  Every description denotes a nonempty closed convex set; unions
of convex pieces are modeled separately by :class:`PiecewiseSet`.

Membership and support queries are analytic wherever a closed form exists and
fall back to the projection machinery otherwise.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InputError, ParseError, ValidationError
from .opt_kernels import as_vector, lp_minimize

_RAY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Halfspace:
    """{x : <normal, x> <= offset}; normal is unit length after validation."""

    normal: np.ndarray
    offset: float

    @property
    def dim(self):
        return self.normal.size


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """{x : <normal, x> = offset}."""

    normal: np.ndarray
    offset: float

    @property
    def dim(self):
        return self.normal.size


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    @property
    def dim(self):
        return self.center.size


@dataclass(frozen=True, eq=False)
class Box:
    """Axis box; bound entries may be +-inf."""

    lower: np.ndarray
    upper: np.ndarray

    @property
    def dim(self):
        return self.lower.size


@dataclass(frozen=True, eq=False)
class HPolyhedron:
    """Intersection of halfspace rows {normals @ x <= offsets}."""

    normals: np.ndarray
    offsets: np.ndarray

    @property
    def dim(self):
        return self.normals.shape[1]


@dataclass(frozen=True, eq=False)
class MotzkinSet:
    """conv(points) + cone(rays); at least one point so the set is nonempty."""

    points: np.ndarray
    rays: np.ndarray

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class Translate:
    inner: "SetDescription"
    shift: np.ndarray

    @property
    def dim(self):
        return self.shift.size


@dataclass(frozen=True, eq=False)
class Intersection:
    members: tuple

    @property
    def dim(self):
        return self.members[0].dim


@dataclass(frozen=True, eq=False)
class BallSum:
    """inner + radius * (Euclidean unit ball)."""

    inner: "SetDescription"
    radius: float

    @property
    def dim(self):
        return self.inner.dim


SetDescription = Union[Halfspace, Hyperplane, Ball, Box, HPolyhedron,
                       MotzkinSet, Translate, Intersection, BallSum]


@dataclass(frozen=True, eq=False)
class PiecewiseSet:
    """Finite union of convex pieces (not itself convex)."""

    pieces: tuple

    @property
    def dim(self):
        return self.pieces[0].dim


def validate(desc):
    """Check invariants and return a normalized copy.

    Normals come back unit length with offsets rescaled; dimensions are
    reconciled recursively.  Raises :class:`ValidationError` naming the
    offending field.
    """
    if isinstance(desc, Halfspace) or isinstance(desc, Hyperplane):
        n = as_vector(desc.normal, "normal")
        norm = float(np.linalg.norm(n))
        if norm <= _RAY_TOL:
            raise ValidationError("zero normal vector", field="normal")
        cls = type(desc)
        if abs(norm - 1.0) <= 1e-12:  # keep already-unit rows bit-stable
            return cls(n, float(desc.offset))
        return cls(n / norm, float(desc.offset) / norm)
    if isinstance(desc, Ball):
        c = as_vector(desc.center, "center")
        if desc.radius < 0:
            raise ValidationError("radius must be >= 0", field="radius")
        return Ball(c, float(desc.radius))
    if isinstance(desc, Box):
        lo = np.asarray(desc.lower, dtype=float)
        hi = np.asarray(desc.upper, dtype=float)
        if lo.ndim != 1 or lo.size < 1 or hi.shape != lo.shape:
            raise ValidationError("lower/upper must be 1-D of equal length",
                                  field="lower")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValidationError("NaN bound", field="lower")
        if np.any(lo > hi) or np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ValidationError("empty box: lower > upper", field="upper")
        return Box(lo, hi)
    if isinstance(desc, HPolyhedron):
        A = np.atleast_2d(np.asarray(desc.normals, dtype=float))
        b = np.asarray(desc.offsets, dtype=float).reshape(-1)
        if A.shape[0] != b.size:
            raise ValidationError("row count != offsets length", field="offsets")
        if A.shape[0] < 1:
            raise ValidationError("need at least one row", field="normals")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms <= _RAY_TOL):
            raise ValidationError("zero normal row", field="normals")
        scale = np.where(np.abs(norms - 1.0) <= 1e-12, 1.0, norms)
        A = A / scale[:, None]
        b = b / scale
        out = lp_minimize(np.zeros(A.shape[1]), A_ub=A, b_ub=b)
        if out.status == "infeasible":
            raise ValidationError("empty polyhedron", field="offsets")
        return HPolyhedron(A, b)
    if isinstance(desc, MotzkinSet):
        P = np.atleast_2d(np.asarray(desc.points, dtype=float))
        if P.shape[0] < 1:
            raise ValidationError("need at least one point", field="points")
        if not np.all(np.isfinite(P)):
            raise ValidationError("non-finite point", field="points")
        R = np.asarray(desc.rays, dtype=float)
        R = R.reshape(-1, P.shape[1]) if R.size else np.zeros((0, P.shape[1]))
        if R.size and not np.all(np.isfinite(R)):
            raise ValidationError("non-finite ray", field="rays")
        if R.size and np.any(np.linalg.norm(R, axis=1) <= _RAY_TOL):
            raise ValidationError("zero ray", field="rays")
        if R.size and R.shape[1] != P.shape[1]:
            raise ValidationError("ray dimension != point dimension", field="rays")
        return MotzkinSet(P, R)
    if isinstance(desc, Translate):
        inner = validate(desc.inner)
        v = as_vector(desc.shift, "shift")
        if v.size != inner.dim:
            raise ValidationError("shift dimension != inner dimension",
                                  field="shift")
        return Translate(inner, v)
    if isinstance(desc, Intersection):
        if len(desc.members) < 1:
            raise ValidationError("need at least one member", field="members")
        members = tuple(validate(m) for m in desc.members)
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise ValidationError("members span different dimensions",
                                  field="members")
        return Intersection(members)
    if isinstance(desc, BallSum):
        if desc.radius < 0:
            raise ValidationError("radius must be >= 0", field="radius")
        return BallSum(validate(desc.inner), float(desc.radius))
    if isinstance(desc, PiecewiseSet):
        if len(desc.pieces) < 1:
            raise ValidationError("need at least one piece", field="pieces")
        pieces = tuple(validate(p) for p in desc.pieces)
        dims = {p.dim for p in pieces}
        if len(dims) != 1:
            raise ValidationError("pieces span different dimensions",
                                  field="pieces")
        return PiecewiseSet(pieces)
    raise InputError(f"unknown set description {type(desc).__name__}")


def exact_distance(desc, x):
    """dist(x, set) where a closed form exists, else None."""
    if isinstance(desc, Halfspace):
        return max(0.0, float(desc.normal @ x - desc.offset))
    if isinstance(desc, Hyperplane):
        return abs(float(desc.normal @ x - desc.offset))
    if isinstance(desc, Ball):
        return max(0.0, float(np.linalg.norm(x - desc.center) - desc.radius))
    if isinstance(desc, Box):
        return float(np.linalg.norm(x - np.clip(x, desc.lower, desc.upper)))
    if isinstance(desc, Translate):
        return exact_distance(desc.inner, x - desc.shift)
    if isinstance(desc, BallSum):
        d = exact_distance(desc.inner, x)
        if d is None:
            return None
        return max(0.0, d - desc.radius)
    return None


def contains(desc, x, tol: float = 1e-9) -> bool:
    """True iff dist(x, set) <= tol."""
    x = np.asarray(x, dtype=float)
    if x.size != desc.dim:
        raise InputError("point dimension != set dimension")
    d = exact_distance(desc, x)
    if d is None:
        from .projections import project  # cycle: projections builds on sets

        d = project(desc, x).distance
    return d <= tol


def support(desc, u) -> float:
    """sup over the set of <u, x>; +inf when the set is unbounded along u.

    Exact for primitive variants and Motzkin sets, LP-based for
    H-polyhedra; for an Intersection the returned value is an upper bound
    (min over members), not claimed exact.
    """
    u = np.asarray(u, dtype=float)
    nu = float(np.linalg.norm(u))
    if nu <= _RAY_TOL:
        raise InputError("zero direction")
    if u.size != desc.dim:
        raise InputError("direction dimension != set dimension")
    if isinstance(desc, Ball):
        return float(desc.center @ u) + desc.radius * nu
    if isinstance(desc, Box):
        hi = np.where(u > 0, desc.upper, desc.lower)
        with np.errstate(invalid="ignore"):
            terms = hi * u
        terms[u == 0.0] = 0.0
        if np.any(np.isnan(terms)) or np.any(terms == np.inf):
            return np.inf
        return float(np.sum(terms))
    if isinstance(desc, Halfspace):
        t = float(desc.normal @ u)
        if t < 0 or np.linalg.norm(u - t * desc.normal) > 1e-10 * nu:
            return np.inf
        return t * desc.offset
    if isinstance(desc, Hyperplane):
        t = float(desc.normal @ u)
        if np.linalg.norm(u - t * desc.normal) > 1e-10 * nu:
            return np.inf
        return t * desc.offset
    if isinstance(desc, MotzkinSet):
        for r in desc.rays:
            if r @ u > _RAY_TOL * nu * np.linalg.norm(r):
                return np.inf
        return float(np.max(desc.points @ u))
    if isinstance(desc, HPolyhedron):
        out = lp_minimize(u, A_ub=desc.normals, b_ub=desc.offsets, maximize=True)
        if out.status == "unbounded":
            return np.inf
        return float(out.optimal_value)
    if isinstance(desc, Translate):
        s = support(desc.inner, u)
        return s + float(desc.shift @ u) if np.isfinite(s) else np.inf
    if isinstance(desc, BallSum):
        s = support(desc.inner, u)
        return s + desc.radius * nu if np.isfinite(s) else np.inf
    if isinstance(desc, Intersection):
        return min(support(m, u) for m in desc.members)
    raise InputError(f"unknown set description {type(desc).__name__}")


def support_is_exact(desc) -> bool:
    """False for Intersection, whose support is only an upper bound."""
    if isinstance(desc, Intersection):
        return False
    if isinstance(desc, (Translate, BallSum)):
        return support_is_exact(desc.inner)
    return True


def translate(desc, v):
    """Shifted copy; simplified in place of a Translate wrapper when the
    variant supports it."""
    v = as_vector(v, "shift")
    if v.size != desc.dim:
        raise InputError("shift dimension != set dimension")
    if isinstance(desc, Ball):
        return Ball(desc.center + v, desc.radius)
    if isinstance(desc, Box):
        return Box(desc.lower + v, desc.upper + v)
    if isinstance(desc, Halfspace):
        return Halfspace(desc.normal, desc.offset + float(desc.normal @ v))
    if isinstance(desc, Hyperplane):
        return Hyperplane(desc.normal, desc.offset + float(desc.normal @ v))
    if isinstance(desc, HPolyhedron):
        return HPolyhedron(desc.normals, desc.offsets + desc.normals @ v)
    if isinstance(desc, MotzkinSet):
        return MotzkinSet(desc.points + v, desc.rays)
    if isinstance(desc, Translate):
        return Translate(desc.inner, desc.shift + v)
    return Translate(desc, v)


def minkowski_ball(desc, r: float):
    """Enlargement by r times the unit ball (exact for distance queries)."""
    if r < 0:
        raise InputError("radius must be >= 0")
    if r == 0:
        return desc
    if isinstance(desc, Ball):
        return Ball(desc.center, desc.radius + r)
    return BallSum(desc, float(r))


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

_TYPE_TAGS = {
    Halfspace: "halfspace", Hyperplane: "hyperplane", Ball: "ball",
    Box: "box", HPolyhedron: "hpoly", MotzkinSet: "motzkin",
    Translate: "translate", Intersection: "intersection", BallSum: "ballsum",
    PiecewiseSet: "piecewise",
}


def _num_out(x):
    if x == np.inf:
        return "inf"
    if x == -np.inf:
        return "-inf"
    return float(x)


def set_to_obj(desc):
    """JSON-ready dict; real parameters survive a round trip bit-exactly."""
    if isinstance(desc, Halfspace) or isinstance(desc, Hyperplane):
        return {"type": _TYPE_TAGS[type(desc)],
                "normal": [float(v) for v in desc.normal],
                "offset": float(desc.offset)}
    if isinstance(desc, Ball):
        return {"type": "ball", "center": [float(v) for v in desc.center],
                "radius": float(desc.radius)}
    if isinstance(desc, Box):
        return {"type": "box", "lower": [_num_out(v) for v in desc.lower],
                "upper": [_num_out(v) for v in desc.upper]}
    if isinstance(desc, HPolyhedron):
        return {"type": "hpoly",
                "normals": [[float(v) for v in row] for row in desc.normals],
                "offsets": [float(v) for v in desc.offsets]}
    if isinstance(desc, MotzkinSet):
        return {"type": "motzkin",
                "points": [[float(v) for v in row] for row in desc.points],
                "rays": [[float(v) for v in row] for row in desc.rays]}
    if isinstance(desc, Translate):
        return {"type": "translate", "inner": set_to_obj(desc.inner),
                "shift": [float(v) for v in desc.shift]}
    if isinstance(desc, Intersection):
        return {"type": "intersection",
                "members": [set_to_obj(m) for m in desc.members]}
    if isinstance(desc, BallSum):
        return {"type": "ballsum", "inner": set_to_obj(desc.inner),
                "radius": float(desc.radius)}
    if isinstance(desc, PiecewiseSet):
        return {"type": "piecewise",
                "pieces": [set_to_obj(p) for p in desc.pieces]}
    raise InputError(f"unknown set description {type(desc).__name__}")


def _num_in(v, ptr):
    if isinstance(v, bool):
        raise ParseError("expected a number", ptr)
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return np.inf
        if s == "-inf" or s == "-infinity":
            return -np.inf
        try:
            return float(v)
        except ValueError:
            raise ParseError(f"cannot parse number {v!r}", ptr) from None
    raise ParseError("expected a number", ptr)


def _vec_in(obj, key, ptr):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", ptr)
    v = obj[key]
    if not isinstance(v, list) or not v:
        raise ParseError("expected a nonempty array", f"{ptr}/{key}")
    return np.array([_num_in(x, f"{ptr}/{key}/{i}") for i, x in enumerate(v)])


def _mat_in(obj, key, ptr, allow_empty=False):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", ptr)
    v = obj[key]
    if not isinstance(v, list) or (not v and not allow_empty):
        raise ParseError("expected a nonempty array of arrays", f"{ptr}/{key}")
    rows = [_vec_in({"row": row}, "row", f"{ptr}/{key}/{i}")
            for i, row in enumerate(v)]
    if rows and len({r.size for r in rows}) != 1:
        raise ParseError("ragged rows", f"{ptr}/{key}")
    return np.array(rows) if rows else np.zeros((0, 0))


def set_from_obj(obj, ptr=""):
    """Parse the documented schema; errors carry a JSON pointer path.

    The result is validated (see :func:`validate`)."""
    if not isinstance(obj, dict):
        raise ParseError("expected an object", ptr)
    tag = obj.get("type")
    try:
        if tag in ("halfspace", "hyperplane"):
            cls = Halfspace if tag == "halfspace" else Hyperplane
            if "offset" not in obj:
                raise ParseError("missing field 'offset'", ptr)
            raw = cls(_vec_in(obj, "normal", ptr),
                      _num_in(obj["offset"], f"{ptr}/offset"))
        elif tag == "ball":
            if "radius" not in obj:
                raise ParseError("missing field 'radius'", ptr)
            raw = Ball(_vec_in(obj, "center", ptr),
                       _num_in(obj["radius"], f"{ptr}/radius"))
        elif tag == "box":
            raw = Box(_vec_in(obj, "lower", ptr), _vec_in(obj, "upper", ptr))
        elif tag == "hpoly":
            raw = HPolyhedron(_mat_in(obj, "normals", ptr),
                              _vec_in(obj, "offsets", ptr))
        elif tag == "motzkin":
            rays = _mat_in(obj, "rays", ptr, allow_empty=True) if "rays" in obj \
                else np.zeros((0, 0))
            raw = MotzkinSet(_mat_in(obj, "points", ptr), rays)
        elif tag == "translate":
            if "inner" not in obj:
                raise ParseError("missing field 'inner'", ptr)
            raw = Translate(set_from_obj(obj["inner"], f"{ptr}/inner"),
                            _vec_in(obj, "shift", ptr))
        elif tag == "intersection":
            if "members" not in obj or not isinstance(obj["members"], list) \
                    or not obj["members"]:
                raise ParseError("missing or empty 'members'", ptr)
            raw = Intersection(tuple(
                set_from_obj(m, f"{ptr}/members/{i}")
                for i, m in enumerate(obj["members"])))
        elif tag == "ballsum":
            if "inner" not in obj or "radius" not in obj:
                raise ParseError("missing 'inner' or 'radius'", ptr)
            raw = BallSum(set_from_obj(obj["inner"], f"{ptr}/inner"),
                          _num_in(obj["radius"], f"{ptr}/radius"))
        elif tag == "piecewise":
            if "pieces" not in obj or not isinstance(obj["pieces"], list) \
                    or not obj["pieces"]:
                raise ParseError("missing or empty 'pieces'", ptr)
            raw = PiecewiseSet(tuple(
                set_from_obj(p, f"{ptr}/pieces/{i}")
                for i, p in enumerate(obj["pieces"])))
        else:
            raise ParseError(f"unknown type tag {tag!r}", f"{ptr}/type")
    except ValidationError as e:
        raise ParseError(str(e), f"{ptr}/{e.field or ''}") from None
    try:
        return validate(raw)
    except ValidationError as e:
        raise ParseError(str(e), f"{ptr}/{e.field or ''}") from None
