"""Set-distance estimates: excess, Hausdorff, truncated variants, witness
tables, and diameters.

Suprema over convex sets are reported as brackets: the lower bound is
certified by an explicit witness point, the upper bound is lower + a declared
sampling slack (slack = diameter bound x mesh parameter) except where a
finite extreme-point set makes the value exact (V-polytopes), in which case
the slack is zero.  The method note on each bracket records which case
applied.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import convex_sets as cs
from .directions import direction_fan
from .errors import InputError
from .projections import ProjectionConfig, dykstra, project


@dataclass(frozen=True)
class MetricConfig:
    tol: float = 1e-10
    directions: Optional[int] = None   # candidate fan size, default 64*dim
    seed: int = 42
    mesh: float = 1.0 / 512.0          # declared slack = diam bound * mesh
    refine: bool = True                # Dykstra-refined directional candidates


DEFAULT_METRIC_CFG = MetricConfig()


@dataclass(frozen=True)
class MetricBracket:
    lower: float
    upper: float                     # may be +inf
    witness: Optional[np.ndarray]
    note: str = ""

    @property
    def unbounded(self):
        return not np.isfinite(self.upper)

    def to_obj(self):
        return {
            "lower": float(self.lower),
            "upper": "inf" if self.unbounded else float(self.upper),
            "witness": None if self.witness is None
            else [float(v) for v in np.asarray(self.witness).ravel()],
            "note": self.note,
        }


def is_bounded(desc) -> bool:
    """Conservative boundedness test (exact for every variant used here)."""
    if isinstance(desc, cs.Ball):
        return True
    if isinstance(desc, cs.Box):
        return bool(np.all(np.isfinite(desc.lower)) and np.all(np.isfinite(desc.upper)))
    if isinstance(desc, cs.Halfspace):
        return False
    if isinstance(desc, cs.Hyperplane):
        return desc.dim == 1
    if isinstance(desc, cs.MotzkinSet):
        return desc.rays.shape[0] == 0
    if isinstance(desc, (cs.Translate, cs.BallSum)):
        return is_bounded(desc.inner)
    if isinstance(desc, cs.Intersection):
        if any(is_bounded(m) for m in desc.members):
            return True
        return all(np.isfinite(cs.support(desc, u))
                   for u in np.vstack([np.eye(desc.dim), -np.eye(desc.dim)]))
    if isinstance(desc, cs.HPolyhedron):
        return all(np.isfinite(cs.support(desc, u))
                   for u in np.vstack([np.eye(desc.dim), -np.eye(desc.dim)]))
    raise InputError(f"unknown set description {type(desc).__name__}")


def _bbox_diam_bound(desc):
    """Certified diameter upper bound from coordinate widths."""
    d = desc.dim
    total = 0.0
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        w = cs.support(desc, e) + cs.support(desc, -e)
        if not np.isfinite(w):
            return np.inf
        total += w * w
    return float(np.sqrt(total))


def support_point(desc, u, cfg=DEFAULT_METRIC_CFG):
    """A point of the set nearly attaining sup <u, x> (exact for variants
    with closed-form supports, Dykstra-refined otherwise).  Requires the
    support to be finite."""
    u = np.asarray(u, dtype=float)
    if isinstance(desc, cs.Ball):
        return desc.center + desc.radius * u / np.linalg.norm(u)
    if isinstance(desc, cs.Box):
        return np.where(u > 0, desc.upper, np.where(u < 0, desc.lower,
                        np.clip(0.0, desc.lower, desc.upper)))
    if isinstance(desc, cs.MotzkinSet):
        return desc.points[int(np.argmax(desc.points @ u))].copy()
    if isinstance(desc, cs.HPolyhedron):
        from .opt_kernels import lp_minimize

        out = lp_minimize(u, A_ub=desc.normals, b_ub=desc.offsets, maximize=True)
        if out.status != "optimal":
            raise InputError("support point undefined: unbounded direction")
        return out.primal_solution
    if isinstance(desc, cs.Translate):
        return support_point(desc.inner, u, cfg) + desc.shift
    if isinstance(desc, cs.BallSum):
        return support_point(desc.inner, u, cfg) + \
            desc.radius * u / np.linalg.norm(u)
    # Intersection: push far along u and project back
    scale = 1.0 + abs(cs.support(desc, u))
    anchor = project(desc, np.zeros(desc.dim)).point
    far = anchor + (4.0 * scale + 4.0) * u / np.linalg.norm(u)
    return project(desc, far).point


def _poly2d_vertices(normals, offsets):
    """Exact vertex enumeration of a 2-D polygon from its rows (vectorized
    closed-form 2x2 solves over all row pairs)."""
    m = normals.shape[0]
    ii, jj = np.triu_indices(m, k=1)
    a1, b1 = normals[ii, 0], normals[ii, 1]
    a2, b2 = normals[jj, 0], normals[jj, 1]
    c1, c2 = offsets[ii], offsets[jj]
    det = a1 * b2 - b1 * a2
    ok = np.abs(det) >= 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        x = (c1 * b2 - b1 * c2) / det
        y = (a1 * c2 - c1 * a2) / det
    pts = np.column_stack([x[ok], y[ok]])
    if pts.size == 0:
        return np.zeros((0, 2))
    feas = np.all(pts @ normals.T <= offsets + 1e-8, axis=1)
    return pts[feas]


def candidate_points(desc, cfg=DEFAULT_METRIC_CFG):
    """(candidates, exact) for sup-of-convex-function estimation over a
    bounded set: `exact` means the candidate list contains every extreme
    point, so the max of a convex function over them is the true supremum."""
    if isinstance(desc, cs.MotzkinSet) and desc.rays.shape[0] == 0:
        return desc.points.copy(), True
    if isinstance(desc, cs.Box):
        d = desc.dim
        if d <= 12:
            grid = np.stack(np.meshgrid(
                *[np.array([desc.lower[i], desc.upper[i]]) for i in range(d)],
                indexing="ij"), axis=-1).reshape(-1, d)
            return grid, True
    if isinstance(desc, cs.HPolyhedron) and desc.dim == 2:
        verts = _poly2d_vertices(desc.normals, desc.offsets)
        if verts.shape[0]:
            return verts, True
    if isinstance(desc, cs.Translate):
        pts, exact = candidate_points(desc.inner, cfg)
        return pts + desc.shift, exact
    d = desc.dim
    count = cfg.directions if cfg.directions is not None else 64 * d
    fan = direction_fan(d, count, cfg.seed)
    pts = [support_point(desc, u, cfg) for u in fan]
    return np.array(pts), False


def excess(A, B, cfg: MetricConfig = DEFAULT_METRIC_CFG) -> MetricBracket:
    """Bracket of e(A, B) = sup_{a in A} dist(a, B); A must be bounded."""
    if not is_bounded(A):
        raise InputError("first set is unbounded; use excess_truncated")
    pcfg = ProjectionConfig(cfg.tol, 100_000)
    if isinstance(A, cs.BallSum):
        inner = excess(A.inner, B, cfg)
        if inner.lower > 10 * cfg.tol:
            w = inner.witness
            p = project(B, w, pcfg).point
            g = (w - p) / np.linalg.norm(w - p)
            return MetricBracket(inner.lower + A.radius, inner.upper + A.radius,
                                 w + A.radius * g, inner.note + "; ball-sum shift")
        return MetricBracket(inner.lower, inner.upper + A.radius, inner.witness,
                             inner.note + "; ball-sum slack")
    if isinstance(A, cs.Ball):
        r0 = project(B, A.center, pcfg)
        if r0.distance > 10 * cfg.tol:
            g = (A.center - r0.point) / r0.distance
            w = A.center + A.radius * g
            val = float(project(B, w, pcfg).distance)
            return MetricBracket(val, val, w, "exact: radial push")
    cands, exact = candidate_points(A, cfg)
    dists = np.array([project(B, p, pcfg).distance for p in cands])
    k = int(np.argmax(dists))
    lower = float(dists[k])
    if exact:
        return MetricBracket(lower, lower, cands[k], "exact: extreme points")
    slack = _bbox_diam_bound(A) * cfg.mesh
    return MetricBracket(lower, lower + slack, cands[k],
                         f"sampled; declared slack {slack:.3e}")


def _truncation_candidates(A, N, cfg):
    """Candidate extreme points of A ∩ N*ball."""
    d = A.dim
    ball = cs.Ball(np.zeros(d), float(N))
    trunc = cs.Intersection((A, ball))
    pcfg = ProjectionConfig(cfg.tol, 100_000)
    cands = []
    base = None
    if isinstance(A, cs.Translate) and isinstance(A.inner, cs.MotzkinSet):
        base = cs.MotzkinSet(A.inner.points + A.shift, A.inner.rays)
    elif isinstance(A, cs.MotzkinSet):
        base = A
    if base is not None:
        for p in base.points:
            if np.linalg.norm(p) <= N + 1e-12:
                cands.append(p.copy())
            for r in base.rays:
                # exit of the edge p + t r through the sphere of radius N
                a_, b_, c_ = r @ r, p @ r, p @ p - N * N
                disc = b_ * b_ - a_ * c_
                if disc >= 0.0:
                    t = (-b_ + np.sqrt(disc)) / a_
                    if t > 0:
                        cands.append(p + t * r)
    else:
        inner_cands, _ = candidate_points(A, cfg) if is_bounded(A) else (None, False)
        if inner_cands is not None:
            for p in inner_cands:
                if np.linalg.norm(p) <= N + 1e-12:
                    cands.append(p)
    if cfg.refine:
        count = cfg.directions if cfg.directions is not None else 64 * d
        fan = direction_fan(d, count, cfg.seed)
        for u in fan:
            z = dykstra([A, ball], (2.0 * N) * u, pcfg)
            cands.append(z.point)
    # clip stray candidates back into the truncated set
    out = []
    for p in cands:
        if np.linalg.norm(p) <= N * (1 + 1e-9):
            out.append(p)
        else:
            out.append(dykstra([A, ball], p, pcfg).point)
    return out, trunc


def excess_truncated(A, B, N, cfg: MetricConfig = DEFAULT_METRIC_CFG) -> MetricBracket:
    """Bracket of e_N(A, B) = e(A ∩ N*ball, B)."""
    if N < 1:
        raise InputError("N must be >= 1")
    if A is B:
        return MetricBracket(0.0, 0.0, None, "identical sets")
    pcfg = ProjectionConfig(cfg.tol, 100_000)
    if project(A, np.zeros(A.dim), pcfg).distance > N:
        return MetricBracket(0.0, 0.0, None, "empty truncation")
    cands, _ = _truncation_candidates(A, N, cfg)
    if not cands:
        return MetricBracket(0.0, 0.0, None, "empty truncation")
    dists = np.array([project(B, p, pcfg).distance for p in cands])
    k = int(np.argmax(dists))
    lower = float(dists[k])
    slack = 2.0 * N * cfg.mesh
    return MetricBracket(lower, lower + slack, cands[k],
                         f"truncated at {N}; declared slack {slack:.3e}")


def hausdorff(A, B, cfg: MetricConfig = DEFAULT_METRIC_CFG) -> MetricBracket:
    """Bracket of h(A, B) = max(e(A,B), e(B,A))."""
    ab = excess(A, B, cfg)
    ba = excess(B, A, cfg)
    big = ab if ab.lower >= ba.lower else ba
    return MetricBracket(big.lower, max(ab.upper, ba.upper), big.witness,
                         f"max of one-sided brackets ({big.note})")


def hausdorff_truncated(A, B, N, cfg: MetricConfig = DEFAULT_METRIC_CFG) -> MetricBracket:
    ab = excess_truncated(A, B, N, cfg)
    ba = excess_truncated(B, A, N, cfg)
    big = ab if ab.lower >= ba.lower else ba
    return MetricBracket(big.lower, max(ab.upper, ba.upper), big.witness,
                         f"max of one-sided truncated brackets ({big.note})")


@dataclass(frozen=True)
class ResidualTable:
    """Projection residuals indexed by (sequence index, witness point)."""

    indices: np.ndarray
    points: np.ndarray
    residuals: np.ndarray  # shape (len(indices), len(points))

    def to_rows(self):
        rows = []
        for i, n in enumerate(self.indices):
            for j in range(self.points.shape[0]):
                rows.append((int(n), j, float(self.residuals[i, j])))
        return rows


def kp_lower_witness(limit_points, sequence, indices,
                     cfg: MetricConfig = DEFAULT_METRIC_CFG) -> ResidualTable:
    """Residuals d(x, A_n) for limit points x: decreasing residuals witness
    every x being reachable by a sequence drawn from the A_n."""
    pts = np.atleast_2d(np.asarray(limit_points, dtype=float))
    idx = np.asarray(list(indices))
    pcfg = ProjectionConfig(cfg.tol, 100_000)
    res = np.zeros((idx.size, pts.shape[0]))
    for i, n in enumerate(idx):
        A_n = sequence(int(n)) if callable(sequence) else sequence[i]
        for j, x in enumerate(pts):
            res[i, j] = project(A_n, x, pcfg).distance
    return ResidualTable(idx, pts, res)


def kp_upper_check(points, limit, indices=None,
                   cfg: MetricConfig = DEFAULT_METRIC_CFG) -> ResidualTable:
    """Residuals d(x_n, A) for a selection x_n: cluster points of the
    selection land in A iff residuals of convergent sub-selections vanish."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    idx = np.asarray(list(indices)) if indices is not None \
        else np.arange(1, pts.shape[0] + 1)
    pcfg = ProjectionConfig(cfg.tol, 100_000)
    res = np.zeros((idx.size, 1))
    for i in range(idx.size):
        res[i, 0] = project(limit, pts[i], pcfg).distance
    return ResidualTable(idx, pts, res)


def diameter_estimate(desc, cfg: MetricConfig = DEFAULT_METRIC_CFG) -> MetricBracket:
    """Bracket of diam(set); +inf flag on ray/unbounded detection.

    The witness is the concatenated endpoint pair attaining the lower bound.
    """
    if not is_bounded(desc):
        return MetricBracket(np.inf, np.inf, None, "unbounded set")
    if isinstance(desc, cs.Ball):
        d = desc.dim
        w = np.concatenate([desc.center - desc.radius * np.eye(d)[0],
                            desc.center + desc.radius * np.eye(d)[0]])
        return MetricBracket(2 * desc.radius, 2 * desc.radius, w, "exact: ball")
    if isinstance(desc, cs.Box):
        val = float(np.linalg.norm(desc.upper - desc.lower))
        return MetricBracket(val, val,
                             np.concatenate([desc.lower, desc.upper]),
                             "exact: box corners")
    if isinstance(desc, cs.Translate):
        inner = diameter_estimate(desc.inner, cfg)
        w = None
        if inner.witness is not None:
            d = desc.dim
            w = np.concatenate([inner.witness[:d] + desc.shift,
                                inner.witness[d:] + desc.shift])
        return MetricBracket(inner.lower, inner.upper, w, inner.note)
    if isinstance(desc, cs.BallSum):
        inner = diameter_estimate(desc.inner, cfg)
        return MetricBracket(inner.lower + 2 * desc.radius,
                             inner.upper + 2 * desc.radius,
                             None, inner.note + "; ball-sum shift")
    cands, exact = candidate_points(desc, cfg)
    n = cands.shape[0]
    best = 0.0
    pair = (0, 0)
    for i in range(n):
        dd = np.linalg.norm(cands[i + 1:] - cands[i], axis=1) if i + 1 < n else None
        if dd is not None and dd.size:
            j = int(np.argmax(dd))
            if dd[j] > best:
                best = float(dd[j])
                pair = (i, i + 1 + j)
    witness = np.concatenate([cands[pair[0]], cands[pair[1]]])
    if exact:
        return MetricBracket(best, best, witness, "exact: extreme points")
    bbox = _bbox_diam_bound(desc)
    upper = min(bbox, best + bbox * cfg.mesh)
    return MetricBracket(best, upper, witness,
                         f"sampled; upper = min(bbox bound, lower + slack)")
