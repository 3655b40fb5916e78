"""Vectorized planar geometry for the per-block inclusion suites.

All routines operate on arrays of samples at once: convex-polygon gauges and
distances, two-ray cone projections, and a batched Dykstra for intersections
of enlarged cones.  Polygons are carried as ccw vertex lists with
precomputed outward edge normals.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class Polygon2D:
    """Bounded convex polygon, ccw vertices, H-form rows normals@x <= offsets."""

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray


def polygon_from_points(points) -> Polygon2D:
    from .families import _hull_2d

    hull = _hull_2d(np.asarray(points, dtype=float))
    if hull.shape[0] < 3:
        raise InputError("polygon needs at least three non-collinear points")
    edges = np.roll(hull, -1, axis=0) - hull
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    norms = np.linalg.norm(normals, axis=1)
    normals = normals / norms[:, None]
    offsets = np.einsum("ij,ij->i", normals, hull)
    return Polygon2D(hull, normals, offsets)


def polygon_gauge_batch(poly: Polygon2D, Q):
    """Gauge g(q) = min{t >= 0 : q in t*poly} for polygons containing the
    origin; rows through the origin give +inf off their feasible side."""
    Q = np.atleast_2d(Q)
    num = Q @ poly.normals.T           # (S, m)
    c = poly.offsets[None, :]
    out = np.zeros(Q.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(c > 1e-14, num / np.maximum(c, 1e-300), 0.0)
    out = np.max(ratios, axis=1)
    # zero-offset rows (origin on the boundary): infeasible side => +inf
    zero_rows = poly.offsets <= 1e-14
    if np.any(zero_rows):
        bad = np.any(num[:, zero_rows] > 1e-12, axis=1)
        out = np.where(bad, np.inf, out)
    return np.maximum(out, 0.0)


def polygon_dist_batch(poly: Polygon2D, Q, tau):
    """dist(q_s, tau_s * poly) for every sample s (tau >= 0)."""
    Q = np.atleast_2d(Q)
    tau = np.asarray(tau, dtype=float).reshape(-1)
    S = Q.shape[0]
    inside = np.all(Q @ poly.normals.T <= tau[:, None] * poly.offsets[None, :]
                    + 1e-14, axis=1)
    best = np.where(inside, 0.0, np.inf)
    V = poly.vertices
    m = V.shape[0]
    for i in range(m):
        a = V[i]
        b = V[(i + 1) % m]
        A = tau[:, None] * a[None, :]
        Bv = tau[:, None] * b[None, :]
        E = Bv - A
        denom = np.einsum("ij,ij->i", E, E)
        t = np.zeros(S)
        nz = denom > 1e-300
        t[nz] = np.einsum("ij,ij->i", Q[nz] - A[nz], E[nz]) / denom[nz]
        t = np.clip(t, 0.0, 1.0)
        P = A + t[:, None] * E
        d = np.linalg.norm(Q - P, axis=1)
        best = np.minimum(best, d)
    return best


def scaled_sum_gauge_batch(poly: Polygon2D, rho, Q, iters: int = 60):
    """Gauge of poly + rho*(unit disc): smallest tau with
    dist(q, tau*poly) <= tau*rho, by vectorized bisection."""
    Q = np.atleast_2d(Q)
    S = Q.shape[0]
    hi = np.ones(S)
    for _ in range(60):
        bad = polygon_dist_batch(poly, Q, hi) > hi * rho
        if not np.any(bad):
            break
        hi[bad] *= 2.0
    lo = np.zeros(S)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = polygon_dist_batch(poly, Q, mid) <= mid * rho
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def cone2_project_batch(apex, r1, r2, Q):
    """Projection of each row of Q onto apex + cone(r1, r2) (angle < pi,
    r1->r2 ccw)."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    u1 = r1 / np.linalg.norm(r1)
    u2 = r2 / np.linalg.norm(r2)
    Qp = np.atleast_2d(Q) - apex
    cross1 = u1[0] * Qp[:, 1] - u1[1] * Qp[:, 0]   # >= 0: left of u1
    cross2 = Qp[:, 0] * u2[1] - Qp[:, 1] * u2[0]   # >= 0: right of u2
    inside = (cross1 >= 0) & (cross2 >= 0)
    t1 = np.maximum(Qp @ u1, 0.0)
    p1 = t1[:, None] * u1
    t2 = np.maximum(Qp @ u2, 0.0)
    p2 = t2[:, None] * u2
    d1 = np.linalg.norm(Qp - p1, axis=1)
    d2 = np.linalg.norm(Qp - p2, axis=1)
    ray_pick = np.where((d1 <= d2)[:, None], p1, p2)
    out = np.where(inside[:, None], Qp, ray_pick)
    return out + apex


def enlarged_cone_project_batch(apex, r1, r2, rho, Q):
    """Projection onto (apex + cone(r1, r2)) + rho*(unit disc)."""
    base = cone2_project_batch(apex, r1, r2, Q)
    g = np.atleast_2d(Q) - base
    d = np.linalg.norm(g, axis=1)
    far = d > rho
    out = np.atleast_2d(Q).copy()
    safe = np.maximum(d, 1e-300)
    out[far] = base[far] + (rho * g[far] / safe[far, None])
    return out


def pair_dykstra_batch(projA, projB, Q, cycles: int = 400):
    """Batched Dykstra onto the intersection of two sets given their batched
    projection maps; returns (points, membership_defect)."""
    Q = np.atleast_2d(Q)
    p = Q.copy()
    ea = np.zeros_like(p)
    eb = np.zeros_like(p)
    for _ in range(cycles):
        z = p + ea
        pa = projA(z)
        ea = z - pa
        z = pa + eb
        p = projB(z)
        eb = z - p
    da = np.linalg.norm(projA(p) - p, axis=1)
    db = np.linalg.norm(projB(p) - p, axis=1)
    return p, np.maximum(da, db)
