"""Euclidean projection onto every set variant.

Closed forms cover halfspaces, hyperplanes, balls, boxes, translates and ball
sums; Motzkin sets go through the active-set QP kernel; H-polyhedra use
Dykstra over their rows; general intersections use Dykstra over members.
The ``residual`` on a result is a variational-inequality defect: for any z in
the set, <x - p, z - p> <= residual.
"""

from dataclasses import dataclass

import numpy as np

from . import convex_sets as cs
from . import kernels
from .directions import direction_fan
from .errors import InputError, NumericalFailureError
from .opt_kernels import qp_point_to_motzkin


@dataclass(frozen=True)
class ProjectionConfig:
    tol: float = 1e-10
    max_iter: int = 100_000


DEFAULT_CFG = ProjectionConfig()


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    distance: float
    iterations: int
    residual: float
    converged: bool = True
    note: str = ""


def _result(x, p, iterations=0, residual=0.0, converged=True, note=""):
    return ProjectionResult(p, float(np.linalg.norm(x - p)), int(iterations),
                            float(residual), converged, note)


def project(desc, x, cfg: ProjectionConfig = DEFAULT_CFG) -> ProjectionResult:
    """Euclidean projection of x onto the set."""
    x = np.asarray(x, dtype=float)
    if x.size != desc.dim:
        raise InputError("point dimension != set dimension")
    if isinstance(desc, cs.Halfspace):
        v = float(desc.normal @ x - desc.offset)
        p = x - max(0.0, v) * desc.normal
        return _result(x, p)
    if isinstance(desc, cs.Hyperplane):
        p = x - float(desc.normal @ x - desc.offset) * desc.normal
        return _result(x, p)
    if isinstance(desc, cs.Ball):
        g = x - desc.center
        d = float(np.linalg.norm(g))
        if d <= desc.radius:
            return _result(x, x.copy())
        return _result(x, desc.center + (desc.radius / d) * g)
    if isinstance(desc, cs.Box):
        return _result(x, np.clip(x, desc.lower, desc.upper))
    if isinstance(desc, cs.Translate):
        inner = project(desc.inner, x - desc.shift, cfg)
        return ProjectionResult(inner.point + desc.shift, inner.distance,
                                inner.iterations, inner.residual,
                                inner.converged, inner.note)
    if isinstance(desc, cs.BallSum):
        inner = project(desc.inner, x, cfg)
        if inner.distance <= desc.radius:
            return _result(x, x.copy(), inner.iterations, inner.residual,
                           inner.converged)
        g = (x - inner.point) / inner.distance
        p = inner.point + desc.radius * g
        return _result(x, p, inner.iterations, inner.residual, inner.converged)
    if isinstance(desc, cs.MotzkinSet):
        try:
            _, _, p, resid, iters = qp_point_to_motzkin(
                desc.points, desc.rays, x, tol=cfg.tol, max_iter=cfg.max_iter)
        except NumericalFailureError as e:
            return _result(x, e.best, cfg.max_iter, e.residual or np.inf,
                           converged=False, note="iteration cap")
        return _result(x, p, iters, resid)
    if isinstance(desc, cs.HPolyhedron):
        p, cycles, inc, viol = kernels.halfspace_dykstra_core(
            np.ascontiguousarray(desc.normals), np.ascontiguousarray(desc.offsets),
            np.ascontiguousarray(x), cfg.tol, cfg.max_iter)
        ok = inc <= cfg.tol and viol <= cfg.tol
        return _result(x, p, cycles, max(inc, viol), converged=ok,
                       note="" if ok else "iteration cap")
    if isinstance(desc, cs.Intersection):
        return dykstra(list(desc.members), x, cfg)
    raise InputError(f"unknown set description {type(desc).__name__}")


def dykstra(sets, x, cfg: ProjectionConfig = DEFAULT_CFG) -> ProjectionResult:
    """Dykstra's algorithm over a list of projectable sets.

    Converges to the projection of x onto the intersection (assumed
    nonempty by the caller).  Stops when the cyclic increment falls below
    tol and every membership defect is below 10*tol; a cap without
    convergence is reported as a diverging/empty-intersection diagnosis.
    """
    x = np.asarray(x, dtype=float)
    if len(sets) == 0:
        raise InputError("need at least one set")
    if len(sets) == 1:
        return project(sets[0], x, cfg)
    flat = _as_balls_and_rows(sets, x.size)
    if flat is not None:
        # the cyclic increment under-reports the residual error near
        # tangential boundaries, so drive the kernel two digits past tol
        centers, radii, An, bn = flat
        p, cycles, inc, defect = kernels.balls_rows_dykstra_core(
            centers, radii, An, bn, np.ascontiguousarray(x), 0.01 * cfg.tol,
            max(50, cfg.max_iter // max(1, len(sets))))
        ok = inc <= cfg.tol and defect <= 10 * cfg.tol
        return _result(x, p, cycles, max(inc, defect), converged=ok,
                       note="" if ok else "diverging or empty intersection")
    inner_cfg = ProjectionConfig(min(cfg.tol, 1e-11), cfg.max_iter)
    p = x.copy()
    corr = [np.zeros_like(x) for _ in sets]
    cycles = 0
    max_cycles = max(50, cfg.max_iter // max(1, len(sets)))
    inc = np.inf
    while cycles < max_cycles:
        cycles += 1
        prev = p.copy()
        for i, s in enumerate(sets):
            z = p + corr[i]
            p = project(s, z, inner_cfg).point
            corr[i] = z - p
        inc = float(np.linalg.norm(p - prev))
        if inc <= cfg.tol:
            defect = _membership_defect(sets, p, inner_cfg)
            if defect <= 10 * cfg.tol:
                return _result(x, p, cycles, max(inc, defect))
    defect = _membership_defect(sets, p, inner_cfg)
    return _result(x, p, cycles, max(inc, defect),
                   converged=defect <= 10 * cfg.tol,
                   note="" if defect <= 10 * cfg.tol
                   else "diverging or empty intersection")


def _as_balls_and_rows(sets, dim):
    """Decompose members into balls plus unit halfspace rows when every
    member is a Ball/Halfspace/HPolyhedron/Box (possibly translated); these
    composites run in one jitted Dykstra kernel."""
    centers, radii, rows, offs = [], [], [], []

    def add(s, shift):
        if isinstance(s, cs.Translate):
            return add(s.inner, shift + s.shift)
        if isinstance(s, cs.Ball):
            centers.append(s.center + shift)
            radii.append(s.radius)
            return True
        if isinstance(s, cs.Halfspace):
            rows.append(s.normal)
            offs.append(s.offset + float(s.normal @ shift))
            return True
        if isinstance(s, cs.HPolyhedron):
            for a, b in zip(s.normals, s.offsets):
                rows.append(a)
                offs.append(b + float(a @ shift))
            return True
        if isinstance(s, cs.Box):
            for i in range(s.dim):
                e = np.zeros(s.dim)
                e[i] = 1.0
                if np.isfinite(s.upper[i]):
                    rows.append(e.copy())
                    offs.append(s.upper[i] + shift[i])
                if np.isfinite(s.lower[i]):
                    rows.append(-e)
                    offs.append(-(s.lower[i] + shift[i]))
            return True
        return False

    for s in sets:
        if not add(s, np.zeros(dim)):
            return None
    centers_arr = np.array(centers) if centers else np.zeros((0, dim))
    radii_arr = np.array(radii) if radii else np.zeros(0)
    rows_arr = np.array(rows) if rows else np.zeros((0, dim))
    offs_arr = np.array(offs) if offs else np.zeros(0)
    return (np.ascontiguousarray(centers_arr), np.ascontiguousarray(radii_arr),
            np.ascontiguousarray(rows_arr), np.ascontiguousarray(offs_arr))


def _membership_defect(sets, p, cfg):
    out = 0.0
    for s in sets:
        d = cs.exact_distance(s, p)
        if d is None:
            d = project(s, p, cfg).distance
        out = max(out, d)
    return out


def probe_points(desc, count: int = 100, seed: int = 42):
    """Deterministic points inside the set, for variational-inequality
    certification and candidate generation.

    Motzkin sets use coefficient-space randomization over generators; boxes
    and polyhedra use vertex/face and projected-fan points; curved variants
    use boundary fans.
    """
    d = desc.dim
    rng = np.random.default_rng(seed)
    if isinstance(desc, cs.MotzkinSet):
        npts, nrays = desc.points.shape[0], desc.rays.shape[0]
        out = [p.copy() for p in desc.points]
        while len(out) < count:
            lam = rng.dirichlet(np.ones(npts))
            z = desc.points.T @ lam
            if nrays:
                mu = rng.exponential(1.0, nrays) * (rng.random(nrays) < 0.7)
                z = z + desc.rays.T @ mu
            out.append(z)
        return np.array(out[:count])
    if isinstance(desc, cs.Box):
        lo = np.where(np.isfinite(desc.lower), desc.lower, -1e3)
        hi = np.where(np.isfinite(desc.upper), desc.upper, 1e3)
        out = [np.where(rng.random(d) < 0.5, lo, hi) for _ in range(count // 2)]
        out += [lo + rng.random(d) * (hi - lo) for _ in range(count - len(out))]
        return np.array(out)
    if isinstance(desc, cs.Ball):
        fan = direction_fan(d, max(2, count - 1), seed)
        pts = desc.center + desc.radius * fan[: count - 1]
        return np.vstack([desc.center, pts])
    if isinstance(desc, cs.Halfspace) or isinstance(desc, cs.Hyperplane):
        foot = desc.offset * desc.normal
        fan = direction_fan(d, count, seed)
        tang = fan - np.outer(fan @ desc.normal, desc.normal)
        pts = foot + (1.0 + rng.random((count, 1))) * tang
        if isinstance(desc, cs.Halfspace):
            pts = pts - np.outer(rng.random(count), desc.normal)
        return pts
    if isinstance(desc, cs.Translate):
        return probe_points(desc.inner, count, seed) + desc.shift
    if isinstance(desc, cs.BallSum):
        base = probe_points(desc.inner, count, seed)
        fan = direction_fan(d, count, seed + 1)
        return base + desc.radius * fan[:count] * rng.random((count, 1))
    # HPolyhedron / Intersection: project a deterministic cloud into the set
    fan = direction_fan(d, count, seed)
    center = project(desc, np.zeros(d)).point
    scale = 1.0 + np.linalg.norm(center)
    out = []
    for i, u in enumerate(fan[:count]):
        z = center + scale * (0.25 + 2.0 * (i % 5)) * u
        out.append(project(desc, z).point)
    return np.array(out)


def vi_residual(desc, x, result: ProjectionResult, count: int = 100,
                seed: int = 42) -> float:
    """max over probe points z of <x - p, z - p>; certified nonpositive up to
    solver tolerance when p is the true projection."""
    probes = probe_points(desc, count, seed)
    g = np.asarray(x, dtype=float) - result.point
    return float(np.max((probes - result.point) @ g, initial=0.0))
