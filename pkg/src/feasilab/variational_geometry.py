"""Recession cones, slices, exposedness and rotundity diagnostics, and the
segment-sphere exit geometry behind the perturbation-ratio bound.

Cones are carried either as generator lists (V-form) or as homogeneous
halfspace rows {d : rows @ d <= 0} (H-form); triviality and intersection
tests reduce to small LPs over signed coordinate objectives.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import convex_sets as cs
from .convergence_metrics import MetricConfig, DEFAULT_METRIC_CFG, diameter_estimate
from .directions import direction_fan
from .errors import InputError, UnsupportedVariantError
from .opt_kernels import lp_minimize, nnls
from .projections import project


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConeDescription:
    """Convex cone, finitely generated (generators) or H-represented
    (homogeneous rows).  Empty generators mean the zero cone; an H-form with
    zero rows means the whole space."""

    dim: int
    generators: Optional[np.ndarray] = None
    halfspaces: Optional[np.ndarray] = None

    @staticmethod
    def from_generators(gens, dim=None):
        G = np.asarray(gens, dtype=float)
        if G.size == 0:
            if dim is None:
                raise InputError("zero-generator cone needs an explicit dim")
            return ConeDescription(dim, np.zeros((0, dim)), None)
        G = np.atleast_2d(G)
        return ConeDescription(G.shape[1], G, None)

    @staticmethod
    def from_halfspaces(rows, dim=None):
        H = np.asarray(rows, dtype=float)
        if H.size == 0:
            if dim is None:
                raise InputError("zero-row cone needs an explicit dim")
            return ConeDescription(dim, None, np.zeros((0, dim)))
        H = np.atleast_2d(H)
        return ConeDescription(H.shape[1], None, H)

    @property
    def is_vform(self):
        return self.generators is not None

    def contains(self, d, tol=1e-9):
        d = np.asarray(d, dtype=float)
        if self.is_vform:
            if self.generators.shape[0] == 0:
                return bool(np.linalg.norm(d) <= tol)
            lam = nnls(self.generators.T, d, tol=min(tol, 1e-10))
            return bool(np.linalg.norm(self.generators.T @ lam - d) <= tol)
        if self.halfspaces.shape[0] == 0:
            return True
        return bool(np.max(self.halfspaces @ d) <= tol)


def recession_cone(desc) -> ConeDescription:
    """Asymptotic cone of the set (base-point independent)."""
    if isinstance(desc, cs.HPolyhedron):
        return ConeDescription.from_halfspaces(desc.normals.copy())
    if isinstance(desc, cs.Halfspace):
        return ConeDescription.from_halfspaces(desc.normal[None, :].copy())
    if isinstance(desc, cs.Hyperplane):
        return ConeDescription.from_halfspaces(
            np.vstack([desc.normal, -desc.normal]))
    if isinstance(desc, cs.Ball):
        return ConeDescription.from_generators([], dim=desc.dim)
    if isinstance(desc, cs.Box):
        rows = []
        d = desc.dim
        for i in range(d):
            e = np.zeros(d)
            e[i] = 1.0
            if np.isfinite(desc.upper[i]):
                rows.append(e.copy())
            if np.isfinite(desc.lower[i]):
                rows.append(-e)
        if not rows:
            return ConeDescription.from_halfspaces([], dim=d)
        return ConeDescription.from_halfspaces(np.array(rows))
    if isinstance(desc, cs.MotzkinSet):
        if desc.rays.shape[0] == 0:
            return ConeDescription.from_generators([], dim=desc.dim)
        return ConeDescription.from_generators(desc.rays.copy())
    if isinstance(desc, cs.Translate):
        return recession_cone(desc.inner)
    raise UnsupportedVariantError(
        f"recession cone not defined for {type(desc).__name__}; compose manually")


def _axis_lp_max(objective_builder, dim, tol):
    """max over signed axes of an LP family; > tol on any axis => nontrivial."""
    best = 0.0
    for i in range(dim):
        for sgn in (1.0, -1.0):
            val = objective_builder(i, sgn)
            if val > best:
                best = val
                if best > tol:
                    return best
    return best


def cone_is_trivial(cone: ConeDescription, tol: float = 1e-9) -> bool:
    """True iff the cone is {0}, certified by signed-coordinate LPs over the
    cone intersected with the unit box."""
    if cone.is_vform:
        G = cone.generators
        return G.shape[0] == 0 or bool(np.max(np.linalg.norm(G, axis=1)) <= tol)
    H = cone.halfspaces
    if H.shape[0] == 0:
        return cone.dim == 0

    def axis_obj(i, sgn):
        c = np.zeros(cone.dim)
        c[i] = sgn
        out = lp_minimize(c, A_ub=H, b_ub=np.zeros(H.shape[0]),
                          lower=-np.ones(cone.dim), upper=np.ones(cone.dim),
                          maximize=True)
        return out.optimal_value if out.status == "optimal" else np.inf

    return _axis_lp_max(axis_obj, cone.dim, tol) <= tol


_VV_COEF_CAP = 1e3  # coefficient budget for the second V-cone (unit generators)


def cones_intersection_witness(coneA: ConeDescription, coneB: ConeDescription,
                               tol: float = 1e-9):
    """A direction d != 0 in coneA ∩ coneB when one exists (LP certificate on
    generator coefficients against the H-form, or on paired generator
    coefficients), else None."""
    if coneA.dim != coneB.dim:
        raise InputError("cones live in different dimensions")
    dim = coneA.dim
    if coneA.is_vform and cone_is_trivial(coneA, tol):
        return None
    if coneB.is_vform and cone_is_trivial(coneB, tol):
        return None

    if not coneA.is_vform and not coneB.is_vform:
        H = np.vstack([coneA.halfspaces, coneB.halfspaces])
        for i in range(dim):
            for sgn in (1.0, -1.0):
                c = np.zeros(dim)
                c[i] = sgn
                out = lp_minimize(c, A_ub=H, b_ub=np.zeros(H.shape[0]),
                                  lower=-np.ones(dim), upper=np.ones(dim),
                                  maximize=True)
                if out.status == "optimal" and out.optimal_value > tol:
                    return out.primal_solution
        return None

    if coneA.is_vform and not coneB.is_vform:
        vcone, hcone = coneA, coneB
    elif coneB.is_vform and not coneA.is_vform:
        vcone, hcone = coneB, coneA
    else:
        vcone, hcone = coneA, None

    G = vcone.generators
    norms = np.linalg.norm(G, axis=1)
    G = G[norms > 1e-14] / norms[norms > 1e-14, None]
    k = G.shape[0]

    if hcone is not None:
        H = hcone.halfspaces
        for i in range(dim):
            for sgn in (1.0, -1.0):
                # vars: lam >= 0 with sum <= 1; d = G^T lam satisfies H d <= 0
                c = sgn * G[:, i]
                A_ub = np.vstack([H @ G.T, np.ones((1, k))])
                b_ub = np.concatenate([np.zeros(H.shape[0]), [1.0]])
                out = lp_minimize(c, A_ub=A_ub, b_ub=b_ub,
                                  lower=np.zeros(k), maximize=True)
                if out.status == "optimal" and out.optimal_value > tol:
                    return G.T @ out.primal_solution
        return None

    # V & V: G^T lam = Q^T mu, lam sum <= 1, mu coefficients capped
    Q = coneB.generators
    qn = np.linalg.norm(Q, axis=1)
    Q = Q[qn > 1e-14] / qn[qn > 1e-14, None]
    r = Q.shape[0]
    for i in range(dim):
        for sgn in (1.0, -1.0):
            nv = k + r
            c = np.zeros(nv)
            c[:k] = sgn * G[:, i]
            A_eq = np.hstack([G.T, -Q.T])
            b_eq = np.zeros(dim)
            A_ub = np.zeros((2, nv))
            A_ub[0, :k] = 1.0
            A_ub[1, k:] = 1.0
            b_ub = np.array([1.0, _VV_COEF_CAP])
            out = lp_minimize(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                              lower=np.zeros(nv), maximize=True)
            if out.status == "optimal" and out.optimal_value > tol:
                return G.T @ out.primal_solution[:k]
    return None


def cones_intersection_trivial(coneA: ConeDescription, coneB: ConeDescription,
                               tol: float = 1e-9) -> bool:
    """True iff coneA ∩ coneB = {0}."""
    return cones_intersection_witness(coneA, coneB, tol) is None


def _h_cone_generators_2d(rows):
    """Generators of a planar H-form cone {d : rows @ d <= 0}."""
    if rows.shape[0] == 0:
        return np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    cands = []
    for a in rows:
        t = np.array([-a[1], a[0]])
        for v in (t, -t, -a):
            nv = np.linalg.norm(v)
            if nv > 1e-14:
                cands.append(v / nv)
    out = []
    for v in cands:
        if np.max(rows @ v) <= 1e-10:
            if not any(np.linalg.norm(v - w) <= 1e-9 for w in out):
                out.append(v)
    return np.array(out) if out else np.zeros((0, 2))


def _as_vform(cone: ConeDescription) -> ConeDescription:
    if cone.is_vform:
        return cone
    if cone.dim == 2:
        return ConeDescription.from_generators(
            _h_cone_generators_2d(cone.halfspaces), dim=2)
    raise UnsupportedVariantError(
        "cone equality needs generator form; convert the H-form cone first")


def cone_equal(coneA: ConeDescription, coneB: ConeDescription,
               tol: float = 1e-9) -> bool:
    """Mutual membership of (unit) generators, via NNLS residuals."""
    if coneA.dim != coneB.dim:
        raise InputError("cones live in different dimensions")
    A = _as_vform(coneA)
    B = _as_vform(coneB)
    for first, second in ((A, B), (B, A)):
        for g in first.generators:
            ng = np.linalg.norm(g)
            if ng <= 1e-14:
                continue
            if not second.contains(g / ng, tol):
                return False
    return True


def minimal_set_bounded(A, B, tol: float = 1e-9) -> bool:
    """Boundedness test for the minimal-distance set of (A, B): trivial
    intersection of the two recession cones."""
    return cones_intersection_trivial(recession_cone(A), recession_cone(B), tol)


# ---------------------------------------------------------------------------
# slices and exposedness
# ---------------------------------------------------------------------------

def slice_set(f, alpha: float, K):
    """{x in K : <f, x> >= sup <f, K> - alpha} as an Intersection."""
    f = np.asarray(f, dtype=float)
    if alpha <= 0:
        raise InputError("alpha must be positive")
    s = cs.support(K, f)
    if not np.isfinite(s):
        raise InputError("slice undefined; functional unbounded on the set")
    half = cs.validate(cs.Halfspace(-f, float(alpha - s)))
    return cs.Intersection((K, half))


def slice_diameter(f, alpha, K, cfg: MetricConfig = DEFAULT_METRIC_CFG):
    return diameter_estimate(slice_set(f, alpha, K), cfg)


@dataclass(frozen=True)
class ExposeReport:
    exposes: bool
    alphas: np.ndarray
    diameter_uppers: np.ndarray
    flag: str = ""


def strongly_exposes_check(f, a, A, alpha_grid, decay_threshold: float = 0.6,
                           cfg: MetricConfig = DEFAULT_METRIC_CFG) -> ExposeReport:
    """Does f strongly expose A at a?  Checks the support condition and that
    slice-diameter upper brackets shrink along the alpha grid."""
    f = np.asarray(f, dtype=float)
    a = np.asarray(a, dtype=float)
    s = cs.support(A, f)
    if not np.isfinite(s):
        return ExposeReport(False, np.asarray(alpha_grid), np.array([]),
                            flag="functional unbounded on the set")
    defect = abs(float(f @ a) - s)
    if defect > 1e-7 * (1 + abs(s)):
        raise InputError(
            f"functional does not support the set at a (defect {defect:.3e})")
    alphas = np.sort(np.asarray(alpha_grid, dtype=float))[::-1]
    if alphas.size < 2:
        raise InputError("alpha grid needs at least two values")
    uppers = np.array([slice_diameter(f, al, A, cfg).upper for al in alphas])
    if not np.all(np.isfinite(uppers)):
        return ExposeReport(False, alphas, uppers, flag="slice unbounded")
    monotone = bool(np.all(np.diff(uppers) <= 1e-9 + 0.05 * uppers[:-1]))
    shrinks = uppers[-1] <= decay_threshold * max(uppers[0], 1e-300)
    return ExposeReport(bool(monotone and shrinks), alphas, uppers)


# ---------------------------------------------------------------------------
# local uniform rotundity
# ---------------------------------------------------------------------------

def interior_point(desc):
    """A point with positive distance to the boundary, for bodies."""
    if isinstance(desc, cs.Ball):
        if desc.radius <= 0:
            raise InputError("ball has empty interior")
        return desc.center.copy()
    if isinstance(desc, cs.Box):
        if not (np.all(np.isfinite(desc.lower)) and np.all(np.isfinite(desc.upper))
                and np.all(desc.upper > desc.lower)):
            raise InputError("box has empty interior or is unbounded")
        return 0.5 * (desc.lower + desc.upper)
    if isinstance(desc, cs.HPolyhedron):
        d = desc.dim
        c = np.zeros(d + 1)
        c[d] = 1.0
        A_ub = np.hstack([desc.normals, np.ones((desc.normals.shape[0], 1))])
        out = lp_minimize(c, A_ub=A_ub, b_ub=desc.offsets, maximize=True,
                          lower=np.concatenate([np.full(d, -1e6), [0.0]]),
                          upper=np.concatenate([np.full(d, 1e6), [1e6]]))
        if out.status != "optimal" or out.optimal_value <= 1e-12:
            raise InputError("failed to locate an interior reference point")
        return out.primal_solution[:d]
    if isinstance(desc, cs.Translate):
        return interior_point(desc.inner) + desc.shift
    raise InputError(
        f"no interior reference point rule for {type(desc).__name__}")


def _boundary_along(desc, w, u, t_hi=None, iters=80):
    """Boundary point on the ray w + t u (w interior, convex set); t_hi is a
    starting guess for the doubling search, not a trusted bound."""
    u = u / np.linalg.norm(u)
    lo = 0.0
    hi = t_hi if t_hi is not None and t_hi > 0 else 1.0
    while cs.contains(desc, w + hi * u, 1e-12) and hi < 1e12:
        lo = hi
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if cs.contains(desc, w + mid * u, 1e-13):
            lo = mid
        else:
            hi = mid
    return w + lo * u, lo


def _boundary_distance(desc, m, w, a, fan):
    """Upper estimate of dist(boundary, m) by ray bisection along derived
    directions (through the interior point and the base point, where the
    minimum is attained for round bodies) and then a probe fan."""
    if not cs.contains(desc, m, 1e-13):
        return project(desc, m).distance
    dirs = []
    for v in (m - w, a - m, a - w):
        nv = np.linalg.norm(v)
        if nv > 1e-14:
            dirs.append(v / nv)
            dirs.append(-v / nv)
    dirs.extend(fan)
    best = np.inf
    for u in dirs:
        _, t = _boundary_along(desc, m, u, t_hi=min(best * 4.0, 1e12) if
                               np.isfinite(best) and best > 0 else None)
        best = min(best, t)
        if best <= 1e-9:
            break
    return best


@dataclass(frozen=True)
class LurProfile:
    """Per-epsilon estimates of the rotundity modulus delta(eps): an upper
    estimate (sampling may miss the worst boundary pair)."""

    eps_grid: np.ndarray
    delta_estimates: np.ndarray
    sample_counts: np.ndarray


def lur_modulus(A, a, eps_grid, fan_count: Optional[int] = None,
                seed: int = 42) -> LurProfile:
    """Sampled rotundity modulus of the body A at boundary point a.

    Boundary points y come from ray bisection out of an interior reference
    point, with direction-space refinement so each epsilon has witnesses at
    ||y - a|| ~= epsilon exactly; delta(eps) is the smallest boundary
    distance of the midpoints (a + y)/2 over the witness set.
    """
    a = np.asarray(a, dtype=float)
    w = interior_point(A)
    if not cs.contains(A, a, 1e-8):
        raise InputError("base point is not in the set")
    out_dir = a - w
    if np.linalg.norm(out_dir) < 1e-12:
        raise InputError("base point coincides with the interior reference")
    out_dir = out_dir / np.linalg.norm(out_dir)
    if cs.contains(A, a + 1e-6 * out_dir, 1e-9):
        raise InputError("base point is not on the boundary")

    d = A.dim
    count = fan_count if fan_count is not None else 64 * d
    fan = direction_fan(d, count, seed)
    boundary = []
    for u in fan:
        y, _ = _boundary_along(A, w, u)
        boundary.append(y)
    boundary = np.array(boundary)
    dist_a = np.linalg.norm(boundary - a, axis=1)

    eps_grid = np.asarray(eps_grid, dtype=float)
    deltas = np.zeros(eps_grid.size)
    counts = np.zeros(eps_grid.size, dtype=int)
    probe_fan = direction_fan(d, min(count, 32), seed + 1)
    for k, eps in enumerate(eps_grid):
        ys = [boundary[i] for i in range(len(boundary)) if dist_a[i] >= eps]
        # refine along the fan ordering: bisect between adjacent directions
        # whose boundary points straddle ||y - a|| = eps
        for i in range(len(fan) - 1):
            lo_i, hi_i = dist_a[i] - eps, dist_a[i + 1] - eps
            if lo_i * hi_i < 0:
                u0, u1 = fan[i], fan[i + 1]
                for _ in range(60):
                    um = u0 + u1
                    nm = np.linalg.norm(um)
                    if nm < 1e-12:
                        break
                    um = um / nm
                    ym, _ = _boundary_along(A, w, um)
                    if (np.linalg.norm(ym - a) - eps) * lo_i > 0:
                        u0 = um
                    else:
                        u1 = um
                ym, _ = _boundary_along(A, w, 0.5 * (u0 + u1) /
                                        np.linalg.norm(0.5 * (u0 + u1)))
                if np.linalg.norm(ym - a) >= eps * (1 - 1e-9):
                    ys.append(ym)
        # the midpoint search concentrates on witnesses near the eps shell,
        # where the modulus minimum sits for rotund bodies; flat faces are
        # refuted by any same-face witness, which the shell also contains
        ys.sort(key=lambda y: np.linalg.norm(y - a))
        evaluated = ys[:32]
        best = np.inf
        for y in evaluated:
            m = 0.5 * (a + y)
            best = min(best, _boundary_distance(A, m, w, a, probe_fan))
            if best <= 1e-9:
                break
        deltas[k] = best if np.isfinite(best) else 0.0
        counts[k] = len(evaluated)
    return LurProfile(eps_grid, deltas, counts)


# ---------------------------------------------------------------------------
# segment-sphere exits and the ratio bound
# ---------------------------------------------------------------------------

def sphere_segment_exit(x, a, R: float):
    """The unique point of [x, a] on the sphere of radius R, for
    ||x|| < R < ||a|| (closed-form quadratic root)."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    margin = 1e-12 * max(1.0, R)
    if not np.linalg.norm(x) < R - margin:
        raise InputError(f"need ||x|| < R: ||x||={np.linalg.norm(x)}, R={R}")
    if not np.linalg.norm(a) > R + margin:
        raise InputError(f"need ||a|| > R: ||a||={np.linalg.norm(a)}, R={R}")
    g = a - x
    A_ = float(g @ g)
    B_ = float(x @ g)
    C_ = float(x @ x) - R * R
    t = (-B_ + np.sqrt(B_ * B_ - A_ * C_)) / A_
    return x + t * g


def sphere_segment_exit_bisect(x, a, R: float, norm=None, iters: int = 200):
    """General-norm variant: bisection on the exit parameter for a caller
    supplied norm (defaults to Euclidean)."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    nf = norm if norm is not None else np.linalg.norm
    if not nf(x) < R:
        raise InputError("need norm(x) < R")
    if not nf(a) > R:
        raise InputError("need norm(a) > R")
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if nf(x + mid * (a - x)) < R:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return x + t * (a - x)


def gamma_bound_check(x, y, a, b, R: float) -> float:
    """||b' - a'|| / max(||x||, ||y||, ||a - b||) for the segment-sphere
    exits a' of [x,a] and b' of [y,b]; callers assert the ratio <= 17."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if R <= 1.0:
        raise InputError("need R > 1")
    for v, name in ((a, "a"), (b, "b")):
        if not np.linalg.norm(v) > 2 * R:
            raise InputError(f"need ||{name}|| > 2R")
    ap = sphere_segment_exit(x, a, R)
    bp = sphere_segment_exit(y, b, R)
    denom = max(np.linalg.norm(x), np.linalg.norm(y), np.linalg.norm(a - b))
    num = float(np.linalg.norm(bp - ap))
    if denom <= 1e-300:
        return 0.0
    return num / denom


def gamma_ratio_batch(X, Y, A, B, R):
    """Vectorized gamma_bound_check over rows (preconditions assumed)."""
    def exits(P, Q):
        G = Q - P
        A_ = np.einsum("ij,ij->i", G, G)
        B_ = np.einsum("ij,ij->i", P, G)
        C_ = np.einsum("ij,ij->i", P, P) - R * R
        t = (-B_ + np.sqrt(B_ * B_ - A_ * C_)) / A_
        return P + t[:, None] * G

    ap = exits(X, A)
    bp = exits(Y, B)
    num = np.linalg.norm(bp - ap, axis=1)
    denom = np.maximum.reduce([
        np.linalg.norm(X, axis=1), np.linalg.norm(Y, axis=1),
        np.linalg.norm(A - B, axis=1)])
    out = np.zeros_like(num)
    mask = denom > 1e-300
    out[mask] = num[mask] / denom[mask]
    return out
