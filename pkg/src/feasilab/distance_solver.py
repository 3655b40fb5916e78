"""Minimal-distance pairs between closed convex sets.

Alternating projections a_{k+1} = P_A(b_k), b_{k+1} = P_B(a_{k+1}) with a
deterministic start (the origin projected onto A unless overridden), a
support-function lower-bound certificate, and exhaustive piece-pair
minimization for piecewise (union) sets.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import convex_sets as cs
from . import kernels
from .errors import InputError
from .projections import ProjectionConfig, project


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-12          # stop when the gap decrease falls below this
    max_iter: int = 20_000      # alternating-projection sweeps
    start: Optional[np.ndarray] = None
    projection_tol: float = 1e-12
    keep_trace: bool = True
    exact_polish: bool = True   # solve generator-form pairs by one exact QP


DEFAULT_SOLVE_CFG = SolveConfig()


@dataclass(frozen=True)
class LowerBoundCertificate:
    value: float
    certified: bool
    functional: Optional[np.ndarray]


@dataclass(frozen=True)
class SolveReport:
    a: np.ndarray
    b: np.ndarray
    distance: float
    lower_bound: float
    iterations: int
    trace: np.ndarray
    status: str  # "converged" | "cap_reached"
    certificate: Optional[LowerBoundCertificate] = None

    def to_obj(self, include_trace=True):
        obj = {
            "a": [float(v) for v in self.a],
            "b": [float(v) for v in self.b],
            "distance": float(self.distance),
            "lower_bound": float(self.lower_bound),
            "iterations": int(self.iterations),
            "status": self.status,
        }
        if include_trace:
            obj["trace"] = [float(v) for v in self.trace]
        return obj


def distance_lower_bound(A, B, f) -> LowerBoundCertificate:
    """Separation certificate: (inf_B <f,.> - sup_A <f,.>)/||f|| clipped at 0.

    Both orientations of f are tried; when every needed support value is
    infinite the certificate is flagged uncertified with value 0.
    """
    f = np.asarray(f, dtype=float)
    nf = float(np.linalg.norm(f))
    if nf <= 1e-300:
        raise InputError("zero functional")
    candidates = []
    for g in (f, -f):
        sup_a = cs.support(A, g)
        inf_b = -cs.support(B, -g)
        if np.isfinite(sup_a) and np.isfinite(inf_b):
            candidates.append(((inf_b - sup_a) / nf, g))
    if not candidates:
        return LowerBoundCertificate(0.0, False, None)
    val, g = max(candidates, key=lambda t: t[0])
    return LowerBoundCertificate(max(0.0, float(val)), True, g)


def _motzkin_form(desc):
    """(points, rays) arrays when the set is exactly conv(points)+cone(rays)
    for computable generators, else None.  Pointed variants only; sets that
    contain lines stay on the alternating-projection path."""
    if isinstance(desc, cs.MotzkinSet):
        return desc.points, desc.rays
    if isinstance(desc, cs.Translate):
        inner = _motzkin_form(desc.inner)
        if inner is None:
            return None
        return inner[0] + desc.shift, inner[1]
    if isinstance(desc, cs.Box):
        d = desc.dim
        if d > 12:
            return None
        choices, rays = [], []
        for i in range(d):
            lo, hi = desc.lower[i], desc.upper[i]
            e = np.zeros(d)
            e[i] = 1.0
            if np.isfinite(lo) and np.isfinite(hi):
                choices.append((lo, hi) if hi > lo else (lo,))
            elif np.isfinite(lo):
                choices.append((lo,))
                rays.append(e.copy())
            elif np.isfinite(hi):
                choices.append((hi,))
                rays.append(-e)
            else:
                return None  # contains a line
        pts = np.array(np.meshgrid(*choices, indexing="ij")).reshape(d, -1).T
        if pts.shape[0] > 4096:
            return None
        return pts, np.array(rays) if rays else np.zeros((0, d))
    if isinstance(desc, cs.HPolyhedron) and desc.dim == 2:
        from .convergence_metrics import _poly2d_vertices
        from .variational_geometry import _h_cone_generators_2d

        verts = _poly2d_vertices(desc.normals, desc.offsets)
        if verts.shape[0] < 1:
            return None
        gens = _h_cone_generators_2d(desc.normals)
        for i in range(gens.shape[0]):
            for j in range(i + 1, gens.shape[0]):
                if gens[i] @ gens[j] < -1 + 1e-9:
                    return None  # contains a line
        return verts, gens
    return None


def _exact_pair(A, B, tol=1e-11):
    """Minimal-distance pair via one segmented QP when both sets have
    computable Motzkin forms; None otherwise."""
    fa = _motzkin_form(A)
    fb = _motzkin_form(B)
    if fa is None or fb is None:
        return None
    Pa, Ra = fa
    Pb, Rb = fb
    d = Pa.shape[1]
    M = np.ascontiguousarray(np.vstack([Pa, Ra, -Pb, -Rb]).T)
    col_block = np.concatenate([
        np.zeros(Pa.shape[0], dtype=np.int64),
        -np.ones(Ra.shape[0], dtype=np.int64),
        np.ones(Pb.shape[0], dtype=np.int64),
        -np.ones(Rb.shape[0], dtype=np.int64)])
    theta, res, _, status = kernels.segmented_qp_core(
        M, col_block, 2, np.zeros(d), tol, 200_000)
    ka, ra = Pa.shape[0], Ra.shape[0]
    kb = Pb.shape[0]
    a = Pa.T @ theta[:ka] + Ra.T @ theta[ka:ka + ra]
    b = Pb.T @ theta[ka + ra:ka + ra + kb] + Rb.T @ theta[ka + ra + kb:]
    return a, b, float(res), status


def min_distance_pair(A, B, cfg: SolveConfig = DEFAULT_SOLVE_CFG) -> SolveReport:
    """Minimal-distance pair of A and B.

    When both sets have computable generator forms the pair comes from one
    exact segmented QP over the paired generators (plain alternating
    projections are arbitrarily slow between narrow polyhedral wedges);
    otherwise alternating projections run from the deterministic start (the
    origin projected onto A) until the gap decrease falls below tol.  The
    reported pair attains the minimal distance whenever it is attained; on
    unbounded instances where the infimum is out of reach the status is
    ``cap_reached`` and the trace lets the caller judge divergence.
    """
    if A.dim != B.dim:
        raise InputError("sets live in different dimensions")
    polished = _exact_pair(A, B, tol=min(cfg.projection_tol, 1e-11)) \
        if cfg.exact_polish else None
    if polished is not None and polished[3] == kernels.STATUS_OK:
        a, b, _, _ = polished
        gap = float(np.linalg.norm(a - b))
        trace = [gap]
        it = 0
        status = "converged"
    else:
        pcfg = ProjectionConfig(cfg.projection_tol, 100_000)
        start = np.zeros(A.dim) if cfg.start is None else \
            np.asarray(cfg.start, dtype=float)
        a = project(A, start, pcfg).point
        b = project(B, a, pcfg).point
        gap = float(np.linalg.norm(a - b))
        trace = [gap]
        status = "cap_reached"
        stall = 0
        it = 0
        while it < cfg.max_iter:
            it += 1
            a = project(A, b, pcfg).point
            b = project(B, a, pcfg).point
            new_gap = float(np.linalg.norm(a - b))
            trace.append(new_gap)
            if gap - new_gap <= cfg.tol:
                stall += 1
                if stall >= 2:
                    gap = new_gap
                    status = "converged"
                    break
            else:
                stall = 0
            gap = new_gap

    if gap > max(10 * cfg.tol, 1e-13):
        certificate = distance_lower_bound(A, B, b - a)
    else:
        certificate = LowerBoundCertificate(0.0, True, None)
    return SolveReport(
        a=a, b=b, distance=gap, lower_bound=certificate.value,
        iterations=it,
        trace=np.array(trace) if cfg.keep_trace else np.array([gap]),
        status=status, certificate=certificate)


@dataclass(frozen=True)
class PiecewiseReport:
    report: SolveReport
    winner: tuple
    partial: bool = False
    failed_pairs: tuple = ()


def piecewise_min_distance(A, B, cfg: SolveConfig = DEFAULT_SOLVE_CFG) -> PiecewiseReport:
    """Exhaustive minimization over piece pairs of two union sets.

    Ties break lexicographically by piece index; solver failures on
    individual pairs are recorded and mark the result partial.
    """
    A_pieces = A.pieces if isinstance(A, cs.PiecewiseSet) else (A,)
    B_pieces = B.pieces if isinstance(B, cs.PiecewiseSet) else (B,)
    best = None
    winner = None
    failed = []
    for i, pa in enumerate(A_pieces):
        for j, pb in enumerate(B_pieces):
            try:
                rep = min_distance_pair(pa, pb, cfg)
            except Exception:
                failed.append((i, j))
                continue
            if rep.status != "converged":
                failed.append((i, j))
            if best is None or rep.distance < best.distance - 1e-15:
                best = rep
                winner = (i, j)
    if best is None:
        raise InputError("every piece pair failed to solve")
    return PiecewiseReport(best, winner, partial=bool(failed),
                           failed_pairs=tuple(failed))
