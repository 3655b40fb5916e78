"""Small dense optimization front-ends.

These wrap the jitted cores in :mod:`feasilab.kernels` with validated,
general-form interfaces: an LP solver over rows with mixed senses and
variable bounds, Lawson-Hanson NNLS, Euclidean projection onto the
probability simplex, and the nearest-point QP over conv(points)+cone(rays).

Default tolerances: feasibility 1e-9, optimality 1e-8, iteration cap 1e5.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError, NumericalFailureError

FEAS_TOL = 1e-9
OPT_TOL = 1e-8
MAX_ITER = 100_000

_SENSE_MAP = {"<=": -1, "=": 0, "==": 0, ">=": 1, -1: -1, 0: 0, 1: 1}


def as_vector(x, name="vector"):
    """Coerce to a finite 1-D float64 array of dimension >= 1."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise InputError(f"{name} must be a 1-D sequence with at least one entry")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} contains non-finite entries")
    return v


@dataclass(frozen=True)
class LinearProgram:
    """min (or max) objective @ x subject to row senses and variable bounds."""

    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    senses: np.ndarray  # per row: -1 (<=), 0 (=), 1 (>=)
    lower: np.ndarray
    upper: np.ndarray
    maximize: bool = False

    @staticmethod
    def build(objective, constraint_matrix, rhs, senses, lower=None, upper=None,
              maximize=False):
        c = as_vector(objective, "objective")
        A = np.atleast_2d(np.asarray(constraint_matrix, dtype=float))
        if A.size == 0:
            A = A.reshape(0, c.size)
        b = np.asarray(rhs, dtype=float).reshape(-1)
        if A.shape[0] != b.size:
            raise InputError("constraint matrix row count != rhs length")
        if A.shape[1] != c.size:
            raise InputError("constraint matrix column count != objective dimension")
        try:
            s = np.array([_SENSE_MAP[x] for x in senses], dtype=np.int8)
        except KeyError as e:
            raise InputError(f"unknown row sense {e.args[0]!r}") from None
        if s.size != b.size:
            raise InputError("senses length != rhs length")
        lo = np.full(c.size, -np.inf) if lower is None else np.asarray(lower, dtype=float)
        hi = np.full(c.size, np.inf) if upper is None else np.asarray(upper, dtype=float)
        if lo.size != c.size or hi.size != c.size:
            raise InputError("bounds length != objective dimension")
        if np.any(lo > hi):
            raise InputError("lower bound exceeds upper bound")
        return LinearProgram(c, A, b, s, lo, hi, maximize)


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    optimal_value: float | None
    primal_solution: np.ndarray | None
    iterations: int


def _to_standard_form(lp):
    """Rewrite as min c@x, A x = b, x >= 0. Returns (A, b, c, recover)."""
    n = lp.objective.size
    cols = []          # (orig_index, sign, offset) per standard-form column
    col_of = [[] for _ in range(n)]
    extra_rows = []    # upper-bound rows for doubly-bounded variables
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        if np.isfinite(lo):
            col_of[j].append(len(cols))
            cols.append((j, 1.0, lo))
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            col_of[j].append(len(cols))
            cols.append((j, -1.0, hi))
        else:
            col_of[j].append(len(cols))
            cols.append((j, 1.0, 0.0))
            col_of[j].append(len(cols))
            cols.append((j, -1.0, 0.0))

    m = lp.rhs.size
    nsf = len(cols)
    n_slack = int(np.sum(lp.senses != 0)) + len(extra_rows)
    A = np.zeros((m + len(extra_rows), nsf + n_slack))
    b = np.zeros(m + len(extra_rows))
    c = np.zeros(nsf + n_slack)
    sign = 1.0 if not lp.maximize else -1.0
    for t, (j, sgn, _off) in enumerate(cols):
        A[:m, t] = sgn * lp.constraint_matrix[:, j]
        c[t] = sign * sgn * lp.objective[j]
    # rhs shifted by the per-variable substitution offsets
    off_vec = np.zeros(n)
    for j in range(n):
        off_vec[j] = cols[col_of[j][0]][2]
    b[:m] = lp.rhs - lp.constraint_matrix @ off_vec
    slack_pos = nsf
    for i in range(m):
        if lp.senses[i] == -1:
            A[i, slack_pos] = 1.0
            slack_pos += 1
        elif lp.senses[i] == 1:
            A[i, slack_pos] = -1.0
            slack_pos += 1
    for r, (t, ub) in enumerate(extra_rows):
        A[m + r, t] = 1.0
        A[m + r, slack_pos] = 1.0
        slack_pos += 1
        b[m + r] = ub

    def recover(xsf):
        x = off_vec.copy()
        for t, (j, sgn, _off) in enumerate(cols):
            x[j] += sgn * xsf[t]
        return x

    return A, b, c, recover


def solve_lp(lp: LinearProgram, tol: float = FEAS_TOL, max_iter: int = MAX_ITER) -> LpOutcome:
    """Dense two-phase simplex with Bland's rule; deterministic.

    Raises :class:`NumericalFailureError` (carrying the best point found) if
    the pivot cap is exceeded; reports infeasible/unbounded in the outcome.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    A, b, c, recover = _to_standard_form(lp)
    status, xsf, iters = kernels.simplex_core(
        np.ascontiguousarray(A), np.ascontiguousarray(b), np.ascontiguousarray(c),
        tol, max_iter)
    if status == kernels.STATUS_ITER_CAP:
        raise NumericalFailureError("simplex iteration cap exceeded", best=recover(xsf))
    if status == kernels.STATUS_INFEASIBLE:
        return LpOutcome("infeasible", None, None, iters)
    if status == kernels.STATUS_UNBOUNDED:
        return LpOutcome("unbounded", None, None, iters)
    x = recover(xsf)
    value = float(lp.objective @ x)
    resid = _constraint_residual(lp, x)
    if resid > 1e4 * tol:
        raise NumericalFailureError(
            f"LP solution failed the feasibility re-check (residual {resid:.3e})",
            best=x, residual=resid)
    return LpOutcome("optimal", value, x, iters)


def _constraint_residual(lp, x):
    r = lp.constraint_matrix @ x - lp.rhs
    out = 0.0
    for i in range(lp.rhs.size):
        if lp.senses[i] == -1:
            out = max(out, r[i])
        elif lp.senses[i] == 1:
            out = max(out, -r[i])
        else:
            out = max(out, abs(r[i]))
    out = max(out, float(np.max(lp.lower - x, initial=0.0)))
    out = max(out, float(np.max(x - lp.upper, initial=0.0)))
    return out


def lp_minimize(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, lower=None,
                upper=None, maximize=False, tol=FEAS_TOL):
    """Convenience wrapper assembling a LinearProgram from ub/eq blocks."""
    c = as_vector(c, "objective")
    rows, rhs, senses = [], [], []
    if A_ub is not None and len(np.atleast_2d(A_ub)) and np.size(A_ub):
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        rows.append(A_ub)
        rhs.extend(np.asarray(b_ub, dtype=float).reshape(-1))
        senses.extend([-1] * A_ub.shape[0])
    if A_eq is not None and np.size(A_eq):
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        rows.append(A_eq)
        rhs.extend(np.asarray(b_eq, dtype=float).reshape(-1))
        senses.extend([0] * A_eq.shape[0])
    A = np.vstack(rows) if rows else np.zeros((0, c.size))
    lp = LinearProgram.build(c, A, np.array(rhs), senses, lower, upper, maximize)
    return solve_lp(lp, tol=tol)


def nnls(G, target, tol: float = 1e-10, max_iter: int = MAX_ITER):
    """lam >= 0 minimizing ||G lam - target|| (Lawson-Hanson active set).

    KKT guarantee: <g_j, G lam - target> >= -tol for every column, with
    equality within tol wherever lam_j > tol.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    y = as_vector(target, "target")
    if G.shape[0] != y.size:
        raise InputError("matrix row count != target dimension")
    if G.shape[1] < 1:
        raise InputError("matrix needs at least one column")
    if tol <= 0:
        raise InputError("tol must be positive")
    lam, status, _ = kernels.nnls_core(
        np.ascontiguousarray(G), np.ascontiguousarray(y), tol, max_iter)
    if status == kernels.STATUS_ITER_CAP:
        raise NumericalFailureError("NNLS iteration cap exceeded", best=lam)
    return lam


def project_simplex(weights):
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    v = as_vector(weights, "weights")
    return kernels.simplex_project_core(np.ascontiguousarray(v))


def qp_point_to_motzkin(points, rays, target, tol: float = 1e-10,
                        max_iter: int = MAX_ITER):
    """Nearest point of conv(points) + cone(rays) to target.

    Returns (lam, mu, point, residual, iterations); the residual is the
    variational-inequality defect over the generators.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    x = as_vector(target, "target")
    if P.shape[0] < 1:
        raise InputError("at least one point is required")
    if P.shape[1] != x.size:
        raise InputError("point dimension != target dimension")
    R = np.asarray(rays, dtype=float).reshape(-1, x.size) if len(rays) else \
        np.zeros((0, x.size))
    M = np.ascontiguousarray(np.vstack([P, R]).T)
    theta, resid, iters, status = kernels.motzkin_core(
        M, P.shape[0], np.ascontiguousarray(x), tol, max_iter)
    lam = theta[: P.shape[0]]
    mu = theta[P.shape[0]:]
    point = M @ theta
    if status == kernels.STATUS_ITER_CAP and resid > 1e3 * tol:
        raise NumericalFailureError(
            "projected-gradient/active-set cap exceeded", best=point, residual=resid)
    return lam, mu, point, float(resid), int(iters)
