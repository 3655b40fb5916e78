"""Executable check suites: distance upper-semicontinuity, the recession
boundedness criterion, the segment-sphere ratio bound, the per-block
inclusion lemmas, and the stability/rotundity convergence experiments.

Every suite is deterministic given (seed, trials, dims); outcomes carry the
observed extremes, the asserted bound, and a per-trial table for CSV export.
"""

from dataclasses import dataclass, field

import numpy as np

from . import convex_sets as cs
from . import blockgeom as bg
from .distance_solver import SolveConfig, min_distance_pair, _motzkin_form
from .errors import InputError
from .families import block_cones, example_two_cones
from .opt_kernels import lp_minimize
from .projections import project
from .variational_geometry import (cones_intersection_witness,
                                   gamma_ratio_batch, recession_cone)


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    observed: object
    bound: object
    trials: int
    worst_case: dict = field(default_factory=dict)
    table: tuple = ()  # rows (label, observed, bound, passed)

    def to_obj(self):
        def conv(v):
            if isinstance(v, np.ndarray):
                return [float(x) for x in v.ravel()]
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            return v

        return {"name": self.name, "passed": bool(self.passed),
                "observed": conv(self.observed), "bound": conv(self.bound),
                "trials": int(self.trials), "worst_case": conv(self.worst_case)}


# ---------------------------------------------------------------------------
# separation margin and intersection LPs over generator forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    margin: float
    functional: np.ndarray
    raw_margin: float
    only_zero_functional: bool | None
    max_axis_functional: float | None


def separation_margin(A, B, tol: float = 1e-9) -> SeparationReport:
    """Best gap inf <f,B> - sup <f,A> over functionals with max-norm <= 1.

    Generator-form pairs solve the margin LP; when the optimal margin is
    zero the feasible functionals at margin 0 are swept per signed axis, and
    ``only_zero_functional`` certifies non-separation (the only feasible f
    is 0).  Other pairs fall back to the solver gap with the Euclidean
    functional along it.
    """
    fa = _motzkin_form(A)
    fb = _motzkin_form(B)
    if fa is None or fb is None:
        rep = min_distance_pair(A, B)
        gap = rep.b - rep.a
        ng = np.linalg.norm(gap)
        f = gap / ng if ng > tol else np.zeros(A.dim)
        return SeparationReport(float(max(0.0, rep.distance)), f,
                                float(rep.distance), None, None)
    Pa, Ra = fa
    Pb, Rb = fb
    d = A.dim
    # variables: f (d), s, m
    rows, rhs = [], []
    for p in Pa:
        rows.append(np.concatenate([p, [-1.0, 0.0]]))
        rhs.append(0.0)
    for r in Ra:
        rows.append(np.concatenate([r, [0.0, 0.0]]))
        rhs.append(0.0)
    for q in Pb:
        rows.append(np.concatenate([-q, [1.0, 1.0]]))
        rhs.append(0.0)
    for r in Rb:
        rows.append(np.concatenate([-r, [0.0, 0.0]]))
        rhs.append(0.0)
    rows = np.array(rows)
    rhs = np.array(rhs)
    big = 1e6
    lower = np.concatenate([-np.ones(d), [-big, -big]])
    upper = np.concatenate([np.ones(d), [big, big]])
    obj = np.zeros(d + 2)
    obj[d + 1] = 1.0
    out = lp_minimize(obj, A_ub=rows, b_ub=rhs, lower=lower, upper=upper,
                      maximize=True)
    if out.status != "optimal":
        raise InputError(f"margin LP ended with status {out.status}")
    raw = float(out.optimal_value)
    f_star = out.primal_solution[:d]
    margin = max(0.0, raw)
    only_zero = None
    fmax = None
    if margin <= tol:
        # sweep signed axes of the margin-0 feasible region
        rows0 = rows[:, : d + 1]
        fmax = 0.0
        for i in range(d):
            for sgn in (1.0, -1.0):
                c = np.zeros(d + 1)
                c[i] = sgn
                o = lp_minimize(c, A_ub=rows0, b_ub=rhs,
                                lower=lower[: d + 1], upper=upper[: d + 1],
                                maximize=True)
                if o.status == "optimal":
                    fmax = max(fmax, float(o.optimal_value))
        only_zero = fmax <= 10 * tol
    return SeparationReport(margin, f_star, raw, only_zero, fmax)


def intersection_support_lp(A, B, u) -> float:
    """sup <u, x> over A ∩ B for generator-form sets (LP on the paired
    coefficients); +inf when unbounded."""
    fa = _motzkin_form(A)
    fb = _motzkin_form(B)
    if fa is None or fb is None:
        raise InputError("intersection support LP needs generator forms")
    Pa, Ra = fa
    Pb, Rb = fb
    u = np.asarray(u, dtype=float)
    d = u.size
    ka, ra, kb, rb = Pa.shape[0], Ra.shape[0], Pb.shape[0], Rb.shape[0]
    nv = ka + ra + kb + rb
    A_eq = np.zeros((d + 2, nv))
    A_eq[:d, :ka] = Pa.T
    A_eq[:d, ka:ka + ra] = Ra.T
    A_eq[:d, ka + ra:ka + ra + kb] = -Pb.T
    A_eq[:d, ka + ra + kb:] = -Rb.T
    A_eq[d, :ka] = 1.0
    A_eq[d + 1, ka + ra:ka + ra + kb] = 1.0
    b_eq = np.concatenate([np.zeros(d), [1.0, 1.0]])
    c = np.concatenate([Pa @ u, Ra @ u, np.zeros(kb + rb)])
    out = lp_minimize(c, A_eq=A_eq, b_eq=b_eq, lower=np.zeros(nv),
                      maximize=True)
    if out.status == "unbounded":
        return np.inf
    if out.status != "optimal":
        raise InputError(f"intersection support LP status {out.status}")
    return float(out.optimal_value)


def max_scale_in_intersection(A, B, direction) -> float:
    """max t >= 0 with t*direction in A ∩ B (generator forms); +inf when
    unbounded, -inf when even t=0 is infeasible."""
    fa = _motzkin_form(A)
    fb = _motzkin_form(B)
    if fa is None or fb is None:
        raise InputError("scale LP needs generator forms")
    Pa, Ra = fa
    Pb, Rb = fb
    u = np.asarray(direction, dtype=float)
    d = u.size
    ka, ra, kb, rb = Pa.shape[0], Ra.shape[0], Pb.shape[0], Rb.shape[0]
    nv = ka + ra + kb + rb + 1
    A_eq = np.zeros((2 * d + 2, nv))
    A_eq[:d, :ka] = Pa.T
    A_eq[:d, ka:ka + ra] = Ra.T
    A_eq[:d, -1] = -u
    A_eq[d:2 * d, ka + ra:ka + ra + kb] = Pb.T
    A_eq[d:2 * d, ka + ra + kb:-1] = Rb.T
    A_eq[d:2 * d, -1] = -u
    A_eq[2 * d, :ka] = 1.0
    A_eq[2 * d + 1, ka + ra:ka + ra + kb] = 1.0
    b_eq = np.concatenate([np.zeros(2 * d), [1.0, 1.0]])
    c = np.zeros(nv)
    c[-1] = 1.0
    out = lp_minimize(c, A_eq=A_eq, b_eq=b_eq, lower=np.zeros(nv),
                      maximize=True)
    if out.status == "unbounded":
        return np.inf
    if out.status != "optimal":
        return -np.inf
    return float(out.optimal_value)


# ---------------------------------------------------------------------------
# upper-semicontinuity of the distance under inner perturbations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationFamily:
    name: str
    limit_A: object
    limit_B: object
    steps: tuple  # ((A_k, B_k), ...)
    intersecting: bool


def _random_base_set(rng, dim, kind, center):
    if kind == "ball":
        return cs.validate(cs.Ball(center, 0.5 + 0.7 * rng.random()))
    if kind == "box":
        half = 0.4 + 0.6 * rng.random(dim)
        return cs.validate(cs.Box(center - half, center + half))
    count = rng.integers(dim + 2, dim + 7)
    pts = center + rng.normal(size=(count, dim))
    pts /= max(1.0, np.max(np.linalg.norm(pts - center, axis=1)))
    pts = center + (pts - center) * (0.5 + 0.7 * rng.random())
    return cs.validate(cs.MotzkinSet(pts, np.zeros((0, dim))))


def _centroid(desc):
    if isinstance(desc, cs.Ball):
        return desc.center
    if isinstance(desc, cs.Box):
        return 0.5 * (desc.lower + desc.upper)
    if isinstance(desc, cs.MotzkinSet):
        return desc.points.mean(axis=0)
    if isinstance(desc, cs.BallSum):
        return _centroid(desc.inner)
    if isinstance(desc, cs.Translate):
        return _centroid(desc.inner) + desc.shift
    return np.zeros(desc.dim)


def _outer_perturb(desc, h, mode, toward):
    """A superset (or distance-reducing translate) of desc at magnitude h."""
    if mode == "ballsum":
        return cs.minkowski_ball(desc, h)
    if mode == "translate":
        return cs.translate(desc, h * toward)
    c = _centroid(desc)
    if isinstance(desc, cs.Ball):
        return cs.Ball(desc.center, desc.radius * (1 + h))
    if isinstance(desc, cs.Box):
        return cs.Box(c + (desc.lower - c) * (1 + h),
                      c + (desc.upper - c) * (1 + h))
    if isinstance(desc, cs.MotzkinSet):
        return cs.MotzkinSet(c + (desc.points - c) * (1 + h), desc.rays)
    return cs.minkowski_ball(desc, h)


def fact2_family(seed: int, steps: int = 8) -> PerturbationFamily:
    """One seeded perturbation family converging from outside, so perturbed
    distances never exceed the limit distance."""
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, 5))
    kinds = ("ball", "box", "polytope")
    kind_a = kinds[rng.integers(0, 3)]
    kind_b = kinds[rng.integers(0, 3)]
    intersecting = bool(rng.random() < 0.35)
    dir_ab = rng.normal(size=dim)
    dir_ab /= np.linalg.norm(dir_ab)
    A = _random_base_set(rng, dim, kind_a, np.zeros(dim))
    if intersecting:
        # overlap with interior: recentre B on a deep point of A
        inner = _centroid(A)
        B = _random_base_set(rng, dim, kind_b, inner + 0.05 * dir_ab)
        probes = 0.03 * np.vstack([np.eye(dim), -np.eye(dim)])
        deep = all(cs.contains(A, inner + p, 1e-9) and
                   cs.contains(B, inner + p, 1e-9) for p in probes)
        if not deep:
            B = cs.validate(cs.Ball(inner, 0.3 + 0.3 * rng.random()))
    else:
        gap = 0.5 + 1.5 * rng.random()
        B = _random_base_set(rng, dim, kind_b, (2.6 + gap) * dir_ab)
    mode_a = ("ballsum", "translate", "scale")[rng.integers(0, 3)]
    mode_b = ("ballsum", "translate", "scale")[rng.integers(0, 3)]
    toward_b = _centroid(B) - _centroid(A)
    nrm = np.linalg.norm(toward_b)
    toward_b = toward_b / nrm if nrm > 1e-12 else np.zeros(dim)
    pairs = []
    for k in range(1, steps + 1):
        h = 2.0 ** (-k)
        A_k = cs.validate(_outer_perturb(A, h, mode_a, toward_b))
        B_k = cs.validate(_outer_perturb(B, h, mode_b, -toward_b))
        pairs.append((A_k, B_k))
    return PerturbationFamily(f"fact2-{seed}", A, B, tuple(pairs), intersecting)


def fact2_check(family: PerturbationFamily, tol: float = 1e-6) -> CheckOutcome:
    """Tail violations of limsup dist(A_k, B_k) <= dist(A, B)."""
    cfg = SolveConfig()
    limit = min_distance_pair(family.limit_A, family.limit_B, cfg).distance
    dists = [min_distance_pair(a, b, cfg).distance for a, b in family.steps]
    tail = dists[len(dists) // 2:]
    viol = max(d - limit for d in tail)
    passed = viol <= tol
    final_ok = True
    if family.intersecting:
        final_ok = dists[-1] <= 1e-4
    table = tuple((f"k={i+1}", d, limit + tol, d <= limit + tol)
                  for i, d in enumerate(dists))
    return CheckOutcome(
        name=family.name, passed=bool(passed and final_ok),
        observed=float(viol), bound=float(tol), trials=len(dists),
        worst_case={"limit_distance": limit, "final_distance": dists[-1],
                    "intersecting": family.intersecting},
        table=table)


def fact2_suite(count: int = 200, seed: int = 42, steps: int = 8,
                tol: float = 1e-6) -> CheckOutcome:
    worst = -np.inf
    worst_rec = {}
    rows = []
    all_pass = True
    for i in range(count):
        fam = fact2_family(seed + 1000 * i, steps)
        out = fact2_check(fam, tol)
        rows.append((fam.name, out.observed, tol, out.passed))
        if out.observed > worst:
            worst = out.observed
            worst_rec = {"family": fam.name, **out.worst_case}
        all_pass = all_pass and out.passed
    return CheckOutcome("fact2-suite", bool(all_pass), float(worst), tol,
                        count, worst_rec, tuple(rows))


# ---------------------------------------------------------------------------
# recession criterion: cone verdict vs multi-start solution spread
# ---------------------------------------------------------------------------

def _recession_instance(seed: int):
    """(A, B, kind) drawn from bounded- and unbounded-minimal-set shapes."""
    rng = np.random.default_rng(seed)
    unbounded = bool(rng.random() < 0.5)
    dim = int(rng.integers(2, 4))
    if not unbounded:
        kinds = ("ball", "box", "polytope")
        dir_ab = rng.normal(size=dim)
        dir_ab /= np.linalg.norm(dir_ab)
        A = _random_base_set(rng, dim, kinds[rng.integers(0, 3)], np.zeros(dim))
        B = _random_base_set(rng, dim, kinds[rng.integers(0, 3)],
                             (3.0 + rng.random()) * dir_ab)
        return A, B, "bounded"
    style = rng.integers(0, 2)
    gap = 1.0 + rng.random()
    if style == 0:
        # parallel strips via a seeded rotation
        theta = rng.random() * np.pi
        c, s = np.cos(theta), np.sin(theta)
        R = np.eye(dim)
        R[0, 0], R[0, 1], R[1, 0], R[1, 1] = c, -s, s, c
        n = R @ np.eye(dim)[1]
        width = 0.5 + rng.random()
        A = cs.validate(cs.HPolyhedron(np.vstack([n, -n]),
                                       np.array([width, width])))
        B = cs.validate(cs.HPolyhedron(np.vstack([n, -n]),
                                       np.array([width + 2 * gap + width,
                                                 -(width + 2 * gap) + width])))
        return A, B, "strips"
    # half-strips: shared recession ray, positive attained distance
    ray = rng.normal(size=dim)
    ray /= np.linalg.norm(ray)
    perp = rng.normal(size=dim)
    perp -= (perp @ ray) * ray
    perp /= np.linalg.norm(perp)
    p0 = rng.normal(size=dim) * 0.5
    A = cs.validate(cs.MotzkinSet(np.vstack([p0, p0 + 0.7 * perp]),
                                  ray[None, :]))
    B = cs.validate(cs.MotzkinSet((p0 - gap * perp)[None, :], ray[None, :]))
    return A, B, "half-strips"


def lemma_recession_check(A, B, seed: int = 42, starts: int = 16,
                          tol: float = 1e-9) -> CheckOutcome:
    """Compare the cone-intersection boundedness verdict with a multi-start
    solution-spread verdict, and exhibit an escape direction when the
    minimal set is unbounded."""
    base = min_distance_pair(A, B)
    if base.status != "converged":
        return CheckOutcome("lemma-recession", False, None, None, 0,
                            {"skipped": "distance not attained"})
    witness = cones_intersection_witness(recession_cone(A), recession_cone(B),
                                         tol)
    cone_bounded = witness is None
    scale = 1.0 + float(np.linalg.norm(base.a) + np.linalg.norm(base.b)
                        + base.distance)
    rng = np.random.default_rng(seed)
    sols = []
    cfg_starts = []
    for _ in range(starts):
        u = rng.normal(size=A.dim)
        u /= np.linalg.norm(u)
        cfg_starts.append(100.0 * scale * u)
    for s in cfg_starts:
        rep = min_distance_pair(A, B, SolveConfig(
            start=s, tol=1e-10, max_iter=2000, exact_polish=False))
        sols.append(rep.a)
    sols = np.array(sols)
    spread = 0.0
    for i in range(len(sols)):
        for j in range(i + 1, len(sols)):
            spread = max(spread, float(np.linalg.norm(sols[i] - sols[j])))
    spread_bounded = spread <= 10.0 * scale
    escape_ok = True
    if witness is not None:
        d = witness / np.linalg.norm(witness)
        for t in (1.0, 10.0, 100.0):
            p = base.a + t * d
            slack = tol * (1 + t) * scale * 1e3
            if not cs.contains(A, p, slack):
                escape_ok = False
            alt = project(B, p).distance
            if abs(alt - base.distance) > 1e-6 * (1 + t) * scale:
                escape_ok = False
    return CheckOutcome(
        "lemma-recession", bool(cone_bounded == spread_bounded and escape_ok),
        {"cone_bounded": cone_bounded, "spread": spread},
        {"spread_threshold": 10.0 * scale},
        starts,
        {"escape_verified": escape_ok, "distance": base.distance})


def lemma_recession_suite(count: int = 100, seed: int = 42) -> CheckOutcome:
    rows = []
    matches = 0
    worst = {}
    for i in range(count):
        A, B, kind = _recession_instance(seed + 7919 * i)
        out = lemma_recession_check(A, B, seed=seed + i)
        ok = out.passed
        matches += int(ok)
        rows.append((f"{kind}-{i}", 1.0 if ok else 0.0, 1.0, ok))
        if not ok and not worst:
            worst = {"instance": i, "kind": kind, "observed": out.observed}
    return CheckOutcome("lemma-recession-suite", matches == count,
                        matches, count, count, worst, tuple(rows))


# ---------------------------------------------------------------------------
# segment-sphere exit ratio corpus
# ---------------------------------------------------------------------------

def _gamma_corpus(dim: int, trials: int, seed: int):
    rng = np.random.default_rng(seed)
    R = 2.0 + 8.0 * rng.random()
    def sphere(n):
        v = rng.normal(size=(n, dim))
        return v / np.linalg.norm(v, axis=1)[:, None]

    X = sphere(trials) * (0.5 * R) * rng.random(trials)[:, None] ** (1.0 / dim)
    Y = sphere(trials) * (0.5 * R) * rng.random(trials)[:, None] ** (1.0 / dim)
    A = sphere(trials) * (2.0 * R * (1.0 + rng.random(trials)))[:, None]
    B = A + sphere(trials) * (R * rng.random(trials))[:, None]
    for _ in range(100):
        bad = np.linalg.norm(B, axis=1) <= 2.0 * R * (1 + 1e-12)
        if not np.any(bad):
            break
        nb = int(np.sum(bad))
        B[bad] = A[bad] + sphere(nb) * (R * rng.random(nb))[:, None]
    good = np.linalg.norm(B, axis=1) > 2.0 * R
    # adversarial corner cases: a on the inner shell, x near the sphere
    e1 = np.eye(dim)[0]
    e2 = np.eye(dim)[1]
    Xc = np.array([np.zeros(dim), R * (1 - 1e-9) * e1, R * (1 - 1e-9) * e2])
    Yc = np.array([np.zeros(dim), -R * (1 - 1e-9) * e2, np.zeros(dim)])
    Ac = np.array([2 * R * (1 + 1e-9) * e1, 2 * R * (1 + 1e-9) * e2,
                   2.5 * R * e1])
    Bc = np.array([2 * R * (1 + 1e-9) * e1 + 1e-6 * e2,
                   2.05 * R * e2, 2.5 * R * e1 + R * 0.99 * e2])
    X = np.vstack([X[good], Xc])
    Y = np.vstack([Y[good], Yc])
    A = np.vstack([A[good], Ac])
    B = np.vstack([B[good], Bc])
    return X, Y, A, B, R


def lemma_gamma17_suite(trials: int = 100_000, dims=(2, 10, 50),
                        seed: int = 42) -> CheckOutcome:
    """Empirical maximum of the exit-pair ratio over the seeded corpus;
    passes iff it stays below 17."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    max_ratio = 0.0
    argmax = {}
    rows = []
    for dim in dims:
        X, Y, A, B, R = _gamma_corpus(dim, trials, seed + dim)
        ratios = gamma_ratio_batch(X, Y, A, B, R)
        k = int(np.argmax(ratios))
        rows.append((f"dim={dim}", float(ratios[k]), 17.0,
                     bool(ratios[k] <= 17.0)))
        if ratios[k] > max_ratio:
            max_ratio = float(ratios[k])
            argmax = {"dim": dim, "x": X[k], "y": Y[k], "a": A[k], "b": B[k],
                      "R": R}
    return CheckOutcome("gamma17", max_ratio <= 17.0, max_ratio, 17.0,
                        int(trials * len(dims)), argmax, tuple(rows))


# ---------------------------------------------------------------------------
# per-block inclusion lemmas
# ---------------------------------------------------------------------------

def _random_origin_polygon(rng):
    for _ in range(50):
        k = int(rng.integers(3, 7))
        pts = rng.normal(size=(k, 2))
        pts *= (0.5 + rng.random()) / np.max(np.linalg.norm(pts, axis=1))
        pts = np.vstack([pts, np.zeros(2)])
        try:
            return bg.polygon_from_points(pts)
        except InputError:
            continue
    raise InputError("failed to draw a nondegenerate polygon")


def _lemma_cap_inclusion(n: int, samples: int, seed: int):
    """Sampled inclusion of the two enlarged block cones' intersection in
    the doubled unit disc; returns (violations, worst_norm, checked)."""
    r = 1.0 / np.sqrt(n ** 2 + 1.0)
    ac, rc, ad, rd = block_cones(n)
    rng = np.random.default_rng(seed)
    Q = np.column_stack([rng.uniform(-2.5, 2.5, samples),
                         rng.uniform(-1.0, 3.0, samples)])
    # stress the cap where the inclusion is tight
    Q = np.vstack([Q, [[0.0, 2.0], [0.0, 2.5], [0.05, 2.2], [-0.05, 2.2]]])

    def projC(Z):
        return bg.enlarged_cone_project_batch(ac, rc[0], rc[1], r, Z)

    def projD(Z):
        return bg.enlarged_cone_project_batch(ad, rd[1], rd[0], r, Z)

    P, defect = bg.pair_dykstra_batch(projC, projD, Q, cycles=400)
    keep = defect <= 1e-10
    norms = np.linalg.norm(P[keep], axis=1)
    violations = int(np.sum(norms > 2.0 + 1e-9))
    worst = float(np.max(norms, initial=0.0))
    return violations, worst, int(np.sum(keep))


def _lemma_ball_split(N: int, eps: float, samples: int, seed: int):
    """Sampled inclusion of conv(∪ W_n + eps B_{2N}) in
    2 conv(∪ [W_n + sqrt(N) eps B_2]); returns (violations, worst_sum)."""
    rng = np.random.default_rng(seed)
    polys = [_random_origin_polygon(rng) for _ in range(N)]
    alph = rng.dirichlet(np.ones(N), size=samples)
    U = rng.normal(size=(samples, 2 * N))
    U /= np.linalg.norm(U, axis=1)[:, None]
    U *= rng.random(samples)[:, None] ** (1.0 / (2 * N))
    X = eps * U
    for nidx, poly in enumerate(polys):
        m = poly.vertices.shape[0]
        wcoef = rng.dirichlet(np.ones(m), size=samples)
        w = wcoef @ poly.vertices
        X[:, 2 * nidx:2 * nidx + 2] += alph[:, nidx:nidx + 1] * w
    # membership of x in 2 conv(∪ V_n) is block-separable: the per-block
    # gauges of V_n must sum to at most 2
    total = np.zeros(samples)
    rho = np.sqrt(N) * eps
    for nidx, poly in enumerate(polys):
        qn = X[:, 2 * nidx:2 * nidx + 2]
        if rho > 0:
            total += bg.scaled_sum_gauge_batch(poly, rho, qn)
        else:
            total += bg.polygon_gauge_batch(poly, qn)
    violations = int(np.sum(total > 2.0 + 1e-9))
    return violations, float(np.max(total, initial=0.0))


def _lemma_common_factor(N: int, samples: int, seed: int, identical=False):
    """Sampled inclusion of conv(∪ W_n) ∩ conv(∪ Z_n) in
    2 conv(∪ (W_n ∩ Z_n)); returns (violations, worst_sum)."""
    rng = np.random.default_rng(seed)
    Ws = [_random_origin_polygon(rng) for _ in range(N)]
    Zs = Ws if identical else [_random_origin_polygon(rng) for _ in range(N)]
    alph = rng.dirichlet(np.ones(N), size=samples)
    beta = alph if identical else rng.dirichlet(np.ones(N), size=samples)
    X = np.zeros((samples, 2 * N))
    for nidx in range(N):
        D = rng.normal(size=(samples, 2))
        D /= np.linalg.norm(D, axis=1)[:, None]
        gw = bg.polygon_gauge_batch(Ws[nidx], D)
        gz = bg.polygon_gauge_batch(Zs[nidx], D)
        with np.errstate(divide="ignore"):
            reach_w = np.where(gw > 1e-14, 1.0 / gw, 0.0)
            reach_z = np.where(gz > 1e-14, 1.0 / gz, 0.0)
        reach_w = np.where(np.isfinite(gw), reach_w, 0.0)
        reach_z = np.where(np.isfinite(gz), reach_z, 0.0)
        t = rng.random(samples) * np.minimum(alph[:, nidx] * reach_w,
                                             beta[:, nidx] * reach_z)
        X[:, 2 * nidx:2 * nidx + 2] = t[:, None] * D
    # membership of x in 2 conv(∪ (W_n ∩ Z_n)) via summed per-block gauges
    # (the gauge of an intersection is the max of the gauges)
    total = np.zeros(samples)
    for nidx in range(N):
        qn = X[:, 2 * nidx:2 * nidx + 2]
        gw = bg.polygon_gauge_batch(Ws[nidx], qn)
        gz = bg.polygon_gauge_batch(Zs[nidx], qn)
        total += np.maximum(gw, gz)
    violations = int(np.sum(total > 2.0 + 1e-9))
    return violations, float(np.max(total, initial=0.0))


def lemma_hull_inclusion_suite(N: int = 16, n_grid=(2, 3, 4, 8, 16),
                               samples: int = 10_000, seed: int = 42) -> CheckOutcome:
    """Three sampled inclusions: enlarged block-cone intersections inside the
    doubled disc, the cross-block ball split, and the doubled common factor
    of two hull intersections."""
    if N > 16:
        raise InputError("block count capped at 16")
    rows = []
    total_viol = 0
    worst = {}
    for n in n_grid:
        v, w, checked = _lemma_cap_inclusion(n, samples, seed + n)
        rows.append((f"cap-n={n}", w, 2.0 + 1e-9, v == 0))
        total_viol += v
        if v and "cap" not in worst:
            worst["cap"] = {"n": n, "worst_norm": w}
    for eps in (0.0, 0.05, 0.25):
        v, w = _lemma_ball_split(N, eps, samples, seed + 101)
        rows.append((f"split-eps={eps}", w, 2.0 + 1e-9, v == 0))
        total_viol += v
        if v and "split" not in worst:
            worst["split"] = {"eps": eps, "worst_sum": w}
    for ident in (False, True):
        v, w = _lemma_common_factor(N, samples, seed + 202, identical=ident)
        rows.append((f"common-identical={ident}", w, 2.0 + 1e-9, v == 0))
        total_viol += v
        if v and "common" not in worst:
            worst["common"] = {"identical": ident, "worst_sum": w}
    return CheckOutcome("hull-lemmas", total_viol == 0, total_viol, 0,
                        samples * (len(n_grid) + 5), worst, tuple(rows))


# ---------------------------------------------------------------------------
# stability of the minimal pair under vanishing perturbations
# ---------------------------------------------------------------------------

_K0 = 4  # dyadic schedule starts at 2^-4 so final residuals sit inside tolerances


def thm_stability_family(seed: int, steps: int = 12,
                         tol: float = 1e-3) -> CheckOutcome:
    """Random polytope/ball pair with a verified-unique minimal pair, under
    vertex-jitter and center-shift perturbations of magnitude 2^-k."""
    rng = np.random.default_rng(seed)
    rejected = 0
    for _attempt in range(20):
        dim = int(rng.integers(2, 5))
        count = int(rng.integers(dim + 3, dim + 8))
        pts = -2.0 * np.eye(dim)[0] + rng.normal(size=(count, dim)) * 0.8
        A = cs.validate(cs.MotzkinSet(pts, np.zeros((0, dim))))
        B = cs.validate(cs.Ball(2.0 * np.eye(dim)[0] + 0.2 * rng.normal(size=dim),
                                0.4 + 0.4 * rng.random()))
        base = min_distance_pair(A, B)
        if base.distance < 0.3:
            rejected += 1
            continue
        sols = []
        for _ in range(16):
            u = rng.normal(size=dim)
            s = 20.0 * u / np.linalg.norm(u)
            sols.append(min_distance_pair(A, B, SolveConfig(start=s)).a)
        spread = max(np.linalg.norm(p - q) for p in sols for q in sols)
        if spread > 1e-6:
            rejected += 1
            continue
        jitter = rng.normal(size=pts.shape)
        jitter /= np.linalg.norm(jitter, axis=1)[:, None]
        u_b = rng.normal(size=dim)
        u_b /= np.linalg.norm(u_b)
        residuals = []
        for k in range(_K0, _K0 + steps):
            h = 2.0 ** (-k)
            A_k = cs.validate(cs.MotzkinSet(pts + h * jitter,
                                            np.zeros((0, dim))))
            B_k = cs.validate(cs.Ball(B.center + h * u_b, B.radius))
            rep = min_distance_pair(A_k, B_k)
            residuals.append(float(np.linalg.norm(rep.a - base.a)))
        q = max(1, len(residuals) // 4)
        trend_ok = max(residuals[-q:]) <= max(residuals[-2 * q:-q]) + 1e-12
        final = residuals[-1]
        table = tuple((f"k={_K0 + i}", r, tol, r <= tol or i < steps - 1)
                      for i, r in enumerate(residuals))
        return CheckOutcome(
            f"thm-stability-{seed}", bool(final < tol and trend_ok),
            float(final), tol, steps,
            {"rejected_draws": rejected, "residuals": residuals,
             "distance": base.distance}, table)
    return CheckOutcome(f"thm-stability-{seed}", False, None, tol, 0,
                        {"rejected_draws": rejected,
                         "degenerate": True})


def thm_stability_suite(count: int = 100, seed: int = 42,
                        steps: int = 12) -> CheckOutcome:
    rows = []
    converged = 0
    degenerate = 0
    worst = {}
    for i in range(count):
        out = thm_stability_family(seed + 4243 * i, steps)
        if out.worst_case.get("degenerate"):
            degenerate += 1
            rows.append((f"seed-{i}", np.nan, 1e-3, False))
            continue
        converged += int(out.passed)
        rows.append((f"seed-{i}", out.observed, 1e-3, out.passed))
        if not out.passed and "first_failure" not in worst:
            worst["first_failure"] = {"instance": i, "final": out.observed}
    passed = converged >= 95 and (converged + degenerate == count)
    return CheckOutcome("thm-stability-suite", bool(passed), converged, 95,
                        count, {"degenerate_rejections": degenerate, **worst},
                        tuple(rows))


def corollary_intersection_instance(dim: int = 3, steps: int = 12) -> CheckOutcome:
    """Tangent ball and box meeting at a single point; perturbed solutions
    converge to it (axis-aligned perturbations keep the contact on-axis)."""
    e1 = np.eye(dim)[0]
    A = cs.validate(cs.Ball(np.zeros(dim), 1.0))
    lo = np.concatenate([[1.0], -np.ones(dim - 1)])
    hi = np.concatenate([[2.0], np.ones(dim - 1)])
    B = cs.validate(cs.Box(lo, hi))
    c = e1
    residuals = []
    for k in range(_K0, _K0 + steps):
        h = 2.0 ** (-k)
        A_k = cs.validate(cs.Ball(-h * e1, 1.0))
        B_k = cs.validate(cs.Box(lo + h * e1, hi + h * e1))
        rep = min_distance_pair(A_k, B_k)
        residuals.append(float(max(np.linalg.norm(rep.a - c),
                                   np.linalg.norm(rep.b - c))))
    return CheckOutcome("corollary-intersection", residuals[-1] < 1e-3,
                        residuals[-1], 1e-3, steps,
                        {"residuals": residuals})


# ---------------------------------------------------------------------------
# rotundity-driven norm convergence and its flat-face failure
# ---------------------------------------------------------------------------

def thm_lur_family(dim: int = 20, steps: int = 12, seed: int = 42) -> dict:
    """Three experiments: tangency case (intersection pinned to one point),
    positive-distance case, and the flat-face negative control where the
    solver output oscillates across a box face."""
    rng = np.random.default_rng(seed)
    e1 = np.eye(dim)[0]
    e2 = np.eye(dim)[1]
    u_c = rng.normal(size=dim)
    u_c /= np.linalg.norm(u_c)
    out = {}

    def run_case(name, offset_base):
        residuals = []
        ratios = []
        for idx, k in enumerate(range(_K0, _K0 + steps)):
            h = 2.0 ** (-k)
            sigma = 1.0 if idx % 2 == 0 else -1.0
            A_k = cs.validate(cs.Ball(h * u_c, 1.0 + sigma * h))
            B_k = cs.validate(cs.Halfspace(-e1, -(offset_base + 3 * h)))
            rep = min_distance_pair(A_k, B_k)
            res = float(np.linalg.norm(rep.a - e1))
            residuals.append(res)
            ratios.append(res / np.sqrt(h))
        return CheckOutcome(
            name, residuals[-1] < 1e-4, residuals[-1], 1e-4, steps,
            {"residuals": residuals, "max_ratio_vs_sqrt_h": max(ratios)},
            tuple((f"k={_K0 + i}", r, 1e-4, r < 1e-4 or i < steps - 1)
                  for i, r in enumerate(residuals)))

    out["tangency"] = run_case("lur-tangency", 1.0)
    out["positive-gap"] = run_case("lur-positive-gap", 2.0)

    # negative control: flat box face against an alternately tilted plane
    A = cs.validate(cs.Box(np.zeros(dim), np.ones(dim)))
    face_center = np.concatenate([[1.0], 0.5 * np.ones(dim - 1)])
    residuals = []
    osc = []
    prev = None
    for idx, k in enumerate(range(_K0, _K0 + steps)):
        h = 2.0 ** (-k)
        sigma = 1.0 if idx % 2 == 0 else -1.0
        normal = e1 + sigma * h * e2
        normal /= np.linalg.norm(normal)
        B_k = cs.validate(cs.Hyperplane(normal,
                                        float(normal @ face_center) + 1.0))
        rep = min_distance_pair(A, B_k)
        residuals.append(float(np.linalg.norm(rep.a - face_center)))
        if prev is not None:
            osc.append(float(np.linalg.norm(rep.a - prev)))
        prev = rep.a
    out["box-control"] = CheckOutcome(
        "lur-box-control", residuals[-1] > 0.1, residuals[-1], 0.1, steps,
        {"residuals": residuals, "oscillation": max(osc, default=0.0)})
    return out


# ---------------------------------------------------------------------------
# bounded-intersection clustering and its escape control
# ---------------------------------------------------------------------------

def prop_bounded_intersection_family(seed: int = 42, steps: int = 18) -> CheckOutcome:
    """Large ball and interior-overlapping box under vanishing perturbations:
    solver outputs stay bounded and settle at a common point; the companion
    escape record comes from the shifted block-cone family, where common
    points climb like 1 + n/ln(n)."""
    rng = np.random.default_rng(seed)
    dim = 3
    A = cs.validate(cs.Ball(np.zeros(dim), 3.0))
    B = cs.validate(cs.Box(0.5 * np.ones(dim), 1.5 * np.ones(dim)))
    u = rng.normal(size=dim)
    u /= np.linalg.norm(u)
    v = rng.normal(size=dim)
    v /= np.linalg.norm(v)
    pts = []
    dists = []
    for idx, k in enumerate(range(_K0, _K0 + steps)):
        h = 2.0 ** (-k)
        sigma = 1.0 if idx % 2 == 0 else -1.0
        A_k = cs.validate(cs.Ball(h * u, 3.0 + sigma * h))
        B_k = cs.validate(cs.Box(B.lower + h * v, B.upper + h * v))
        rep = min_distance_pair(A_k, B_k)
        pts.append(rep.a)
        dists.append(rep.distance)
    final = pts[-1]
    member_res = max(project(A, final).distance, project(B, final).distance)
    bounded = max(float(np.linalg.norm(p)) for p in pts) <= 4.0
    cluster = float(np.linalg.norm(pts[-1] - pts[-2]))
    passed = (max(dists) <= 1e-9 and bounded and member_res <= 1e-6
              and cluster <= 1e-4)

    heights = {}
    for n in (4, 8, 16):
        fam = example_two_cones(n, 16, shift_sign="opposite")
        e_h = np.zeros(32)
        e_h[2 * n - 1] = 1.0
        heights[n] = max_scale_in_intersection(fam.A_n, fam.B_n, e_h)
    return CheckOutcome(
        "prop-bounded-intersection", bool(passed), member_res, 1e-6, steps,
        {"max_distance": max(dists), "cluster_step": cluster,
         "escape_control_heights": heights,
         "escape_growing": heights[16] > heights[8] > heights[4]})
