"""Command-line front end.

Subcommands: ``solve`` (minimal-distance pair), ``metrics`` (excess /
Hausdorff / truncated grids), ``analyze`` (recession, boundedness, slices,
rotundity, exposedness), ``example`` (the built-in family tables), and
``check`` (the verification suites).  Outputs are JSON or RFC-4180-style CSV
with LF line endings; identical arguments and seed produce byte-identical
bytes.  Exit status: 0 on success with all requested checks passing, 1 on a
numerical failure or failed check, 2 on usage errors.
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import convex_sets as cs
from . import families
from . import suites
from .convergence_metrics import (MetricConfig, excess, excess_truncated,
                                  hausdorff, hausdorff_truncated)
from .distance_solver import SolveConfig, min_distance_pair, piecewise_min_distance
from .errors import FeasilabError, NumericalFailureError, ParseError
from .variational_geometry import (cone_is_trivial, lur_modulus,
                                   minimal_set_bounded, recession_cone,
                                   slice_diameter, slice_set,
                                   strongly_exposes_check)


def parse_set_json(text: str):
    """Parse one set description from JSON text (schema in the README)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"/offset{e.pos}") from None
    return cs.set_from_obj(obj)


def _load_set(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_set_json(fh.read())


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, np.ndarray):
        return " ".join(repr(float(v)) for v in x.ravel())
    return str(x)


def _emit(args, payload=None, header=None, rows=None):
    """Write JSON payload or CSV rows to --out (default stdout)."""
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_vector(text):
    return np.array([float(v) for v in text.split(",")])


def _parse_range(text):
    """'2..8' or '2,3,5'."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def _bracket_rows(label, N, br):
    return [(label, N if N is not None else "", br.lower,
             "inf" if br.unbounded else br.upper,
             "" if br.witness is None else _fmt(np.asarray(br.witness)))]


def _cmd_solve(args):
    A = _load_set(args.a)
    B = _load_set(args.b)
    cfg = SolveConfig(tol=args.tol, max_iter=args.max_iter,
                      start=_parse_vector(args.start) if args.start else None,
                      keep_trace=not args.no_trace)
    if isinstance(A, cs.PiecewiseSet) or isinstance(B, cs.PiecewiseSet):
        rep = piecewise_min_distance(A, B, cfg)
        payload = rep.report.to_obj(include_trace=not args.no_trace)
        payload["winning_pieces"] = list(rep.winner)
        payload["partial"] = rep.partial
    else:
        payload = min_distance_pair(A, B, cfg).to_obj(
            include_trace=not args.no_trace)
    header = ["field", "value"]
    rows = [(k, _fmt(np.asarray(v)) if isinstance(v, list) else _fmt(v))
            for k, v in payload.items()]
    _emit(args, payload, header, rows)
    return 0


def _cmd_metrics(args):
    A = _load_set(args.a)
    B = _load_set(args.b)
    cfg = MetricConfig(seed=args.seed, directions=args.directions)
    rows = []
    payload = {"metric": args.kind}
    if args.kind == "aw":
        grid = [int(v) for v in args.n_grid.split(",")]
        payload["grid"] = []
        for N in grid:
            br = hausdorff_truncated(A, B, N, cfg)
            payload["grid"].append({"N": N, **br.to_obj()})
            rows += _bracket_rows("h_N", N, br)
    else:
        if args.truncate is not None:
            fn = excess_truncated if args.kind == "excess" else hausdorff_truncated
            br = fn(A, B, args.truncate, cfg)
            rows += _bracket_rows(args.kind, args.truncate, br)
        else:
            fn = excess if args.kind == "excess" else hausdorff
            br = fn(A, B, cfg)
            rows += _bracket_rows(args.kind, None, br)
        payload.update(br.to_obj())
    _emit(args, payload, ["metric", "N", "lower", "upper", "witness"], rows)
    return 0


def _cone_obj(cone):
    if cone.is_vform:
        return {"form": "generators",
                "generators": [[float(v) for v in g] for g in cone.generators]}
    return {"form": "halfspaces",
            "halfspaces": [[float(v) for v in h] for h in cone.halfspaces]}


def _cmd_analyze(args):
    if args.analysis == "recession":
        cone = recession_cone(_load_set(args.set))
        payload = {**_cone_obj(cone), "trivial": cone_is_trivial(cone)}
        rows = [("trivial", payload["trivial"], "", "")]
        _emit(args, payload, ["field", "value", "", ""], rows)
        return 0
    if args.analysis == "bounded-min":
        out = minimal_set_bounded(_load_set(args.a), _load_set(args.b))
        _emit(args, {"minimal_set_bounded": bool(out)},
              ["field", "value"], [("minimal_set_bounded", out)])
        return 0
    if args.analysis == "slice":
        K = _load_set(args.set)
        f = _parse_vector(args.f)
        sl = slice_set(f, args.alpha, K)
        br = slice_diameter(f, args.alpha, K,
                            MetricConfig(seed=args.seed))
        payload = {"slice": cs.set_to_obj(sl), "diameter": br.to_obj()}
        _emit(args, payload, ["metric", "N", "lower", "upper", "witness"],
              _bracket_rows("slice-diameter", None, br))
        return 0
    if args.analysis == "lur":
        A = _load_set(args.set)
        a = _parse_vector(args.point)
        eps = [float(v) for v in args.eps_grid.split(",")]
        prof = lur_modulus(A, a, eps, seed=args.seed)
        payload = {"eps": list(map(float, prof.eps_grid)),
                   "delta": list(map(float, prof.delta_estimates)),
                   "samples": list(map(int, prof.sample_counts))}
        rows = [(e, d, c, "") for e, d, c in
                zip(prof.eps_grid, prof.delta_estimates, prof.sample_counts)]
        _emit(args, payload, ["eps", "delta", "samples", ""], rows)
        return 0
    # expose
    A = _load_set(args.set)
    f = _parse_vector(args.f)
    a = _parse_vector(args.point)
    grid = [float(v) for v in args.alpha_grid.split(",")]
    rep = strongly_exposes_check(f, a, A, grid,
                                 cfg=MetricConfig(seed=args.seed))
    payload = {"exposes": bool(rep.exposes), "flag": rep.flag,
               "alphas": list(map(float, rep.alphas)),
               "diameter_uppers": list(map(float, rep.diameter_uppers))}
    rows = [(al, du, "", "") for al, du in zip(rep.alphas, rep.diameter_uppers)]
    _emit(args, payload, ["alpha", "diameter_upper", "", ""], rows)
    return 0


def _cmd_example(args):
    ns = _parse_range(args.n_range)
    rows = []
    payload = {"family": args.family, "rows": []}
    ok = True
    for n in ns:
        if args.family == "nonconvex":
            fam = families.example_nonconvex(n)
            rep = piecewise_min_distance(fam.A_n, fam.B_n).report
        elif args.family == "hulls":
            fam = families.example_hulls(n)
            rep = min_distance_pair(fam.A_n, fam.B_n)
        elif args.family == "cone-hyperplane":
            K = args.truncation or 64
            fam = families.example_cone_hyperplane(n, K)
            rep = min_distance_pair(fam.A_n, fam.B_n)
        else:
            N = args.truncation or 16
            fam = families.example_two_cones(n, N, shift_sign=args.shift_sign)
            rep = min_distance_pair(fam.A_n, fam.B_n)
        expected = fam.expected.get("distance", 0.0) or 0.0
        passed = abs(rep.distance - expected) <= 1e-6
        ok = ok and passed
        rows.append((n, rep.distance, expected, passed))
        payload["rows"].append({"n": n, "distance": rep.distance,
                                "expected": expected, "passed": bool(passed)})
    _emit(args, payload, ["n", "distance", "expected", "passed"], rows)
    return 0 if ok else 1


def _cmd_check(args):
    name = args.suite
    if name == "fact2":
        out = suites.fact2_suite(count=args.trials or 200, seed=args.seed)
    elif name == "lemma-recession":
        out = suites.lemma_recession_suite(count=args.trials or 100,
                                           seed=args.seed)
    elif name == "gamma17":
        dims = tuple(int(v) for v in args.dims.split(","))
        out = suites.lemma_gamma17_suite(trials=args.trials or 100_000,
                                         dims=dims, seed=args.seed)
    elif name == "hull-lemmas":
        out = suites.lemma_hull_inclusion_suite(
            N=args.truncation or 16, samples=args.samples or 10_000,
            seed=args.seed)
    elif name == "thm-stability":
        out = suites.thm_stability_suite(count=args.trials or 100,
                                         seed=args.seed, steps=args.steps)
    elif name == "thm-lur":
        cases = suites.thm_lur_family(dim=args.dim, steps=args.steps,
                                      seed=args.seed)
        passed = all(c.passed for c in cases.values())
        payload = {k: v.to_obj() for k, v in cases.items()}
        rows = [(k, v.observed, v.bound, v.passed) for k, v in cases.items()]
        _emit(args, payload, ["case", "observed", "bound", "passed"], rows)
        return 0 if passed else 1
    else:
        out = suites.prop_bounded_intersection_family(seed=args.seed)
    rows = out.table or [(out.name, _fmt_observed(out.observed), out.bound,
                          out.passed)]
    _emit(args, out.to_obj(), ["trial", "observed", "bound", "passed"], rows)
    return 0 if out.passed else 1


def _fmt_observed(obs):
    if isinstance(obs, dict):
        return json.dumps(obs, default=str, sort_keys=True)
    return obs


def build_parser():
    default_seed = int(os.environ.get("FEASILAB_SEED", "42"))
    p = argparse.ArgumentParser(prog="feasilab",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=default_seed)

    sp = sub.add_parser("solve", help="minimal-distance pair of two sets")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--max-iter", type=int, default=20_000)
    sp.add_argument("--start", default=None, help="comma-separated start point")
    sp.add_argument("--no-trace", action="store_true")
    common(sp)
    sp.set_defaults(fn=_cmd_solve)

    sp = sub.add_parser("metrics", help="set-distance brackets")
    sp.add_argument("kind", choices=("hausdorff", "excess", "aw"))
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--N-grid", dest="n_grid", default="1,2,4,8,16")
    sp.add_argument("--truncate", type=float, default=None)
    sp.add_argument("--directions", type=int, default=None)
    common(sp)
    sp.set_defaults(fn=_cmd_metrics)

    sp = sub.add_parser("analyze", help="geometry analyses")
    sp.add_argument("analysis", choices=("recession", "bounded-min", "slice",
                                         "lur", "expose"))
    sp.add_argument("--set", default=None)
    sp.add_argument("--a", default=None)
    sp.add_argument("--b", default=None)
    sp.add_argument("--f", default=None, help="functional, comma-separated")
    sp.add_argument("--point", default=None)
    sp.add_argument("--alpha", type=float, default=0.1)
    sp.add_argument("--alpha-grid", dest="alpha_grid", default="0.1,0.05,0.02")
    sp.add_argument("--eps-grid", dest="eps_grid", default="0.25,0.5,1.0")
    common(sp)
    sp.set_defaults(fn=_cmd_analyze)

    sp = sub.add_parser("example", help="built-in family tables")
    sp.add_argument("family", choices=("nonconvex", "hulls", "cone-hyperplane",
                                       "two-cones"))
    sp.add_argument("--n-range", dest="n_range", default="2..8")
    sp.add_argument("--truncation", type=int, default=None)
    sp.add_argument("--shift-sign", dest="shift_sign",
                    choices=("literal", "opposite"), default="opposite")
    common(sp)
    sp.set_defaults(fn=_cmd_example)

    sp = sub.add_parser("check", help="verification suites")
    sp.add_argument("suite", choices=("fact2", "lemma-recession", "gamma17",
                                      "hull-lemmas", "thm-stability",
                                      "thm-lur", "prop-bounded"))
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--dims", default="2,10,50")
    sp.add_argument("--dim", type=int, default=20)
    sp.add_argument("--steps", type=int, default=12)
    sp.add_argument("--truncation", type=int, default=None)
    common(sp)
    sp.set_defaults(fn=_cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NumericalFailureError as e:
        diag = {"error": "numerical-failure", "message": str(e),
                "residual": getattr(e, "residual", None)}
        sys.stdout.write(json.dumps(diag, indent=2, default=str) + "\n")
        return 1
    except FeasilabError as e:
        diag = {"error": type(e).__name__, "message": str(e)}
        sys.stdout.write(json.dumps(diag, indent=2, default=str) + "\n")
        return 1
    except FileNotFoundError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
