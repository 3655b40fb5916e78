#!/usr/bin/env python3
"""Benchmark the hot kernels under both backends.

Runs itself twice in subprocesses (FEASILAB_KERNEL=numba / numpy), because
the backend is fixed at import time, and prints a side-by-side table.

    python benchmarks/bench_kernels.py            # table for both backends
    python benchmarks/bench_kernels.py --inner    # one backend (internal)
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

REPEATS = {
    "simplex_core": 200,
    "nnls_core": 400,
    "motzkin_core": 60,
    "segmented_qp_core": 40,
    "halfspace_dykstra_core": 100,
    "balls_rows_dykstra_core": 100,
}


def _workloads(rng):
    from feasilab import kernels as k

    d, m = 24, 40
    A_lp = np.vstack([rng.normal(size=(m, d)), -np.eye(d)])
    A_lp = np.hstack([A_lp, np.eye(m + d)])
    b_lp = np.abs(rng.normal(size=m + d)) + 0.5
    c_lp = np.concatenate([rng.normal(size=d), np.zeros(m + d)])

    G = rng.normal(size=(30, 18))
    y = rng.normal(size=30)

    P = rng.normal(size=(40, 64)).T  # 64-dim, 40 generator columns
    M = np.ascontiguousarray(P)
    x = rng.normal(size=64) * 3
    blocks1 = np.array([0] * 6 + [-1] * 34, dtype=np.int64)
    blocks2 = np.array([0] * 10 + [-1] * 10 + [1] * 10 + [-1] * 10,
                       dtype=np.int64)

    rows = rng.normal(size=(64, 2))
    rows /= np.linalg.norm(rows, axis=1)[:, None]
    offs = np.abs(rng.normal(size=64)) + 0.2
    q2 = rng.normal(size=2) * 8

    centers = np.zeros((1, 6))
    radii = np.array([2.0])
    rows6 = rng.normal(size=(10, 6))
    rows6 /= np.linalg.norm(rows6, axis=1)[:, None]
    offs6 = np.abs(rng.normal(size=10)) + 0.3
    q6 = rng.normal(size=6) * 5

    return {
        "simplex_core": lambda: k.simplex_core(A_lp, b_lp, c_lp, 1e-9, 10000),
        "nnls_core": lambda: k.nnls_core(G, y, 1e-10, 10000),
        "motzkin_core": lambda: k.motzkin_core(M, 6, x, 1e-10, 100000),
        "segmented_qp_core": lambda: k.segmented_qp_core(
            M, blocks2, 2, np.zeros(64), 1e-10, 100000),
        "halfspace_dykstra_core": lambda: k.halfspace_dykstra_core(
            rows, offs, q2, 1e-11, 100000),
        "balls_rows_dykstra_core": lambda: k.balls_rows_dykstra_core(
            centers, radii, rows6, offs6, q6, 1e-11, 100000),
    }


def run_inner():
    from feasilab import BACKEND

    rng = np.random.default_rng(42)
    work = _workloads(rng)
    results = {"backend": BACKEND}
    for name, fn in work.items():
        fn()  # warm (JIT compile or cache load)
        reps = REPEATS[name]
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        results[name] = (time.perf_counter() - t0) / reps
    print(json.dumps(results))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--inner", action="store_true")
    args = ap.parse_args()
    if args.inner:
        run_inner()
        return
    rows = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, FEASILAB_KERNEL=backend)
        res = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--inner"],
            env=env, capture_output=True, text=True)
        if res.returncode != 0:
            sys.stderr.write(res.stderr)
            sys.exit(1)
        rows[backend] = json.loads(res.stdout.splitlines()[-1])
    print(f"{'kernel':<26} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name in REPEATS:
        tn = rows["numba"][name]
        tp = rows["numpy"][name]
        print(f"{name:<26} {tn * 1e6:>10.1f}us {tp * 1e6:>10.1f}us "
              f"{tp / tn:>8.1f}x")


if __name__ == "__main__":
    main()
