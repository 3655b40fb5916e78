"""Deterministic direction fans.

Candidate searches over convex sets (support maximization, boundary probing,
diameter/excess estimation) all consume the same seeded low-discrepancy fan so
repeated runs are bit-identical.  Halton points are rotated by a seeded
Cranley-Patterson shift, pushed through an inverse-normal map, and normalized
to unit vectors.
"""

from functools import lru_cache

import numpy as np

_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229,
)


def _more_primes(count):
    primes = list(_PRIMES)
    q = primes[-1]
    while len(primes) < count:
        q += 2
        if all(q % p for p in primes if p * p <= q):
            primes.append(q)
    return primes[:count]


def _halton_column(base, count):
    out = np.empty(count)
    for i in range(count):
        f = 1.0
        r = 0.0
        n = i + 1
        while n > 0:
            f /= base
            r += f * (n % base)
            n //= base
        out[i] = r
    return out


# Acklam's rational approximation of the standard normal quantile; ~1e-9
# absolute accuracy, plenty for spreading directions.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


def _ndtri(p):
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    out = np.empty_like(p)
    lo = p < 0.02425
    hi = p > 1.0 - 0.02425
    mid = ~(lo | hi)
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        out[mid] = num * q / den
    for mask, sign in ((lo, 1.0), (hi, -1.0)):
        if np.any(mask):
            pp = p[mask] if sign > 0 else 1.0 - p[mask]
            q = np.sqrt(-2.0 * np.log(pp))
            num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
            den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
            out[mask] = sign * num / den
    return out


@lru_cache(maxsize=64)
def _fan_cached(dim, count, seed):
    if dim == 1:
        reps = (count + 1) // 2
        return np.array(([1.0] + [-1.0]) * reps)[:count].reshape(-1, 1)
    bases = _more_primes(dim)
    u = np.column_stack([_halton_column(b, count) for b in bases])
    rng = np.random.default_rng(seed)
    u = (u + rng.random(dim)) % 1.0
    g = _ndtri(u)
    norms = np.linalg.norm(g, axis=1)
    norms[norms < 1e-12] = 1.0
    return g / norms[:, None]


def direction_fan(dim, count=None, seed=42):
    """`count` unit directions in R^dim (default 64*dim), deterministic in
    (dim, count, seed).  Includes +-e_i axis directions first."""
    if count is None:
        count = 64 * dim
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    if count <= 2 * dim:
        return axes[:count].copy()
    fan = _fan_cached(dim, count - 2 * dim, seed)
    return np.vstack([axes, fan])
