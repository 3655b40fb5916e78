"""Hot numeric kernels.

Everything in this module is plain array code decorated with
:func:`feasilab._accel.jit`: under the default backend each function is
numba-compiled in nopython mode; under ``FEASILAB_KERNEL=numpy`` the same
source runs as ordinary numpy.  These are the inner loops that dominate the
run time of the whole package (LP pivoting, active-set least squares,
projected-gradient QP, cyclic halfspace corrections), so keep them free of
Python objects.

Status codes shared by the kernels:

* 0 = success / optimal
* 1 = infeasible
* 2 = unbounded
* 3 = iteration cap reached
"""

import numpy as np

from ._accel import jit

STATUS_OK = 0
STATUS_INFEASIBLE = 1
STATUS_UNBOUNDED = 2
STATUS_ITER_CAP = 3


@jit
def _bland_pivot(T, basis, ncols_allowed, tol, max_iter):
    """Run simplex pivots on tableau T (objective in last row, rhs in last
    column) using Bland's rule.  Only columns < ncols_allowed may enter.
    Returns (status, iterations)."""
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        # entering column: smallest index with reduced cost below -tol
        enter = -1
        for j in range(ncols_allowed):
            if T[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return STATUS_OK, it
        # ratio test; ties broken by smallest basis variable index (Bland)
        leave = -1
        best = np.inf
        for i in range(m):
            aij = T[i, enter]
            if aij > 1e-11:
                ratio = T[i, T.shape[1] - 1] / aij
                if ratio < best - 1e-12 or (
                    ratio < best + 1e-12 and (leave < 0 or basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return STATUS_UNBOUNDED, it
        # pivot
        piv = T[leave, enter]
        T[leave, :] /= piv
        for i in range(T.shape[0]):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    T[i, :] -= f * T[leave, :]
        basis[leave] = enter
        it += 1
    return STATUS_ITER_CAP, it


@jit
def simplex_core(A, b, c, tol, max_iter):
    """Two-phase dense simplex for min c@x s.t. A x = b, x >= 0.

    Returns (status, x, iterations).  Bland's rule guarantees termination
    without cycling; problems here are tiny so a dense tableau is fine.
    """
    m, n = A.shape
    x = np.zeros(n)
    if m == 0:
        ok = True
        for j in range(n):
            if c[j] < -tol:
                ok = False
        if ok:
            return STATUS_OK, x, 0
        return STATUS_UNBOUNDED, x, 0

    # tableau with artificial columns: [A | I | rhs], objective row last
    T = np.zeros((m + 1, n + m + 1))
    for i in range(m):
        s = 1.0
        if b[i] < 0.0:
            s = -1.0
        for j in range(n):
            T[i, j] = s * A[i, j]
        T[i, n + i] = 1.0
        T[i, n + m] = s * b[i]
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = n + i

    # phase 1: minimize sum of artificials; price out the basis
    for j in range(n + m):
        acc = 0.0
        for i in range(m):
            acc += T[i, j]
        if j >= n:
            T[m, j] = 1.0 - acc
        else:
            T[m, j] = -acc
    acc = 0.0
    for i in range(m):
        acc += T[i, n + m]
    T[m, n + m] = -acc

    status, it1 = _bland_pivot(T, basis, n + m, tol, max_iter)
    if status == STATUS_ITER_CAP:
        return STATUS_ITER_CAP, x, it1
    phase1_obj = -T[m, n + m]
    if phase1_obj > 1e3 * tol:
        return STATUS_INFEASIBLE, x, it1

    # drive remaining artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            enter = -1
            for j in range(n):
                if abs(T[i, j]) > 1e-9:
                    enter = j
                    break
            if enter >= 0:
                piv = T[i, enter]
                T[i, :] /= piv
                for k in range(T.shape[0]):
                    if k != i:
                        f = T[k, enter]
                        if f != 0.0:
                            T[k, :] -= f * T[i, :]
                basis[i] = enter

    # phase 2 objective: reduced costs of c over the current basis
    for j in range(n + m + 1):
        T[m, j] = 0.0
    for j in range(n):
        T[m, j] = c[j]
    for i in range(m):
        bj = basis[i]
        if bj < n:
            cb = c[bj]
            if cb != 0.0:
                T[m, :] -= cb * T[i, :]
    # freeze artificial columns so they never re-enter
    status, it2 = _bland_pivot(T, basis, n, tol, max_iter - it1)

    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, n + m]
    return status, x, it1 + it2


@jit
def nnls_core(G, y, tol, max_iter):
    """Lawson-Hanson active-set NNLS: min ||G lam - y||, lam >= 0.

    Returns (lam, status, iterations).
    """
    m, n = G.shape
    lam = np.zeros(n)
    passive = np.zeros(n, dtype=np.bool_)
    resid = y.copy()
    w = G.T @ resid
    it = 0
    done = False
    while it < max_iter:
        it += 1
        # most violated dual among active constraints
        best = tol
        jbest = -1
        for j in range(n):
            if not passive[j] and w[j] > best:
                best = w[j]
                jbest = j
        if jbest < 0:
            done = True
            break
        passive[jbest] = True
        inner_ok = False
        while it < max_iter:
            k = 0
            for j in range(n):
                if passive[j]:
                    k += 1
            idx = np.empty(k, dtype=np.int64)
            t = 0
            for j in range(n):
                if passive[j]:
                    idx[t] = j
                    t += 1
            Gp = np.empty((m, k))
            for t in range(k):
                Gp[:, t] = G[:, idx[t]]
            z, _, _, _ = np.linalg.lstsq(Gp, y.copy())
            zmin = np.inf
            for t in range(k):
                if z[t] < zmin:
                    zmin = z[t]
            if zmin > 1e-12:
                lam[:] = 0.0
                for t in range(k):
                    lam[idx[t]] = z[t]
                inner_ok = True
                break
            # step toward z until a passive coefficient hits zero
            alpha = np.inf
            for t in range(k):
                if z[t] <= 1e-12:
                    lj = lam[idx[t]]
                    den = lj - z[t]
                    if den > 1e-300:
                        r = lj / den
                        if r < alpha:
                            alpha = r
            if not np.isfinite(alpha):
                alpha = 0.0
            for t in range(k):
                j = idx[t]
                lam[j] = lam[j] + alpha * (z[t] - lam[j])
                if lam[j] <= 1e-11:
                    lam[j] = 0.0
                    passive[j] = False
            it += 1
        if not inner_ok:
            return lam, STATUS_ITER_CAP, it
        resid = y - G @ lam
        w = G.T @ resid
    if not done:
        return lam, STATUS_ITER_CAP, it
    return lam, STATUS_OK, it


@jit
def simplex_project_core(v):
    """Euclidean projection onto the probability simplex (sort-based)."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = -1
    for j in range(n):
        if u[j] - (css[j] - 1.0) / (j + 1.0) > 0.0:
            rho = j
    theta = (css[rho] - 1.0) / (rho + 1.0)
    out = v - theta
    for i in range(n):
        if out[i] < 0.0:
            out[i] = 0.0
    return out


@jit
def power_sqnorm(M, iters):
    """Upper-ish estimate of the squared spectral norm via power iteration."""
    n = M.shape[1]
    v = np.ones(n) / np.sqrt(n)
    lam = 1.0
    for _ in range(iters):
        w = M.T @ (M @ v)
        lam = np.sqrt(w @ w)
        if lam <= 1e-300:
            return 1.0
        v = w / lam
    return 1.02 * lam + 1e-12


@jit
def _segmented_kkt(M, col_block, n_blocks, theta, x):
    """KKT/variational residual of theta for min ||M theta - x||^2 where the
    columns of each block b >= 0 carry a sum-to-one constraint and columns
    with block -1 are merely nonnegative.  Returns (residual, worst_index)."""
    g = M @ theta - x
    d = M.T @ g
    K = M.shape[1]
    nus = np.full(n_blocks, np.inf)
    for i in range(K):
        b = col_block[i]
        if b >= 0 and d[i] < nus[b]:
            nus[b] = d[i]
    worst = -1
    res = 0.0
    for i in range(K):
        b = col_block[i]
        if b >= 0:
            v = nus[b] - d[i]
            if theta[i] > 1e-10:
                a = d[i] - nus[b]
                if a > v:
                    v = a
        else:
            v = -d[i]
            if theta[i] > 1e-10:
                a = d[i]
                if a > v:
                    v = a
        if v > res:
            res = v
            worst = i
    return res, worst


@jit
def segmented_qp_core(M, col_block, n_blocks, x, tol, max_iter):
    """min ||M theta - x||^2 with per-block simplex constraints.

    ``col_block[j]`` assigns column j either to a sum-to-one block (ids
    0..n_blocks-1) or to the free nonnegative pool (id -1).  Projected
    gradient with a 1/L step identifies a support, then an active-set polish
    (equality-constrained least squares on the support) drives the KKT
    residual to machine level.  One block of points plus rays is the nearest
    point on conv(points)+cone(rays); two blocks give the minimal-distance
    pair of two such sets.

    Returns (theta, kkt_residual, iterations, status).
    """
    d, K = M.shape
    theta = np.zeros(K)
    for b in range(n_blocks):
        for j in range(K):
            if col_block[j] == b:
                theta[j] = 1.0
                break
    if K == 1:
        res, _ = _segmented_kkt(M, col_block, n_blocks, theta, x)
        return theta, res, 0, STATUS_OK

    L = power_sqnorm(M, 50)
    step = 1.0 / L
    it = 0
    pg_budget = 300
    if pg_budget > max_iter:
        pg_budget = max_iter
    while it < pg_budget:
        it += 1
        grad = M.T @ (M @ theta - x)
        raw = theta - step * grad
        for b in range(n_blocks):
            cnt = 0
            for j in range(K):
                if col_block[j] == b:
                    cnt += 1
            sub = np.empty(cnt)
            t = 0
            for j in range(K):
                if col_block[j] == b:
                    sub[t] = raw[j]
                    t += 1
            sub = simplex_project_core(sub)
            t = 0
            for j in range(K):
                if col_block[j] == b:
                    theta[j] = sub[t]
                    t += 1
        for j in range(K):
            if col_block[j] < 0:
                theta[j] = raw[j] if raw[j] > 0.0 else 0.0
        if it % 25 == 0:
            res, _ = _segmented_kkt(M, col_block, n_blocks, theta, x)
            if res <= 0.01 * tol:
                return theta, res, it, STATUS_OK

    # active-set polish
    inS = np.zeros(K, dtype=np.bool_)
    for j in range(K):
        if theta[j] > 1e-10:
            inS[j] = True
    anchor = np.full(n_blocks, -1, dtype=np.int64)
    for b in range(n_blocks):
        best = -1.0
        for j in range(K):
            if col_block[j] == b and theta[j] > best:
                best = theta[j]
                anchor[b] = j
        inS[anchor[b]] = True

    cap = 40 * K + 200
    polish = 0
    while polish < cap and it < max_iter:
        polish += 1
        it += 1
        k = 0
        for j in range(K):
            if inS[j]:
                k += 1
        idx = np.empty(k, dtype=np.int64)
        t = 0
        for j in range(K):
            if inS[j]:
                idx[t] = j
                t += 1
        Ms = np.empty((d, k))
        for t in range(k):
            Ms[:, t] = M[:, idx[t]]
        # KKT system: stationarity plus one sum-to-one row per block
        nb = n_blocks
        Kmat = np.zeros((k + nb, k + nb))
        Kmat[:k, :k] = Ms.T @ Ms
        rhs = np.zeros(k + nb)
        rhs[:k] = Ms.T @ x
        for t in range(k):
            b = col_block[idx[t]]
            if b >= 0:
                Kmat[t, k + b] = 1.0
                Kmat[k + b, t] = 1.0
        for b in range(nb):
            rhs[k + b] = 1.0
        sol, _, _, _ = np.linalg.lstsq(Kmat, rhs)
        ustar = sol[:k]
        neg = False
        for t in range(k):
            if ustar[t] < -1e-12:
                neg = True
        if neg:
            alpha = 1.0
            drop = -1
            for t in range(k):
                if ustar[t] < -1e-12:
                    cur = theta[idx[t]]
                    den = cur - ustar[t]
                    if den > 1e-300:
                        r = cur / den
                        if r < alpha:
                            alpha = r
                            drop = t
            for t in range(k):
                j = idx[t]
                theta[j] = theta[j] + alpha * (ustar[t] - theta[j])
            if drop >= 0:
                theta[idx[drop]] = 0.0
                inS[idx[drop]] = False
            for t in range(k):
                j = idx[t]
                if theta[j] <= 1e-13:
                    theta[j] = 0.0
                    inS[j] = False
            # a sum-to-one block cannot empty out along a feasible segment,
            # but guard against cleanup-threshold accidents
            for b in range(nb):
                has = False
                for j in range(K):
                    if col_block[j] == b and inS[j]:
                        has = True
                if not has:
                    inS[anchor[b]] = True
            continue
        for j in range(K):
            if not inS[j]:
                theta[j] = 0.0
        for t in range(k):
            theta[idx[t]] = ustar[t] if ustar[t] > 0.0 else 0.0
        res, _ = _segmented_kkt(M, col_block, n_blocks, theta, x)
        if res <= tol:
            return theta, res, it, STATUS_OK
        # entering column: most violated dual among columns OUTSIDE the
        # support (support stationarity already holds via the KKT solve;
        # the block multipliers are sol[k..k+nb-1])
        duals = M.T @ (M @ theta - x)
        enter = -1
        best = 1e-14
        for j in range(K):
            if inS[j]:
                continue
            b = col_block[j]
            viol = (sol[k + b] - duals[j]) if b >= 0 else -duals[j]
            if viol > best:
                best = viol
                enter = j
        if enter >= 0:
            inS[enter] = True
        else:
            # no improvable column outside the support: residual is due to
            # numerical degeneracy of the KKT solve
            return theta, res, it, STATUS_OK
    res, _ = _segmented_kkt(M, col_block, n_blocks, theta, x)
    return theta, res, it, STATUS_ITER_CAP


@jit
def motzkin_core(M, n_pts, x, tol, max_iter):
    """Nearest point of conv(points) + cone(rays) to x; columns
    0..n_pts-1 of M are the points, the rest are rays."""
    K = M.shape[1]
    col_block = np.empty(K, dtype=np.int64)
    for j in range(K):
        col_block[j] = 0 if j < n_pts else -1
    return segmented_qp_core(M, col_block, 1, x, tol, max_iter)


@jit
def balls_rows_dykstra_core(centers, radii, An, bn, x, tol, max_iter):
    """Dykstra over a composite of balls and halfspace rows (a_i unit).

    Covers slices (ball ∩ halfspace), box/polyhedron truncations by a ball,
    and similar mixtures without Python-level projection dispatch.
    Returns (p, cycles, increment, max_defect).
    """
    kb = centers.shape[0]
    m = An.shape[0]
    d = x.shape[0]
    p = x.copy()
    corr = np.zeros((kb + m, d))
    cycles = 0
    inc = np.inf
    defect = np.inf
    while cycles < max_iter:
        cycles += 1
        prev = p.copy()
        for i in range(kb):
            z = p + corr[i]
            g = z - centers[i]
            dist = np.sqrt(g @ g)
            if dist > radii[i]:
                p = centers[i] + (radii[i] / dist) * g
            else:
                p = z
            corr[i] = z - p
        for i in range(m):
            z = p + corr[kb + i]
            v = An[i] @ z - bn[i]
            if v > 0.0:
                p = z - v * An[i]
                corr[kb + i] = z - p
            else:
                p = z
                corr[kb + i, :] = 0.0
        diff = p - prev
        inc = np.sqrt(diff @ diff)
        if inc <= tol:
            defect = 0.0
            for i in range(kb):
                g = p - centers[i]
                v = np.sqrt(g @ g) - radii[i]
                if v > defect:
                    defect = v
            for i in range(m):
                v = An[i] @ p - bn[i]
                if v > defect:
                    defect = v
            if defect <= 10.0 * tol:
                break
    return p, cycles, inc, defect


@jit
def halfspace_dykstra_core(An, bn, x, tol, max_iter):
    """Dykstra's algorithm over halfspace rows {a_i . x <= b_i} (a_i unit).

    Converges to the exact Euclidean projection onto the polyhedron.
    Returns (p, cycles, increment, max_violation).
    """
    m, d = An.shape
    p = x.copy()
    corr = np.zeros((m, d))
    inc = np.inf
    viol = np.inf
    cycles = 0
    while cycles < max_iter:
        cycles += 1
        prev = p.copy()
        for i in range(m):
            z = p + corr[i]
            v = An[i] @ z - bn[i]
            if v > 0.0:
                p = z - v * An[i]
                corr[i] = z - p
            else:
                p = z
                corr[i, :] = 0.0
        diff = p - prev
        inc = np.sqrt(diff @ diff)
        viol = 0.0
        for i in range(m):
            v = An[i] @ p - bn[i]
            if v > viol:
                viol = v
        if inc <= tol and viol <= tol:
            break
    return p, cycles, inc, viol
