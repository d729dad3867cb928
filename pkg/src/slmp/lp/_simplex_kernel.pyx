# Compiled pivoting kernel of the bounded revised simplex.
# Same algorithm and outcome codes as _simplex_kernel_py.run_phase.
from libc.math cimport INFINITY, isfinite

import numpy as np

cdef enum:
    BASIC = 0
    AT_LOWER = 1
    AT_UPPER = 2
    FREE = 3

OPTIMAL, UNBOUNDED, ITER_LIMIT, REFACTOR = 0, 1, 2, 3


def run_phase(double[:, ::1] T, double[::1] cost, double[::1] lo, double[::1] up,
              double[::1] x, Py_ssize_t[::1] basis, Py_ssize_t[::1] status,
              double[:, ::1] Binv, double tol, long max_iter, long refactor_every):
    cdef Py_ssize_t m = T.shape[0], ntot = T.shape[1]
    cdef Py_ssize_t i, j, q, r, leaving
    cdef long pivots = 0
    cdef int outcome = -1
    cdef double ptol = 1e-9
    cdef double dj, direction, best, flip, th, piv, f, xb
    cdef double[::1] y = np.empty(m)
    cdef double[::1] alpha = np.empty(m)
    cdef double[::1] theta = np.empty(m)

    with nogil:
        while outcome < 0:
            if pivots >= max_iter:
                outcome = 2
                break
            if pivots >= refactor_every:
                outcome = 3
                break

            # duals y = cost_B^T Binv
            for j in range(m):
                y[j] = 0.0
            for i in range(m):
                f = cost[basis[i]]
                if f != 0.0:
                    for j in range(m):
                        y[j] += f * Binv[i, j]

            # Bland pricing: first eligible column
            q = -1
            direction = 0.0
            for j in range(ntot):
                if status[j] == BASIC or not (lo[j] < up[j]):
                    continue
                dj = cost[j]
                for i in range(m):
                    dj -= y[i] * T[i, j]
                if dj < -tol and (status[j] == AT_LOWER or status[j] == FREE):
                    q = j
                    direction = 1.0
                    break
                if dj > tol and (status[j] == AT_UPPER or status[j] == FREE):
                    q = j
                    direction = -1.0
                    break
            if q < 0:
                outcome = 0
                break

            for i in range(m):
                f = 0.0
                for j in range(m):
                    f = f + Binv[i, j] * T[j, q]
                alpha[i] = f

            best = INFINITY
            for i in range(m):
                th = INFINITY
                f = direction * alpha[i]
                xb = x[basis[i]]
                if f > ptol and isfinite(lo[basis[i]]):
                    th = xb - lo[basis[i]]
                    if th < 0.0:
                        th = 0.0
                    th = th / f
                elif f < -ptol and isfinite(up[basis[i]]):
                    th = up[basis[i]] - xb
                    if th < 0.0:
                        th = 0.0
                    th = th / -f
                theta[i] = th
                if th < best:
                    best = th

            flip = up[q] - lo[q]
            if not isfinite(best) and not isfinite(flip):
                outcome = 1
                break

            if flip <= best:
                x[q] += direction * flip
                for i in range(m):
                    x[basis[i]] -= flip * (direction * alpha[i])
                status[q] = AT_UPPER if direction > 0 else AT_LOWER
                pivots += 1
                continue

            # Bland: among tied ratios, the basic variable with the smallest index
            r = -1
            for i in range(m):
                if theta[i] <= best and (r < 0 or basis[i] < basis[r]):
                    r = i

            x[q] += direction * best
            for i in range(m):
                x[basis[i]] -= best * (direction * alpha[i])
            leaving = basis[r]
            if direction * alpha[r] > 0:
                x[leaving] = lo[leaving]
                status[leaving] = AT_LOWER
            else:
                x[leaving] = up[leaving]
                status[leaving] = AT_UPPER
            basis[r] = q
            status[q] = BASIC

            piv = alpha[r]
            for j in range(m):
                Binv[r, j] /= piv
            for i in range(m):
                if i != r and alpha[i] != 0.0:
                    f = alpha[i]
                    for j in range(m):
                        Binv[i, j] -= f * Binv[r, j]
            pivots += 1

    return outcome, pivots
