"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Both implementations follow the same pivoting rules so that a solve is
reproducible pivot-for-pivot whichever backend is loaded.
"""

import math

import numpy as np


def pivot(T, r, c):
    """Gauss-Jordan pivot of tableau ``T`` on entry ``(r, c)``, in place."""
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    nz = np.nonzero(col)[0]
    if nz.size:
        T[nz] -= np.outer(col[nz], T[r])
        T[nz, c] = 0.0


def simplex_iterate(T, basis, ncols, tol, max_iter):
    """Run Bland-rule primal simplex pivots on a tableau until optimal.

    ``T`` has one row per constraint plus a trailing reduced-cost row; the
    last column is the right-hand side. Only the first ``ncols`` columns may
    enter the basis. Returns ``(status, iterations)`` with status 0 optimal,
    1 unbounded, 2 iteration limit.
    """
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        neg = np.nonzero(T[m, :ncols] < -tol)[0]
        if neg.size == 0:
            return 0, it
        enter = int(neg[0])
        col = T[:m, enter]
        leave = -1
        best = math.inf
        for i in np.nonzero(col > tol)[0]:
            ratio = T[i, -1] / col[i]
            if ratio < best - tol:
                best = ratio
                leave = i
            elif ratio <= best + tol and basis[i] < basis[leave]:
                leave = i
        if leave < 0:
            return 1, it
        pivot(T, leave, enter)
        basis[leave] = enter
        it += 1
    return 2, it


def min_conversion_gap(freqs):
    """Smallest gap between sorted pairwise differences of ``freqs``; inf if fewer than two."""
    freqs = np.asarray(freqs, dtype=float)
    i, j = np.triu_indices(freqs.size, k=1)
    if i.size < 2:
        return math.inf
    conv = np.sort(freqs[j] - freqs[i])
    return float(np.min(np.diff(conv)))
