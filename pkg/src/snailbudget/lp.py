"""Dense two-phase simplex for small linear programs.

All variables are non-negative. Constraints are ``a . x (<=|>=|==) b``.
The objective, when present, is minimised. Pivoting uses Bland's rule so
that solves are deterministic and cannot cycle.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels

LE, GE, EQ = "<=", ">=", "=="
_SENSE_CODE = {LE: 0, GE: 1, EQ: 2}


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    bound: float

    def __post_init__(self):
        if self.relation not in _SENSE_CODE:
            raise ValueError(f"unknown relation {self.relation!r}")


@dataclass
class LinearProgram:
    n_vars: int
    constraints: list = field(default_factory=list)
    objective: tuple | None = None

    def add(self, coeffs, relation, bound):
        coeffs = tuple(float(c) for c in coeffs)
        if len(coeffs) != self.n_vars:
            raise ValueError(f"expected {self.n_vars} coefficients, got {len(coeffs)}")
        self.constraints.append(Constraint(coeffs, relation, float(bound)))
        return self

    def arrays(self):
        m = len(self.constraints)
        A = np.zeros((m, self.n_vars))
        b = np.zeros(m)
        senses = np.zeros(m, dtype=np.intp)
        for i, con in enumerate(self.constraints):
            A[i] = con.coeffs
            b[i] = con.bound
            senses[i] = _SENSE_CODE[con.relation]
        return A, senses, b


@dataclass
class LPSolution:
    status: str  # "optimal", "infeasible", "unbounded", "iteration_limit"
    x: np.ndarray | None
    objective: float | None
    iterations: int


def solve_arrays(A, senses, b, c=None, tol=1e-9, max_iter=None, backend=None):
    """Solve ``min c.x`` subject to rows of ``A`` with sense codes 0 (<=), 1 (>=), 2 (==).

    With ``c=None`` only phase 1 runs and any feasible vertex is returned.
    ``tol`` is relative to the largest absolute entry of ``A`` and ``b``.
    """
    kern = kernels if backend is None else kernels.get_backend(backend)
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float)
    senses = np.array(senses, dtype=np.intp)
    m, n = A.shape
    if m == 0:
        x = np.zeros(n)
        if c is not None and np.any(np.asarray(c) < 0):
            return LPSolution("unbounded", None, None, 0)
        return LPSolution("optimal", x, 0.0, 0)

    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    ztol = tol * scale

    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    senses = senses.copy()
    senses[flip & (senses == 0)] = 3  # temporary marker
    senses[flip & (senses == 1)] = 0
    senses[senses == 3] = 1

    n_slack = int(np.count_nonzero(senses != 2))
    art_rows = np.nonzero(senses != 0)[0]
    n_art = art_rows.size
    width = n + n_slack + n_art
    T = np.zeros((m + 1, width + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = np.empty(m, dtype=np.intp)
    s = n
    for i in range(m):
        if senses[i] == 0:
            T[i, s] = 1.0
            basis[i] = s
            s += 1
        elif senses[i] == 1:
            T[i, s] = -1.0
            s += 1
    for k, i in enumerate(art_rows):
        T[i, n + n_slack + k] = 1.0
        basis[i] = n + n_slack + k

    if max_iter is None:
        max_iter = 50 * (m + width) + 1000
    iterations = 0

    if n_art:
        T[m, n + n_slack:width] = 1.0
        T[m] -= T[art_rows].sum(axis=0)
        status, it = kern.simplex_iterate(T, basis, n + n_slack, ztol, max_iter)
        iterations += it
        if status == 2:
            return LPSolution("iteration_limit", None, None, iterations)
        if -T[m, -1] > ztol:
            return LPSolution("infeasible", None, None, iterations)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = np.ones(m + 1, dtype=bool)
        for i in range(m):
            if basis[i] >= n + n_slack:
                cand = np.nonzero(np.abs(T[i, : n + n_slack]) > ztol)[0]
                if cand.size:
                    kern.pivot(T, i, int(cand[0]))
                    basis[i] = cand[0]
                else:
                    keep[i] = False
        T = np.ascontiguousarray(np.delete(T[keep], np.s_[n + n_slack:width], axis=1))
        basis = np.ascontiguousarray(basis[keep[:m]])
        m = T.shape[0] - 1

    if c is None:
        x = _extract(T, basis, n)
        return LPSolution("optimal", x, None, iterations)

    c = np.asarray(c, dtype=float)
    obj = np.zeros(T.shape[1])
    obj[:n] = c
    cb = np.where(basis < n, c[np.minimum(basis, n - 1)], 0.0)
    obj -= cb @ T[:m]
    T[m] = obj
    status, it = kern.simplex_iterate(T, basis, n + n_slack, ztol, max_iter)
    iterations += it
    if status == 1:
        return LPSolution("unbounded", None, None, iterations)
    if status == 2:
        return LPSolution("iteration_limit", None, None, iterations)
    x = _extract(T, basis, n)
    return LPSolution("optimal", x, float(c @ x), iterations)


def _extract(T, basis, n):
    x = np.zeros(n)
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i, -1]
    return np.maximum(x, 0.0)


def solve(lp, tol=1e-9, backend=None):
    A, senses, b = lp.arrays()
    if A.shape[0] == 0:
        A = np.zeros((0, lp.n_vars))
    return solve_arrays(A, senses, b, c=lp.objective, tol=tol, backend=backend)


def simplex_feasible(lp, tol=1e-9, backend=None):
    """Phase-1 feasibility: a feasible assignment as an array, or ``None`` if infeasible."""
    A, senses, b = lp.arrays()
    if A.shape[0] == 0:
        return np.zeros(lp.n_vars)
    sol = solve_arrays(A, senses, b, c=None, tol=tol, backend=backend)
    if sol.status != "optimal":
        return None
    return sol.x
