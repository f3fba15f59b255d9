"""Discrete qubit-frequency allocation.

Place ``n`` qubit frequencies inside a band, adjacent qubits at least
``delta_Q`` apart, so that the ``n(n-1)/2`` conversion frequencies (pairwise
differences) are pairwise separated by as much as possible.

The separation requirement ``|c_a - c_b| >= delta`` is disjunctive. With the
qubits ordered ascending, a conversion is a sum of consecutive gaps, so any
pair where one gap interval contains the other has a known sign and becomes
a plain linear row. The remaining pairs are resolved by depth-first
branch-and-bound over sign choices, pruned by simplex feasibility. There are
no auxiliary (big-M) variables.

Internally everything is in units of the band width with variables
``y_k = gap_k - delta_Q >= 0`` (plus an offset of the lowest qubit when SNAIL
constraints break translation invariance).
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lp import solve_arrays

LP_TOL = 1e-11


@dataclass(frozen=True)
class SnailConstraints:
    snail_freq: float
    delta_S: float | None = None
    deltaS_conv: float | None = None

    def __post_init__(self):
        for name in ("delta_S", "deltaS_conv"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class AllocationProblem:
    n: int
    band_lo: float
    band_hi: float
    delta_Q: float
    snail: SnailConstraints | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if not self.band_lo < self.band_hi:
            raise ValueError("bandwidth inverted")
        if not self.delta_Q > 0:
            raise ValueError("delta_Q must be positive")

    @property
    def width(self):
        return self.band_hi - self.band_lo


@dataclass
class SolverStats:
    branches: int = 0
    lp_solves: int = 0
    lp_iterations: int = 0
    feasibility_calls: int = 0


@dataclass
class AllocationResult:
    freqs: list
    conversions: list
    achieved_delta: float
    feasible: bool
    stats: SolverStats = field(default_factory=SolverStats)


@dataclass
class Violation:
    kind: str  # "band", "qubit_gap", "conversion_gap", "snail_gap", "snail_conversion_gap", "order"
    detail: str
    margin: float  # negative: amount by which the requirement is missed (Hz)


@dataclass
class VerificationReport:
    ok: bool
    violations: list
    min_qubit_gap: float
    min_conversion_gap: float


def conversion_frequencies(freqs):
    """All pairwise differences of a strictly increasing frequency list, ascending."""
    freqs = [float(f) for f in freqs]
    for a, b in zip(freqs, freqs[1:]):
        if not b > a:
            raise ValueError("frequencies must be strictly increasing")
    return sorted(freqs[j] - freqs[i] for i in range(len(freqs)) for j in range(i + 1, len(freqs)))


def verify_allocation(freqs, problem, delta2, tol_hz=1.0):
    """Check a frequency list against every allocation constraint.

    Deliberately shares nothing with the solver. Each missed requirement is
    returned as a :class:`Violation` carrying its (negative) margin in Hz;
    ``tol_hz`` absorbs floating-point noise only.
    """
    freqs = [float(f) for f in freqs]
    violations = []
    if len(freqs) != problem.n:
        violations.append(Violation("count", f"expected {problem.n} qubits, got {len(freqs)}", -abs(problem.n - len(freqs))))
    for i, f in enumerate(freqs):
        lo_margin = f - problem.band_lo
        hi_margin = problem.band_hi - f
        if lo_margin < -tol_hz or hi_margin < -tol_hz:
            violations.append(Violation("band", f"qubit {i} at {f:.6g} Hz outside band", min(lo_margin, hi_margin)))
    order = sorted(freqs)
    min_qgap = math.inf
    for i in range(len(order) - 1):
        gap = order[i + 1] - order[i]
        min_qgap = min(min_qgap, gap)
        if gap < problem.delta_Q - tol_hz:
            violations.append(Violation("qubit_gap", f"qubits {i},{i + 1} separated by {gap:.6g} Hz", gap - problem.delta_Q))
    convs = []
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            convs.append((order[j] - order[i], (i, j)))
    convs.sort()
    min_cgap = math.inf
    for (ca, pa), (cb, pb) in zip(convs, convs[1:]):
        gap = cb - ca
        min_cgap = min(min_cgap, gap)
        if gap < delta2 - tol_hz:
            violations.append(Violation("conversion_gap", f"conversions {pa} and {pb} separated by {gap:.6g} Hz", gap - delta2))
    snail = problem.snail
    if snail is not None:
        for i, f in enumerate(order):
            d = abs(f - snail.snail_freq)
            if snail.delta_S is not None and d < snail.delta_S - tol_hz:
                violations.append(Violation("snail_gap", f"qubit {i} within {d:.6g} Hz of SNAIL", d - snail.delta_S))
            if snail.deltaS_conv is not None:
                for c, pair in convs:
                    sep = abs(d - c)
                    if sep < snail.deltaS_conv - tol_hz:
                        violations.append(
                            Violation(
                                "snail_conversion_gap",
                                f"SNAIL-qubit {i} conversion within {sep:.6g} Hz of conversion {pair}",
                                sep - snail.deltaS_conv,
                            )
                        )
    return VerificationReport(not violations, violations, min_qgap, min_cgap)


class _Model:
    """Linear rows ``vec . x >= rhs`` in normalised units for one (problem, delta)."""

    def __init__(self, problem, delta2):
        self.problem = problem
        W = problem.width
        self.W = W
        n = problem.n
        self.n = n
        dq = problem.delta_Q / W
        self.dq = dq
        self.delta = delta2 / W
        self.has_offset = problem.snail is not None
        self.nv = (n - 1) + (1 if self.has_offset else 0)
        self.intervals = [(i, j) for i in range(n) for j in range(i + 1, n)]
        self.base_rows = []
        self.disjunctions = []
        self._build()

    # linear forms are (vec, const) meaning vec . x + const
    def _freq(self, i):
        vec = np.zeros(self.nv)
        vec[:i] = 1.0
        const = i * self.dq
        if self.has_offset:
            vec[-1] = 1.0
        return vec, const

    def _conv(self, i, j):
        vec = np.zeros(self.nv)
        vec[i:j] = 1.0
        return vec, (j - i) * self.dq

    def _row(self, form, bound):
        # form >= bound
        vec, const = form
        return vec, bound - const

    @staticmethod
    def _sub(f, g):
        return f[0] - g[0], f[1] - g[1]

    def _build(self):
        n, dq, delta = self.n, self.dq, self.delta
        rows = self.base_rows
        # band: sum(gaps) + offset <= 1
        top = np.zeros(self.nv)
        top[: n - 1] = 1.0
        if self.has_offset:
            top[-1] = 1.0
        rows.append((-top, -(1.0 - (n - 1) * dq)))
        if n < 3:
            return
        if delta > 0:
            # containment pairs: sign known, minimal difference sets only
            diff_sets = set()
            for (a, b), (c, d) in itertools.permutations(self.intervals, 2):
                if a <= c and d <= b:
                    diff_sets.add(frozenset(range(a, c)) | frozenset(range(d, b)))
            minimal = [s for s in diff_sets if not any(t < s for t in diff_sets)]
            for s in sorted(minimal, key=lambda s: (len(s), sorted(s))):
                vec = np.zeros(self.nv)
                vec[list(s)] = 1.0
                rows.append((vec, delta - len(s) * dq))
            # every qubit subset spanning i..j packs C(k,2) distinct conversions
            lower = max(dq, delta)
            for i, j in self.intervals:
                k = j - i + 1
                if k >= 3:
                    vec, const = self._conv(i, j)
                    rows.append((vec, (k * (k - 1) // 2 - 1) * delta + lower - const))
            for (a, b), (c, d) in itertools.combinations(self.intervals, 2):
                if (a <= c and d <= b) or (c <= a and b <= d):
                    continue
                fa, fb = self._conv(a, b), self._conv(c, d)
                self.disjunctions.append(
                    [[self._row(self._sub(fa, fb), delta)], [self._row(self._sub(fb, fa), delta)]]
                )
        if not self.has_offset:
            vec = np.zeros(self.nv)
            vec[0], vec[n - 2] = -1.0, 1.0  # mirror symmetry: first gap <= last gap
            rows.append((vec, 0.0))
        self._build_snail()

    def _build_snail(self):
        snail = self.problem.snail
        if snail is None:
            return
        W = self.W
        ws = (snail.snail_freq - self.problem.band_lo) / W
        s_form = (np.zeros(self.nv), ws)
        above = ws >= 1.0
        below = ws <= 0.0
        for i in range(self.n):
            fi = self._freq(i)
            up = self._sub(s_form, fi)  # snail - qubit
            down = self._sub(fi, s_form)
            if snail.delta_S is not None:
                dS = snail.delta_S / W
                if above:
                    self.base_rows.append(self._row(up, dS))
                elif below:
                    self.base_rows.append(self._row(down, dS))
                else:
                    self.disjunctions.append([[self._row(up, dS)], [self._row(down, dS)]])
            if snail.deltaS_conv is not None:
                dc = snail.deltaS_conv / W
                signs = [up] if above else [down] if below else [up, down]
                for a, b in self.intervals:
                    c = self._conv(a, b)
                    alts = []
                    for sq in signs:
                        guard = [] if len(signs) == 1 else [self._row(sq, 0.0)]
                        alts.append(guard + [self._row(self._sub(sq, c), dc)])
                        alts.append(guard + [self._row(self._sub(c, sq), dc)])
                    self.disjunctions.append(alts)

    def freqs_from(self, x):
        gaps = (x[: self.n - 1] + self.dq) * self.W
        off = x[-1] * self.W if self.has_offset else 0.0
        return self.problem.band_lo + off + np.concatenate([[0.0], np.cumsum(gaps)])


class _Disjunctions:
    """Stacked alternative rows for vectorised violation checks."""

    def __init__(self, disjunctions, nv):
        vecs, rhs, alt_start, disj_start = [], [], [], []
        self.alternatives = []
        for d in disjunctions:
            disj_start.append(len(alt_start))
            for alt in d:
                alt_start.append(len(vecs))
                self.alternatives.append(alt)
                for vec, b in alt:
                    vecs.append(vec)
                    rhs.append(b)
        self.count = len(disjunctions)
        self.R = np.array(vecs).reshape(-1, nv)
        self.rhs = np.array(rhs)
        self.alt_start = np.array(alt_start, dtype=np.intp)
        self.disj_start = np.array(disj_start, dtype=np.intp)

    def violations(self, x):
        """Per-disjunction violation (0 when some alternative holds) and per-alternative violation."""
        short = np.maximum(self.rhs - self.R @ x, 0.0)
        alt_v = np.maximum.reduceat(short, self.alt_start)
        return np.minimum.reduceat(alt_v, self.disj_start), alt_v


def _solve_rows(rows, nv, stats, objective=None):
    A = np.array([r[0] for r in rows]).reshape(-1, nv)
    b = np.array([r[1] for r in rows])
    senses = np.ones(len(rows), dtype=np.intp)
    sol = solve_arrays(A, senses, b, c=objective, tol=LP_TOL)
    if stats is not None:
        stats.lp_solves += 1
        stats.lp_iterations += sol.iterations
    return sol


def _search(model, stats, max_nodes=None):
    nv = model.nv
    if nv == 0:
        return np.zeros(0), []
    dis = _Disjunctions(model.disjunctions, nv) if model.disjunctions else None
    eps = 1e-9
    stack = [()]
    while stack:
        chosen = stack.pop()
        stats.branches += 1
        if max_nodes is not None and stats.branches > max_nodes:
            raise RuntimeError("branch-and-bound node limit reached")
        rows = list(model.base_rows)
        for a in chosen:
            rows.extend(dis.alternatives[a])
        sol = _solve_rows(rows, nv, stats)
        if sol.status != "optimal":
            continue
        x = sol.x
        if dis is None:
            return x, list(chosen)
        dv, alt_v = dis.violations(x)
        worst = int(np.argmax(dv))
        if dv[worst] <= eps:
            return x, list(chosen)
        start = dis.disj_start[worst]
        stop = dis.disj_start[worst + 1] if worst + 1 < dis.count else len(dis.alternatives)
        alts = sorted(range(start, stop), key=lambda a: (alt_v[a], a))
        # push so the least-violated alternative is explored first
        for a in reversed(alts):
            stack.append(chosen + (a,))
    return None, None


def feasible_at(problem, delta2, stats=None, max_nodes=None):
    """Frequencies satisfying every constraint at conversion separation ``delta2``, or ``None``."""
    if stats is None:
        stats = SolverStats()
    stats.feasibility_calls += 1
    if (problem.n - 1) * problem.delta_Q > problem.width * (1 + 1e-12):
        return None
    model = _Model(problem, delta2)
    x, _ = _search(model, stats, max_nodes=max_nodes)
    if x is None:
        return None
    return model.freqs_from(x)


def _polish(problem, freqs, stats):
    """Fix the conversion order of ``freqs`` and maximise the separation by LP."""
    model = _Model(problem, 0.0)
    nv = model.nv + 1  # last variable: separation
    order = sorted(model.intervals, key=lambda ij: (freqs[ij[1]] - freqs[ij[0]], ij))

    def ext(vec):
        return np.concatenate([vec, [0.0]])

    rows = [(ext(v), b) for v, b in model.base_rows]
    for p, q in zip(order, order[1:]):
        vq, cq = model._conv(*q)
        vp, cp = model._conv(*p)
        vec = ext(vq - vp)
        vec[-1] = -1.0
        rows.append((vec, cp - cq))
    if model.disjunctions:
        # SNAIL disjunctions: keep whichever alternative the witness satisfies
        x0 = _x_from_freqs(model, freqs)
        for d in model.disjunctions:
            held = min(d, key=lambda alt: max(b - v @ x0 for v, b in alt))
            rows.extend((ext(v), b) for v, b in held)
    obj = np.zeros(nv)
    obj[-1] = -1.0
    sol = _solve_rows(rows, nv, stats, objective=obj)
    if sol.status != "optimal":
        return freqs
    return model.freqs_from(sol.x[:-1])


def _x_from_freqs(model, freqs):
    gaps = np.diff(freqs) / model.W - model.dq
    x = list(gaps)
    if model.has_offset:
        x.append((freqs[0] - model.problem.band_lo) / model.W)
    return np.array(x)


def maximize_delta(problem, resolution_hz=1e6, max_nodes=None):
    """Largest conversion separation achievable for ``problem``.

    Bisection runs over integer multiples of ``resolution_hz`` so results are
    reproducible and monotone across problems; the final witness is then
    polished by an LP that keeps its conversion order and maximises the
    separation exactly.
    """
    if not resolution_hz > 0:
        raise ValueError("resolution must be positive")
    stats = SolverStats()
    n = problem.n
    base = feasible_at(problem, 0.0, stats, max_nodes)
    if base is None:
        return AllocationResult([], [], 0.0, False, stats)
    m = n * (n - 1) // 2
    if m < 2 and problem.snail is None:
        freqs = [problem.band_lo, problem.band_hi]
        return AllocationResult(freqs, conversion_frequencies(freqs), math.inf, True, stats)
    if m < 2:
        # single conversion: separation only matters against SNAIL constraints
        return _result(base, stats)
    # conversions lie in [min gap, band width]: at most width/(m-1) apart
    hi_k = int(math.floor(problem.width / (m - 1) / resolution_hz)) + 1
    lo_k = 0
    best = base
    while hi_k - lo_k > 1:
        mid = (lo_k + hi_k) // 2
        f = feasible_at(problem, mid * resolution_hz, stats, max_nodes)
        if f is None:
            hi_k = mid
        else:
            lo_k, best = mid, f
    if lo_k > 0:
        polished = _polish(problem, best, stats)
        if kernels.min_conversion_gap(np.ascontiguousarray(polished)) >= kernels.min_conversion_gap(
            np.ascontiguousarray(best)
        ) and verify_allocation(polished, problem, lo_k * resolution_hz).ok:
            best = polished
    return _result(best, stats)


def _result(freqs, stats):
    freqs = np.asarray(freqs, dtype=float)
    convs = np.sort((freqs[None, :] - freqs[:, None])[np.triu_indices(freqs.size, k=1)])
    gap = float(np.min(np.diff(convs))) if convs.size >= 2 else math.inf
    return AllocationResult([float(f) for f in freqs], [float(c) for c in convs], max(gap, 0.0), True, stats)


def result_record(result, problem, resolution_hz=None):
    """JSON-ready record for an allocation result."""
    rec = {
        "n": problem.n,
        "band_hz": [problem.band_lo, problem.band_hi],
        "min_qubit_sep_hz": problem.delta_Q,
        "feasible": result.feasible,
        "freqs_hz": result.freqs,
        "conversions_hz": result.conversions,
        "achieved_delta_hz": None if math.isinf(result.achieved_delta) else result.achieved_delta,
        "achieved_delta_unbounded": math.isinf(result.achieved_delta),
        "solver": {
            "branches": result.stats.branches,
            "lp_solves": result.stats.lp_solves,
            "lp_iterations": result.stats.lp_iterations,
            "feasibility_calls": result.stats.feasibility_calls,
        },
    }
    if resolution_hz is not None:
        rec["resolution_hz"] = resolution_hz
    if problem.snail is not None:
        rec["snail"] = {
            "snail_freq_hz": problem.snail.snail_freq,
            "delta_s_hz": problem.snail.delta_S,
            "delta_s_conv_hz": problem.snail.deltaS_conv,
        }
    return rec
