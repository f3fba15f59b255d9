import itertools
import math

import numpy as np
import pytest
from scipy.optimize import linprog

from snailbudget import kernels
from snailbudget.lp import LinearProgram, simplex_feasible, solve, solve_arrays

BACKENDS = ["python"]
try:
    kernels.get_backend("cython")
    BACKENDS.append("cython")
except ImportError:
    pass


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def test_interval_feasible(backend):
    lp = LinearProgram(1).add([1], ">=", 1).add([1], "<=", 2)
    x = simplex_feasible(lp, backend=backend)
    assert x is not None and 1 - 1e-12 <= x[0] <= 2 + 1e-12


def test_empty_interval(backend):
    lp = LinearProgram(1).add([1], ">=", 2).add([1], "<=", 1)
    assert simplex_feasible(lp, backend=backend) is None


def test_contradictory_differences(backend):
    lp = LinearProgram(2).add([1, -1], ">=", 1).add([-1, 1], ">=", 1)
    assert simplex_feasible(lp, backend=backend) is None


def test_equality_and_redundant_rows(backend):
    lp = LinearProgram(2).add([1, 1], "==", 3).add([2, 2], "==", 6).add([1, 0], ">=", 1)
    x = simplex_feasible(lp, backend=backend)
    assert x is not None
    assert x[0] + x[1] == pytest.approx(3)
    assert x[0] >= 1 - 1e-12


def test_optimum_and_unbounded(backend):
    lp = LinearProgram(2, objective=(-1, -2)).add([1, 1], "<=", 4).add([1, -1], ">=", -2)
    sol = solve(lp, backend=backend)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-7)
    assert sol.x == pytest.approx([1, 3])
    lp = LinearProgram(1, objective=(-1,)).add([1], ">=", 1)
    assert solve(lp, backend=backend).status == "unbounded"


def test_degenerate_cycling_example(backend):
    # Beale's example cycles under the textbook largest-coefficient rule
    A = [
        [0.25, -60, -1 / 25, 9],
        [0.5, -90, -1 / 50, 3],
        [0, 0, 1, 0],
    ]
    sol = solve_arrays(A, [0, 0, 0], [0, 0, 1], c=[-0.75, 150, -1 / 50, 6], backend=backend)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-0.05)


def test_wrong_coefficient_count():
    with pytest.raises(ValueError):
        LinearProgram(2).add([1], ">=", 0)


@pytest.mark.parametrize("seed", range(40))
def test_random_programs_against_highs(seed, backend):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 9)), int(rng.integers(1, 7))
    A = rng.normal(size=(m, n))
    b = rng.normal(size=m)
    s = rng.integers(0, 3, size=m)
    c = rng.normal(size=n)
    sol = solve_arrays(A, s, b, c=c, backend=backend)
    ub = np.vstack([A[s == 0], -A[s == 1]])
    bub = np.concatenate([b[s == 0], -b[s == 1]])
    ref = linprog(
        c,
        A_ub=ub if bub.size else None,
        b_ub=bub if bub.size else None,
        A_eq=A[s == 2] if np.any(s == 2) else None,
        b_eq=b[s == 2] if np.any(s == 2) else None,
        bounds=[(0, None)] * n,
        method="highs",
    )
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert sol.status == expected
    if expected == "optimal":
        assert sol.objective == pytest.approx(ref.fun, abs=1e-7)
        assert np.all(A[s == 0] @ sol.x <= b[s == 0] + 1e-8)
        assert np.all(A[s == 1] @ sol.x >= b[s == 1] - 1e-8)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("seed", range(20))
def test_backends_pivot_identically(seed):
    rng = np.random.default_rng(1000 + seed)
    m, n = 12, 6
    A = rng.integers(-2, 3, size=(m, n)).astype(float)
    b = rng.integers(-3, 4, size=m).astype(float)
    s = rng.integers(0, 2, size=m)
    a = solve_arrays(A, s, b, backend="python")
    c = solve_arrays(A, s, b, backend="cython")
    assert a.status == c.status
    assert a.iterations == c.iterations
    if a.x is not None:
        assert np.array_equal(a.x, c.x)


def test_min_conversion_gap_kernels():
    freqs = np.array([4.00e9, 4.33e9, 4.81e9, 4.99e9])
    for name in BACKENDS:
        k = kernels.get_backend(name)
        assert k.min_conversion_gap(freqs) == pytest.approx(150e6, abs=1.0)
        assert math.isinf(k.min_conversion_gap(np.array([4e9, 5e9])))
    for combo in itertools.combinations([0.0, 1.0, 3.0, 7.0, 12.0], 4):
        f = np.array(combo)
        d = sorted(b - a for a, b in itertools.combinations(combo, 2))
        assert kernels.min_conversion_gap(f) == min(y - x for x, y in zip(d, d[1:]))
