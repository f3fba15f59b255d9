"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Three workloads: random dense LPs through the simplex kernel, the minimum
conversion-gap scan, and end-to-end separation maximization (run in a
subprocess per backend, since the backend is fixed at import).
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from snailbudget import kernels
from snailbudget.lp import solve_arrays


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def _lp_batch(seed=0, count=40, m=30, n=20):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        A = rng.normal(size=(m, n))
        x0 = rng.uniform(0, 1, n)
        b = A @ x0 + rng.uniform(0.1, 1.0, m)
        out.append((A, np.zeros(m, dtype=int), b, -rng.uniform(0, 1, n)))
    return out


_E2E = """
import time
from snailbudget import kernels
from snailbudget.allocation import AllocationProblem, maximize_delta
t0 = time.perf_counter()
r = maximize_delta(AllocationProblem({n}, 4e9, 6e9, 100e6))
print(kernels.BACKEND, time.perf_counter() - t0, r.achieved_delta)
"""


def _end_to_end(n, pure):
    env = dict(os.environ)
    if pure:
        env["SNAILBUDGET_PURE_PYTHON"] = "1"
    else:
        env.pop("SNAILBUDGET_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", _E2E.format(n=n)], env=env, capture_output=True, text=True, check=True)
    backend, secs, delta = out.stdout.split()
    return backend, float(secs), float(delta)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", default="5,6", help="qubit counts for the end-to-end run")
    args = ap.parse_args(argv)

    try:
        kernels.get_backend("cython")
        backends = ["python", "cython"]
    except ImportError:
        print("compiled extension not built; timing the fallback only")
        backends = ["python"]

    lps = _lp_batch()
    freqs = np.sort(np.random.default_rng(1).uniform(4e9, 6e9, 60))
    rows = []
    for name in backends:
        mod = kernels.get_backend(name)
        t_lp = _best_of(lambda: [solve_arrays(*p, backend=name) for p in lps], args.repeat)
        t_gap = _best_of(lambda: [mod.min_conversion_gap(freqs) for _ in range(200)], args.repeat)
        rows.append((name, t_lp, t_gap))

    print(f"{'backend':<8} {'40 LPs (s)':>12} {'200 gap scans (s)':>18}")
    for name, t_lp, t_gap in rows:
        print(f"{name:<8} {t_lp:12.4f} {t_gap:18.4f}")
    if len(rows) == 2:
        print(f"speedup  {rows[0][1] / rows[1][1]:12.1f}x {rows[0][2] / rows[1][2]:17.1f}x")

    print()
    print(f"{'n':>2} {'backend':<8} {'seconds':>9} {'delta (MHz)':>12}")
    for n in (int(s) for s in args.sizes.split(",")):
        for pure in ([True, False] if len(backends) == 2 else [True]):
            backend, secs, delta = _end_to_end(n, pure)
            print(f"{n:>2} {backend:<8} {secs:9.3f} {delta / 1e6:12.3f}")


if __name__ == "__main__":
    main()
