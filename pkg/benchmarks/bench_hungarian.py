"""Compare the compiled and pure-Python assignment kernels.

Usage: python3 benchmarks/bench_hungarian.py [--sizes 50 100 200 400] [--reps 3]
"""

import argparse
import statistics
import time

import numpy as np

from donsa import hungarian


def padded_matrix(n, rng):
    # shaped like the selector's matrices: real block, dummy rows weighing A, zero dummy columns
    w = np.zeros((n, n))
    s, r = n // 2, (3 * n) // 4
    w[:s, :r] = rng.uniform(1e5, 1e6, size=(s, r))
    w[s:, :r] = 1.0 + w.sum()
    return w


def bench(backend, w, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        perm = hungarian.hungarian_solve(w, backend=backend)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), perm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()
    if hungarian._solve_compiled is None:
        raise SystemExit("compiled kernel not built; run `pip install -e .` with Cython available")

    rng = np.random.default_rng(0)
    print(f"{'kind':<8}{'n':>6}{'compiled_ms':>14}{'python_ms':>12}{'speedup':>10}  same")
    for kind in ("random", "padded"):
        for n in args.sizes:
            w = rng.uniform(0, 1e6, size=(n, n)) if kind == "random" else padded_matrix(n, rng)
            tc, pc = bench("compiled", w, args.reps)
            tp, pp = bench("python", w, args.reps)
            print(f"{kind:<8}{n:>6}{tc * 1e3:>14.2f}{tp * 1e3:>12.2f}{tp / tc:>10.1f}  "
                  f"{np.array_equal(pc, pp)}")


if __name__ == "__main__":
    main()
