"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 128 512] [--p-frac 0.25] [--repeat 20]

Prints per-call times for each kernel and for one full lag-1 test replication
(residual maker included) under both backends.
"""

import argparse
import timeit

import numpy as np

from serialcorr import _kernels_py, kernels
from serialcorr.diagnostics import RegressionData, t_tau_test
from serialcorr.linalg import compute_residual_maker
from serialcorr.montecarlo import generate_design

try:
    from serialcorr import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _best(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def bench_size(n, p, repeat):
    rng = np.random.default_rng(n)
    x = generate_design(n, p, p // 2, rng)
    rm = compute_residual_maker(x)
    g = np.ascontiguousarray(rm.r)
    e = rm.residuals(rng.normal(size=n))
    lags = [0, 1, 2, 3]
    cases = {
        "superdiag_sums": lambda m: m.superdiag_sums(g, lags),
        "shifted_column_products": lambda m: m.shifted_column_products(g, lags),
        "shifted_pair_traces": lambda m: m.shifted_pair_traces(g, lags),
        "autocovariances": lambda m: m.autocovariances(e, 3),
        "quartic_sum": lambda m: m.quartic_sum(g),
    }
    backends = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    rows = []
    for name, call in cases.items():
        times = {b: _best(lambda: call(mod), repeat) for b, mod in backends}
        rows.append((name, times))

    data = RegressionData(rng.normal(size=n), x)
    saved = kernels._impl
    full = {}
    try:
        for b, mod in backends:
            kernels._impl = mod
            full[b] = _best(lambda: t_tau_test(data, 1), max(3, repeat // 4))
    finally:
        kernels._impl = saved
    rows.append(("full lag-1 test", full))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[128, 512])
    ap.add_argument("--p-frac", type=float, default=0.25)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    if _kernels_c is None:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"active backend: {kernels.BACKEND}")
    for n in args.sizes:
        p = max(1, int(args.p_frac * n))
        print(f"\nn={n}, p={p}")
        print(f"  {'kernel':<26}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
        for name, t in bench_size(n, p, args.repeat):
            py = t["python"] * 1e3
            if "cython" in t:
                cy = t["cython"] * 1e3
                print(f"  {name:<26}{py:>12.4f}{cy:>12.4f}{py / cy:>9.2f}x")
            else:
                print(f"  {name:<26}{py:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
