#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the symmetric eigensolver and the 1000-step entropy trace on
random dense matrices of growing dimension, and prints a table plus the
cross-backend agreement for each case.

Usage: python3 benchmarks/bench_backends.py [--dims 200,500,1000] [--steps 1000]
"""

import argparse
import time

import numpy as np

import dentropy._kernels_py as kpy

try:
    import dentropy._kernels as kext
except ImportError:
    kext = None


def time_call(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return time.perf_counter() - t0, out


def bench_dim(n, steps, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    m = np.ascontiguousarray(m + m.T)
    rows = {}

    t_py, (w_py, _) = time_call(kpy.sym_eigh, m.copy(), 50)
    rows["eigh python"] = t_py
    if kext is not None:
        t_ext, (w_ext, _) = time_call(kext.sym_eigh, m.copy(), 50)
        rows["eigh ext"] = t_ext
        rows["eigh max|dE|"] = float(
            np.abs(np.sort(w_ext) - np.sort(w_py)).max()
        )

    # orthogonal matrix + spectrum for the trace kernel
    w, v = np.linalg.eigh(m)
    o = np.ascontiguousarray(v.T)
    a0 = np.ascontiguousarray(o[:, n // 3])
    taus = 1e7 + np.linspace(0.0, 250.0, steps)

    t_py, (s_py, _) = time_call(kpy.entropy_trace, o, w, a0, taus)
    rows["trace python"] = t_py
    if kext is not None:
        t_ext, (s_ext, _) = time_call(kext.entropy_trace, o, w, a0, taus)
        rows["trace ext"] = t_ext
        rows["trace max|dS|"] = float(np.abs(s_ext - s_py).max())
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="200,500,1000,2000")
    parser.add_argument("--steps", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    dims = [int(tok) for tok in args.dims.split(",")]

    if kext is None:
        print("note: compiled backend not built; timing the fallback only\n")

    header = f"{'dim':>6} | {'eigh ext':>9} {'eigh py':>9} {'speedup':>7} | {'trace ext':>9} {'trace py':>9} {'speedup':>7}"
    print(header)
    print("-" * len(header))
    for n in dims:
        r = bench_dim(n, args.steps, args.seed)
        if kext is not None:
            print(
                f"{n:>6} | {r['eigh ext']:>8.2f}s {r['eigh python']:>8.2f}s "
                f"{r['eigh python'] / r['eigh ext']:>6.1f}x | "
                f"{r['trace ext']:>8.2f}s {r['trace python']:>8.2f}s "
                f"{r['trace python'] / r['trace ext']:>6.1f}x"
                f"   (|dE|={r['eigh max|dE|']:.1e}, |dS|={r['trace max|dS|']:.1e})"
            )
        else:
            print(f"{n:>6} | {'-':>9} {r['eigh python']:>8.2f}s {'':>7} | "
                  f"{'-':>9} {r['trace python']:>8.2f}s")


if __name__ == "__main__":
    main()
