"""Compare the numba and pure-numpy kernels on series and pair-sum workloads.

Usage: python benchmarks/bench_kernels.py [--repeat 5]

Run with GAUSSQFI_DISABLE_NUMBA=1 to confirm the fallback path is what the
library uses when numba is absent; both kernels are timed either way when
numba is importable.
"""

import argparse
import time

import numpy as np

from gaussqfi import _kernels
from gaussqfi._jit import HAS_NUMBA
from gaussqfi.core import k_matrix
from gaussqfi.sampling import random_state


def _best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def series_case(n, order, rng):
    st = random_state(n, rng, lam_range=(1.001, 1.01))
    k = k_matrix(n)
    a = k @ st.covariance
    h = rng.normal(size=a.shape) + 1j * rng.normal(size=a.shape)
    a_dot = k @ (h + h.conj().T)
    return np.linalg.inv(a), a_dot, order


def pair_case(n, rng):
    lam = rng.uniform(1.0, 3.0, n)
    pure = lam < 1.2
    lam[pure] = 1.0
    return lam, rng.random((n, n)), rng.random((n, n)), pure


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"numba available: {HAS_NUMBA}; library backend: {_kernels.BACKEND}")
    print(f"{'kernel':<28}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max rel diff':>14}")

    cases = [
        ("series N=2 M=100000", _kernels.series_partial_sums_numpy, _kernels.series_partial_sums_jit,
         series_case(2, 100_000, rng)),
        ("series N=4 M=20000", _kernels.series_partial_sums_numpy, _kernels.series_partial_sums_jit,
         series_case(4, 20_000, rng)),
        ("pair sums N=400", _kernels.pair_weighted_sums_numpy, _kernels.pair_weighted_sums_jit,
         pair_case(400, rng)),
    ]
    for name, ref, fast, inputs in cases:
        out_ref = np.asarray(ref(*inputs))
        t_ref = _best_of(lambda: ref(*inputs), args.repeat)
        if HAS_NUMBA:
            fast(*inputs)  # compile outside the timing
            out_fast = np.asarray(fast(*inputs))
            t_fast = _best_of(lambda: fast(*inputs), args.repeat)
            diff = float(np.max(np.abs(out_ref - out_fast)) / max(1.0, np.max(np.abs(out_ref))))
            print(f"{name:<28}{t_ref:>12.4g}{t_fast:>12.4g}{t_ref / t_fast:>10.1f}{diff:>14.3g}")
        else:
            print(f"{name:<28}{t_ref:>12.4g}{'-':>12}{'-':>10}{'-':>14}")


if __name__ == "__main__":
    main()
