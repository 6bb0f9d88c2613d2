#!/usr/bin/env python3
"""Benchmark the compiled vs pure-numpy affinity-propagation kernels.

Times full message-passing iterations (responsibility + availability with
damping) on random similarity matrices at several sizes.  Run after an
editable install:

    python3 benchmarks/bench_ap_backends.py
"""

import time

import numpy as np

from compsim import _ap_numpy

try:
    from compsim import _ap_kernel
except ImportError:
    _ap_kernel = None


def bench(kernel, S, iters):
    n = S.shape[0]
    R = np.zeros((n, n))
    A = np.zeros((n, n))
    t0 = time.perf_counter()
    for _ in range(iters):
        R = kernel.responsibility_update(S, R, A, 0.5)
        A = kernel.availability_update(R, A, 0.5)
    return time.perf_counter() - t0


def main():
    rng = np.random.default_rng(0)
    sizes = [20, 60, 120, 240, 480]
    iters = 200

    print(f"{iters} iterations per size, damping 0.5")
    print(f"{'n':>6} {'numpy [ms]':>12} {'cython [ms]':>12} {'speedup':>9}")
    for n in sizes:
        S = rng.normal(size=(n, n))
        np.fill_diagonal(S, np.median(S))
        t_np = bench(_ap_numpy, S, iters) * 1e3
        if _ap_kernel is None:
            print(f"{n:>6} {t_np:>12.2f} {'(not built)':>12} {'-':>9}")
            continue
        t_cy = bench(_ap_kernel, S, iters) * 1e3
        # sanity: both backends agree on the final messages
        r1 = np.zeros((n, n)); a1 = np.zeros((n, n))
        r2 = np.zeros((n, n)); a2 = np.zeros((n, n))
        for _ in range(5):
            r1 = _ap_numpy.responsibility_update(S, r1, a1, 0.5)
            a1 = _ap_numpy.availability_update(r1, a1, 0.5)
            r2 = _ap_kernel.responsibility_update(S, r2, a2, 0.5)
            a2 = _ap_kernel.availability_update(r2, a2, 0.5)
        assert np.allclose(r1, r2) and np.allclose(a1, a2)
        print(f"{n:>6} {t_np:>12.2f} {t_cy:>12.2f} {t_np / t_cy:>8.2f}x")


if __name__ == "__main__":
    main()
