"""Benchmark the JIT-compiled kernels against the pure-numpy fallbacks.

Run as:  python3 benchmarks/benchmark_kernels.py

Times the Gray-code permanent and the Gurvits product kernel on random
complex matrices of increasing size, for both backends when available.
Results are printed as a plain table; the two paths must agree numerically,
which is asserted for every case.
"""

import time

import numpy as np

from binned_bosons import active_backend
from binned_bosons._kernels import _glynn_permanent_numpy, _gurvits_products_numpy

try:
    from binned_bosons._kernels import _glynn_permanent_numba, _gurvits_products_numba

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def best_of(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    rng = np.random.default_rng(0)
    print(f"active backend: {active_backend()}  (numba kernels available: {HAVE_NUMBA})")

    print("\nGray-code permanent (seconds, best of 5)")
    header = f"{'n':>4} {'numpy':>12}" + (f" {'numba':>12} {'speedup':>8}" if HAVE_NUMBA else "")
    print(header)
    for n in (6, 8, 10, 12, 14, 16):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if HAVE_NUMBA:
            _glynn_permanent_numba(a)  # compile outside the timing
            t_nb, v_nb = best_of(_glynn_permanent_numba, a)
        t_np, v_np = best_of(_glynn_permanent_numpy, a)
        if HAVE_NUMBA:
            assert abs(v_np - v_nb) <= 1e-8 * max(1.0, abs(v_np))
            print(f"{n:>4} {t_np:>12.6f} {t_nb:>12.6f} {t_np / t_nb:>8.1f}x")
        else:
            print(f"{n:>4} {t_np:>12.6f}")

    print("\nGurvits products, 20000 sign vectors (seconds, best of 5)")
    print(header)
    for n in (4, 8, 12, 16):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        signs = rng.integers(0, 2, size=(20000, n)) * 2.0 - 1.0
        if HAVE_NUMBA:
            _gurvits_products_numba(a, signs)
            t_nb, v_nb = best_of(_gurvits_products_numba, a, signs)
        t_np, v_np = best_of(_gurvits_products_numpy, a, signs)
        if HAVE_NUMBA:
            assert np.allclose(v_np, v_nb)
            print(f"{n:>4} {t_np:>12.6f} {t_nb:>12.6f} {t_np / t_nb:>8.1f}x")
        else:
            print(f"{n:>4} {t_np:>12.6f}")


if __name__ == "__main__":
    main()
