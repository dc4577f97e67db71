"""Hot numeric kernels: Glynn permanent and the Gurvits/Glynn estimator.

Both kernels ship in a pure-numpy version and (when the numba backend is
active) an @njit version compiled from the same algorithm.  Dispatch happens
through module-level names ``glynn_permanent`` and ``gurvits_products`` so
callers never care which backend is active.
"""

import numpy as np

from .backend import ACTIVE_BACKEND


def _glynn_permanent_numpy(a: np.ndarray) -> complex:
    """Permanent of a complex square matrix by Glynn's Gray-code formula.

    O(n 2^n): one delta vector component flips per step, updating the running
    row-sum vector in O(n).
    """
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(a[0, 0])
    # delta_0 fixed at +1; Gray code over delta_1..delta_{n-1}
    row = a.sum(axis=0).astype(np.complex128)
    total = np.prod(row)
    parity = 1.0
    gray = 0
    for g in range(1, 1 << (n - 1)):
        bit = (g & -g).bit_length() - 1  # flipped position, 0-based
        gray ^= 1 << bit
        if gray & (1 << bit):
            row -= 2.0 * a[bit + 1]
        else:
            row += 2.0 * a[bit + 1]
        parity = -parity
        total += parity * np.prod(row)
    return complex(total / (1 << (n - 1)))


def _gurvits_products_numpy(a: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Per-sample Glynn estimator values prod_j x_j * prod_i (A x)_i.

    ``signs`` is (num_samples, n) of +-1 floats; the mean of the returned
    complex values is an unbiased estimate of perm(A).
    """
    rowvals = signs @ a.T
    return np.prod(rowvals, axis=1) * np.prod(signs, axis=1)


if ACTIVE_BACKEND == "numba":
    from numba import njit

    @njit(cache=True)
    def _glynn_permanent_numba(a):  # pragma: no cover - exercised via dispatch
        n = a.shape[0]
        if n == 0:
            return 1.0 + 0.0j
        if n == 1:
            return a[0, 0]
        row = np.zeros(n, dtype=np.complex128)
        for j in range(n):
            s = 0.0 + 0.0j
            for i in range(n):
                s += a[i, j]
            row[j] = s
        prod = 1.0 + 0.0j
        for j in range(n):
            prod *= row[j]
        total = prod
        parity = 1.0
        gray = 0
        for g in range(1, 1 << (n - 1)):
            bit = 0
            while not (g >> bit) & 1:
                bit += 1
            gray ^= 1 << bit
            if (gray >> bit) & 1:
                for j in range(n):
                    row[j] -= 2.0 * a[bit + 1, j]
            else:
                for j in range(n):
                    row[j] += 2.0 * a[bit + 1, j]
            parity = -parity
            prod = 1.0 + 0.0j
            for j in range(n):
                prod *= row[j]
            total += parity * prod
        return total / (1 << (n - 1))

    @njit(cache=True)
    def _gurvits_products_numba(a, signs):  # pragma: no cover
        num, n = signs.shape
        out = np.empty(num, dtype=np.complex128)
        for t in range(num):
            val = 1.0 + 0.0j
            for i in range(n):
                s = 0.0 + 0.0j
                for j in range(n):
                    s += signs[t, j] * a[i, j]
                val *= s
            sgn = 1.0
            for j in range(n):
                sgn *= signs[t, j]
            out[t] = sgn * val
        return out

    def glynn_permanent(a: np.ndarray) -> complex:
        return complex(_glynn_permanent_numba(np.ascontiguousarray(a, dtype=np.complex128)))

    def gurvits_products(a: np.ndarray, signs: np.ndarray) -> np.ndarray:
        return _gurvits_products_numba(
            np.ascontiguousarray(a, dtype=np.complex128),
            np.ascontiguousarray(signs, dtype=np.float64),
        )

else:

    def glynn_permanent(a: np.ndarray) -> complex:
        return _glynn_permanent_numpy(np.asarray(a, dtype=np.complex128))

    def gurvits_products(a: np.ndarray, signs: np.ndarray) -> np.ndarray:
        return _gurvits_products_numpy(
            np.asarray(a, dtype=np.complex128), np.asarray(signs, dtype=np.float64)
        )
