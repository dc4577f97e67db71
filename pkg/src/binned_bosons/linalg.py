"""Dense complex linear algebra: permanents, Haar unitaries, noise model.

Matrices are plain numpy arrays (complex128).  All randomness flows through
explicit 64-bit seeds; child streams are derived with numpy's SeedSequence
so results are reproducible regardless of call order.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import DimensionError, InvariantError, SizeLimitError

UNITARY_TOL = 1e-10
PERMANENT_CAP = 20


def derive_rng(seed, *key) -> np.random.Generator:
    """Child generator for (root seed, index...) with a fixed splitting rule."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def unitarity_defect(u) -> float:
    """Max-norm of U^dag U - I."""
    u = _as_square(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def assert_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = _as_square(u)
    defect = unitarity_defect(u)
    if defect > tol:
        raise InvariantError(f"matrix is not unitary: max |U^dag U - I| = {defect:.3e} > {tol:.1e}")
    return u


def permanent_exact(a, cap: int = PERMANENT_CAP) -> complex:
    """Permanent of a square complex matrix via Glynn's Gray-code formula.

    Perm of the empty (0x0) matrix is 1 by convention.
    """
    a = _as_square(a)
    n = a.shape[0]
    if n > cap:
        raise SizeLimitError(f"permanent order {n} exceeds cap {cap}")
    if not np.all(np.isfinite(a)):
        raise InvariantError("matrix has non-finite entries")
    return _kernels.glynn_permanent(a)


class GurvitsEstimate(NamedTuple):
    estimate: complex
    stderr: float
    entries_bounded: bool  # |A_ij| <= 1, needed for the additive-error guarantee


def permanent_gurvits(a, num_samples: int, seed: int) -> GurvitsEstimate:
    """Unbiased randomized permanent estimate (Glynn +-1 variant).

    Averages prod_j x_j * prod_i (A x)_i over Rademacher vectors x; stderr is
    the empirical standard error of the mean.  Deterministic for a fixed seed.
    """
    a = _as_square(a)
    if num_samples <= 0:
        raise ValueError("num_samples must be positive")
    rng = derive_rng(seed)
    n = a.shape[0]
    if n == 0:
        return GurvitsEstimate(1.0 + 0.0j, 0.0, True)
    signs = 2.0 * rng.integers(0, 2, size=(num_samples, n)).astype(np.float64) - 1.0
    vals = _kernels.gurvits_products(a, signs)
    mean = complex(vals.mean())
    if num_samples > 1:
        stderr = float(np.sqrt(np.sum(np.abs(vals - mean) ** 2) / (num_samples - 1) / num_samples))
    else:
        stderr = float("inf")
    bounded = bool(np.max(np.abs(a)) <= 1.0 + 1e-12)
    return GurvitsEstimate(mean, stderr, bounded)


def haar_unitary(m: int, seed) -> np.ndarray:
    """Haar-random m x m unitary: complex Ginibre + QR with phase correction."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else derive_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _unitary_eig(u, tol: float = 1e-8):
    """Eigendecomposition U = Q diag(e^{i theta}) Q^dag with unitary Q.

    Uses the complex Schur form, which is diagonal for normal matrices; the
    off-diagonal residue and unit-modulus of the eigenvalues are checked.
    """
    u = assert_unitary(u)
    t, q = scipy.linalg.schur(u, output="complex")
    diag = np.diagonal(t)
    offdiag = np.max(np.abs(t - np.diag(diag))) if u.shape[0] > 1 else 0.0
    if offdiag > tol or np.max(np.abs(np.abs(diag) - 1.0)) > tol:
        raise InvariantError("Schur form of input is not that of a unitary matrix")
    return q, np.angle(diag)


def unitary_log(u) -> np.ndarray:
    """Principal matrix logarithm of a unitary: skew-Hermitian L with e^L = U.

    Branch cut at (-pi, pi].
    """
    q, theta = _unitary_eig(u)
    return (q * (1j * theta)) @ q.conj().T


@dataclass(frozen=True)
class NoiseModel:
    """Interpolated-noise model U_get = e^{eps log(noise_unitary)} U_set."""

    epsilon: float
    noise_unitary: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


def apply_noise(u_set, model: NoiseModel) -> np.ndarray:
    """Noisy realization of u_set under the interpolated-noise model."""
    u_set = _as_square(u_set)
    noise = _as_square(model.noise_unitary)
    if noise.shape != u_set.shape:
        raise DimensionError(f"noise shape {noise.shape} != target shape {u_set.shape}")
    q, theta = _unitary_eig(noise)
    frac = (q * np.exp(1j * model.epsilon * theta)) @ q.conj().T
    return frac @ u_set


def amplitude_fidelity(u_set, u_get) -> float:
    """(1/m) Tr(|U_set|^T |U_get|) with entrywise modulus."""
    u_set = _as_square(u_set)
    u_get = _as_square(u_get)
    if u_set.shape != u_get.shape:
        raise DimensionError(f"shape mismatch: {u_set.shape} vs {u_get.shape}")
    m = u_set.shape[0]
    return float(np.trace(np.abs(u_set).T @ np.abs(u_get)).real / m)
