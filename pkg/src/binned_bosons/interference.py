"""Partially distinguishable photon inputs and brute-force output statistics.

Photons always enter the first n modes, one per mode.  Distinguishability is
carried entirely by the Gram matrix of pairwise internal-wavefunction
overlaps; the wavefunctions themselves are never represented.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import DimensionError, InvariantError, SizeLimitError

OUTCOME_PHOTON_CAP = 6
OUTCOME_MODE_CAP = 12
GRAM_PSD_TOL = 1e-10


def validate_gram(x, tol: float = GRAM_PSD_TOL) -> np.ndarray:
    """Check symmetry/Hermiticity, unit diagonal, |x_ij| <= 1 and PSD."""
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"Gram matrix must be square, got shape {x.shape}")
    if np.max(np.abs(x - x.conj().T)) > tol:
        raise InvariantError("Gram matrix is not Hermitian")
    if np.max(np.abs(np.diagonal(x) - 1.0)) > tol:
        raise InvariantError("Gram matrix diagonal must be 1")
    if np.max(np.abs(x)) > 1.0 + tol:
        raise InvariantError("Gram matrix entries must satisfy |x_ij| <= 1")
    if np.min(np.linalg.eigvalsh((x + x.conj().T) / 2.0)) < -tol:
        raise InvariantError("Gram matrix is not positive semidefinite")
    return x


def gram_uniform(n: int, x: float) -> np.ndarray:
    """Gram matrix with all pairwise overlaps equal to x."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"uniform overlap must lie in [0, 1], got {x}")
    g = np.full((n, n), float(x))
    np.fill_diagonal(g, 1.0)
    return g


@dataclass(frozen=True)
class DelayConfig:
    """Relative arrival times of the photons and their coherence time."""

    delays: tuple
    coherence_time: float

    def __post_init__(self):
        if self.coherence_time <= 0:
            raise ValueError("coherence_time must be positive")


def gram_from_delays(cfg: DelayConfig) -> np.ndarray:
    """Gaussian wavepacket overlap: x_ij = exp(-(dt_i - dt_j)^2 / (4 sigma^2))."""
    dt = np.asarray(cfg.delays, dtype=float)
    diff = dt[:, None] - dt[None, :]
    return np.exp(-(diff**2) / (4.0 * cfg.coherence_time**2))


def quad_mean_overlap(x) -> float:
    """RMS of the pairwise overlaps (off-diagonal entries)."""
    x = np.asarray(x)
    n = x.shape[0]
    iu = np.triu_indices(n, k=1)
    return float(np.sqrt(np.mean(np.abs(x[iu]) ** 2)))


def hom_visibility(x: float) -> float:
    """HOM dip visibility V = x^2 for a pairwise overlap x."""
    return float(x) ** 2


@lru_cache(maxsize=None)
def _perm_array(n: int) -> np.ndarray:
    return np.array(list(permutations(range(n))), dtype=np.intp)


def _mode_assignment(s) -> np.ndarray:
    """Nondecreasing list of output modes (0-based) occupied by the pattern."""
    return np.repeat(np.arange(len(s)), s)


def outcome_probability(u, gram, s, cap: int = OUTCOME_PHOTON_CAP) -> float:
    """Probability of detecting the click pattern s (counts per output mode).

    Double sum over permutation pairs (sigma, tau):
    (1/prod s_j!) sum_{sigma,tau} prod_k x_{tau(k),sigma(k)}
    U_{d_k,sigma(k)} conj(U_{d_k,tau(k)}), with d the mode assignment of s.
    """
    u = np.asarray(u, dtype=np.complex128)
    gram = np.asarray(gram)
    s = tuple(int(v) for v in s)
    if len(s) != u.shape[0]:
        raise DimensionError(f"pattern length {len(s)} != mode count {u.shape[0]}")
    if any(v < 0 for v in s):
        raise ValueError("pattern entries must be nonnegative")
    n = sum(s)
    if n > cap:
        raise SizeLimitError(f"photon number {n} exceeds brute-force cap {cap}")
    if n != gram.shape[0]:
        raise DimensionError(f"photon number {n} != Gram size {gram.shape[0]}")
    if n == 0:
        return 1.0
    d = _mode_assignment(s)
    perms = _perm_array(n)  # (n!, n)
    # amp[a, k] = U[d_k, sigma_a(k)]
    amp = u[d[None, :], perms]
    nfact = perms.shape[0]
    total = 0.0 + 0.0j
    for a in range(nfact):
        # vectorized over tau: prod_k x[tau(k), sigma_a(k)] * amp[a,k] * conj(amp[tau,k])
        terms = gram[perms, perms[a][None, :]] * amp[a][None, :] * np.conj(amp)
        total += np.prod(terms, axis=1).sum()
    norm = math.prod(math.factorial(v) for v in s)
    value = total / norm
    if abs(value.imag) > 1e-9:
        raise InvariantError(f"outcome probability has imaginary residue {value.imag:.3e}")
    p = value.real
    if p < -1e-9:
        raise InvariantError(f"outcome probability is negative: {p:.3e} (broken Gram matrix?)")
    return max(p, 0.0)


def all_patterns(n: int, m: int):
    """All click patterns with n photons in m modes, lexicographically sorted."""
    if m == 1:
        return [(n,)]
    out = []
    for first in range(n + 1):
        for rest in all_patterns(n - first, m - 1):
            out.append((first,) + rest)
    return out


@dataclass
class FullDistribution:
    """Exact probability table over all n-photon click patterns."""

    n: int
    m: int
    probs: dict  # pattern tuple -> probability

    def normalization(self) -> float:
        return float(sum(self.probs.values()))


def full_distribution(
    u,
    gram,
    n: int,
    *,
    photon_cap: int = OUTCOME_PHOTON_CAP,
    mode_cap: int = OUTCOME_MODE_CAP,
) -> FullDistribution:
    """Enumerate all patterns with sum(s) = n and evaluate each probability."""
    u = np.asarray(u, dtype=np.complex128)
    m = u.shape[0]
    if n > photon_cap or m > mode_cap:
        raise SizeLimitError(f"(n={n}, m={m}) exceeds caps ({photon_cap}, {mode_cap})")
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    probs = {s: outcome_probability(u, gram, s, cap=photon_cap) for s in all_patterns(n, m)}
    total = sum(probs.values())
    if abs(total - 1.0) > 1e-9:
        raise InvariantError(f"full distribution sums to {total}, expected 1")
    return FullDistribution(n=n, m=m, probs=probs)


@dataclass
class SampleSet:
    """Multiset of detected click patterns with integer counts."""

    m: int
    n: int
    counts: dict  # pattern tuple -> count
    total_samples: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if sum(self.counts.values()) != self.total_samples:
            raise InvariantError("sample counts do not sum to total_samples")


def draw_samples(dist: FullDistribution, num: int, seed: int) -> SampleSet:
    """num i.i.d. draws by inverse CDF over the lexicographic pattern order."""
    total = dist.normalization()
    if abs(total - 1.0) > 1e-9:
        raise InvariantError(f"distribution is not normalized (sum = {total})")
    patterns = sorted(dist.probs)
    if num == 0:
        return SampleSet(m=dist.m, n=dist.n, counts={}, total_samples=0, metadata={"seed": seed})
    from .linalg import derive_rng

    cdf = np.cumsum([dist.probs[s] for s in patterns])
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, derive_rng(seed).random(num), side="right")
    counts = np.bincount(idx, minlength=len(patterns))
    table = {s: int(c) for s, c in zip(patterns, counts) if c > 0}
    return SampleSet(m=dist.m, n=dist.n, counts=table, total_samples=num, metadata={"seed": seed})
