"""Binned-mode photon-number distributions via the characteristic function.

A partition groups output modes (1-based indices) into disjoint bins; the
probability of each binned photon-count vector k is recovered from the
characteristic function x(eta) = perm(X . V_n(eta)) evaluated on the grid
nu_l = 2 pi l / (n+1) followed by an inverse DFT.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvariantError, SizeLimitError
from .interference import FullDistribution, SampleSet, validate_gram
from .linalg import derive_rng, permanent_exact, permanent_gurvits

GRID_CAP = 10**6
CHAR_POLY_CAP = 10
IMAG_RESIDUE_ERROR = 1e-6
NEGATIVE_MASS_ERROR = 1e-6


@dataclass(frozen=True)
class ModePartition:
    """K disjoint nonempty bins of output modes; union need not cover all modes."""

    m: int
    bins: tuple  # tuple of tuples of 1-based, sorted mode indices

    def __post_init__(self):
        bins = tuple(tuple(sorted(int(j) for j in b)) for b in self.bins)
        object.__setattr__(self, "bins", bins)
        if len(bins) < 1:
            raise ValueError("partition needs at least one bin")
        seen = set()
        for b in bins:
            if not b:
                raise ValueError("bins must be nonempty")
            for j in b:
                if not 1 <= j <= self.m:
                    raise ValueError(f"mode index {j} outside 1..{self.m}")
                if j in seen:
                    raise ValueError(f"mode {j} appears in more than one bin")
                seen.add(j)

    @property
    def num_bins(self) -> int:
        return len(self.bins)

    def covers_all_modes(self) -> bool:
        return sum(len(b) for b in self.bins) == self.m

    @classmethod
    def single_bin(cls, m: int, modes) -> "ModePartition":
        return cls(m=m, bins=(tuple(modes),))

    @classmethod
    def singletons(cls, m: int) -> "ModePartition":
        return cls(m=m, bins=tuple((j,) for j in range(1, m + 1)))


@dataclass
class BinnedDistribution:
    """Probability table over binned outcomes k (one count per bin)."""

    partition: ModePartition
    n: int
    probs: dict  # tuple k -> probability

    def normalization(self) -> float:
        return float(sum(self.probs.values()))


def virtual_interferometer(u, partition: ModePartition, eta) -> np.ndarray:
    """V(eta) = U^dag Lambda(eta) U with Lambda diagonal phases per bin."""
    u = np.asarray(u, dtype=np.complex128)
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (partition.num_bins,):
        raise DimensionError(
            f"eta has length {eta.size}, partition has {partition.num_bins} bins"
        )
    if u.shape[0] != partition.m:
        raise DimensionError(f"unitary size {u.shape[0]} != partition modes {partition.m}")
    lam = np.ones(partition.m, dtype=np.complex128)
    for z, b in enumerate(partition.bins):
        for j in b:
            lam[j - 1] = np.exp(1j * eta[z])
    return u.conj().T @ (lam[:, None] * u)


def characteristic_value(u, gram, partition: ModePartition, eta) -> complex:
    """x(eta) = perm(X . V_n(eta)) for photons in the first n modes."""
    gram = np.asarray(gram)
    n = gram.shape[0]
    v = virtual_interferometer(u, partition, eta)
    return permanent_exact(gram * v[:n, :n])


def _grid_axes(n: int, num_bins: int, cap: int):
    if (n + 1) ** num_bins > cap:
        raise SizeLimitError(
            f"characteristic grid has {(n + 1) ** num_bins} points, cap is {cap}"
        )
    return list(itertools.product(range(n + 1), repeat=num_bins))


def characteristic_grid(u, gram, partition: ModePartition, *, grid_cap: int = GRID_CAP) -> np.ndarray:
    """x(nu_l) on the full grid, shape (n+1,) * K."""
    gram = validate_gram(gram)
    n = gram.shape[0]
    k = partition.num_bins
    values = np.empty((n + 1,) * k, dtype=np.complex128)
    step = 2.0 * np.pi / (n + 1)
    for l in _grid_axes(n, k, grid_cap):
        values[l] = characteristic_value(u, gram, partition, step * np.asarray(l))
    return values


def _invert_grid(values: np.ndarray, n: int) -> np.ndarray:
    """P(k) = (1/(n+1)^K) sum_l x(nu_l) e^{-i nu_l . k}, axis by axis."""
    grid = n + 1
    l = np.arange(grid)
    f = np.exp(-2j * np.pi * np.outer(l, l) / grid) / grid
    out = values
    for _ in range(values.ndim):
        out = np.tensordot(f, out, axes=([1], [0]))
        out = np.moveaxis(out, 0, -1)
    return out


def _clean_probabilities(raw: np.ndarray) -> np.ndarray:
    imag = float(np.max(np.abs(raw.imag)))
    if imag > IMAG_RESIDUE_ERROR:
        raise InvariantError(f"binned probabilities have imaginary residue {imag:.3e}")
    p = raw.real
    neg = float(p.min())
    if neg < -NEGATIVE_MASS_ERROR:
        raise InvariantError(f"binned probabilities have negative mass {neg:.3e}")
    return np.clip(p, 0.0, None)


def binned_distribution_exact(
    u, gram, partition: ModePartition, *, grid_cap: int = GRID_CAP
) -> BinnedDistribution:
    """Exact binned distribution via characteristic-function inversion."""
    values = characteristic_grid(u, gram, partition, grid_cap=grid_cap)
    n = np.asarray(gram).shape[0]
    p = _clean_probabilities(_invert_grid(values, n))
    probs = {k: float(p[k]) for k in np.ndindex(p.shape)}
    return BinnedDistribution(partition=partition, n=n, probs=probs)


def binned_distribution_gurvits(
    u,
    gram,
    partition: ModePartition,
    samples_per_point: int,
    seed: int,
    *,
    grid_cap: int = GRID_CAP,
):
    """Randomized binned distribution; returns (distribution, TVD error bound).

    Each grid point gets an independent Gurvits permanent estimate with a
    child seed derived from (seed, flat grid index); the per-point standard
    errors are aggregated into the conservative bound sum(stderr) / 2.
    """
    if samples_per_point <= 0:
        raise ValueError("samples_per_point must be positive")
    gram = validate_gram(gram)
    u = np.asarray(u, dtype=np.complex128)
    n = gram.shape[0]
    k = partition.num_bins
    values = np.empty((n + 1,) * k, dtype=np.complex128)
    step = 2.0 * np.pi / (n + 1)
    total_err = 0.0
    for flat, l in enumerate(_grid_axes(n, k, grid_cap)):
        v = virtual_interferometer(u, partition, step * np.asarray(l))
        est = permanent_gurvits(gram * v[:n, :n], samples_per_point, derive_rng(seed, flat).integers(0, 2**63))
        values[l] = est.estimate
        total_err += est.stderr
    p = _invert_grid(values, n).real
    p = np.clip(p, 0.0, None)
    probs = {kk: float(p[kk]) for kk in np.ndindex(p.shape)}
    dist = BinnedDistribution(partition=partition, n=n, probs=probs)
    return dist, total_err / 2.0


def bin_pattern(s, partition: ModePartition) -> tuple:
    """Coarse-grain a click pattern to its binned outcome k."""
    return tuple(sum(s[j - 1] for j in b) for b in partition.bins)


def bin_full_distribution(dist: FullDistribution, partition: ModePartition) -> BinnedDistribution:
    """Brute-force binning of a full outcome distribution (oracle path)."""
    probs = {}
    for s, p in dist.probs.items():
        k = bin_pattern(s, partition)
        probs[k] = probs.get(k, 0.0) + p
    return BinnedDistribution(partition=partition, n=dist.n, probs=probs)


def bin_samples(samples: SampleSet, partition: ModePartition) -> BinnedDistribution:
    """Empirical binned distribution (frequencies) of a sample set."""
    if samples.total_samples == 0:
        raise ValueError("cannot bin an empty sample set")
    probs = {}
    for s, c in samples.counts.items():
        k = bin_pattern(s, partition)
        probs[k] = probs.get(k, 0.0) + c / samples.total_samples
    return BinnedDistribution(partition=partition, n=samples.n, probs=probs)


def bunching_matrix(u, subset, n: int) -> np.ndarray:
    """H_ij = sum_{k in subset} conj(U_{k,i}) U_{k,j} over the first n columns."""
    u = np.asarray(u, dtype=np.complex128)
    subset = sorted(int(j) for j in subset)
    if any(not 1 <= j <= u.shape[0] for j in subset):
        raise ValueError(f"subset modes must lie in 1..{u.shape[0]}")
    if not subset:
        return np.zeros((n, n), dtype=np.complex128)
    rows = u[np.asarray(subset) - 1, :n]
    return rows.conj().T @ rows


def generalized_bunching_probability(u, gram, subset, n: int) -> float:
    """P_n(X) = Perm(H . X): probability all n photons land in the subset."""
    gram = np.asarray(gram)
    if gram.shape[0] != n:
        raise DimensionError(f"Gram size {gram.shape[0]} != n = {n}")
    h = bunching_matrix(u, subset, n)
    value = permanent_exact(h * gram)
    if abs(value.imag) > 1e-9:
        raise InvariantError(f"bunching probability has imaginary residue {value.imag:.3e}")
    return max(value.real, 0.0)


def char_poly_coefficients(u, gram, subset, n: int, *, cap: int = CHAR_POLY_CAP) -> np.ndarray:
    """Coefficients c_a of F(y) = 1 + sum_a c_a (e^{iy} - 1)^a for one bin.

    c_a sums permanents of all a x a principal submatrices of H . X;
    returned as an array indexed a = 1..n (position a-1).
    """
    if n > cap:
        raise SizeLimitError(f"n = {n} exceeds char-poly cap {cap}")
    gram = np.asarray(gram)
    hx = bunching_matrix(u, subset, n) * gram
    coeffs = np.zeros(n, dtype=np.complex128)
    for a in range(1, n + 1):
        total = 0.0 + 0.0j
        for omega in itertools.combinations(range(n), a):
            idx = np.asarray(omega)
            total += permanent_exact(hx[np.ix_(idx, idx)])
        coeffs[a - 1] = total
    return coeffs


def reconstruct_characteristic(coeffs: np.ndarray, y: float) -> complex:
    """Evaluate F(y) = 1 + sum_a c_a (e^{iy} - 1)^a."""
    w = np.exp(1j * y) - 1.0
    return complex(1.0 + np.sum(coeffs * w ** np.arange(1, coeffs.size + 1)))


def expected_bin_count(dist: BinnedDistribution, axis: int = 0) -> float:
    """E[k_axis] of a binned distribution."""
    return float(sum(k[axis] * p for k, p in dist.probs.items()))
