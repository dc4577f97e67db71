"""Haar-averaged statistics of single-bin photon-number distributions.

Contains the closed-form ensemble variance, Monte Carlo estimators over
Haar-random interferometers, and numerical oracles for the first two
Weingarten moments used in its derivation.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .binning import BinnedDistribution, ModePartition, binned_distribution_exact
from .linalg import derive_rng, haar_unitary


def distribution_variance(dist: BinnedDistribution) -> float:
    """Variance sum k^2 P(k) - (sum k P(k))^2 of a single-bin distribution."""
    if dist.partition.num_bins != 1:
        raise ValueError("variance is defined for single-bin distributions; marginalize first")
    ks = np.array([k[0] for k in dist.probs])
    ps = np.array([dist.probs[k] for k in dist.probs])
    mean = float(np.sum(ks * ps))
    return max(float(np.sum(ks**2 * ps)) - mean**2, 0.0)


def sum_sq_overlaps(gram) -> float:
    """sum_{i != j} |x_ij|^2 of a Gram matrix."""
    x = np.asarray(gram)
    off = x - np.diag(np.diagonal(x))
    return float(np.sum(np.abs(off) ** 2))


def haar_variance_formula(n: int, m: int, bin_size: int, sum_sq: float) -> float:
    """Closed-form variance of the Haar-averaged single-bin distribution.

    This is the variance of the distribution obtained by averaging P(k) over
    Haar-random unitaries; the mean of per-unitary variances is strictly
    smaller (by the Haar variance of the bin's expected count) and is exposed
    separately via ensemble_variances.

    |K| n (m - |K|) (m^2 - n) / (m^2 (m^2 - 1))
    + (m |K| - |K|^2) / (m (m^2 - 1)) * sum_{i != j} |x_ij|^2
    """
    if m <= 1:
        raise ValueError("formula requires m >= 2 (single-mode counts are deterministic)")
    if not 1 <= bin_size <= m:
        raise ValueError(f"bin_size must lie in 1..{m}")
    if sum_sq < 0 or sum_sq > n * (n - 1) + 1e-12:
        raise ValueError(f"sum of squared overlaps {sum_sq} outside [0, n(n-1)]")
    k = bin_size
    first = k * n * (m - k) * (m**2 - n) / (m**2 * (m**2 - 1))
    second = (m * k - k**2) / (m * (m**2 - 1)) * sum_sq
    return first + second


@dataclass(frozen=True)
class EnsembleSpec:
    """Seeded ensemble of Haar-random m x m unitaries."""

    num_unitaries: int
    m: int
    seed: int

    def __post_init__(self):
        if self.num_unitaries < 1:
            raise ValueError("num_unitaries must be >= 1")

    def unitaries(self):
        for i in range(self.num_unitaries):
            yield haar_unitary(self.m, derive_rng(self.seed, i))


def _single_bin_distribution(u, gram, bin_size: int, bin_modes=None) -> BinnedDistribution:
    m = u.shape[0]
    modes = tuple(bin_modes) if bin_modes is not None else tuple(range(1, bin_size + 1))
    return binned_distribution_exact(u, gram, ModePartition.single_bin(m, modes))


def ensemble_variances(unitaries, gram, bin_size: int, *, bin_modes=None) -> np.ndarray:
    """Single-bin photon-count variance for each unitary in an ensemble.

    The bin defaults to the canonical {1..bin_size}; under Haar averaging any
    fixed bin of that size is statistically equivalent.
    """
    return np.asarray(
        [
            distribution_variance(_single_bin_distribution(u, gram, bin_size, bin_modes))
            for u in unitaries
        ]
    )


def averaged_variance(unitaries, gram, bin_size: int, *, bin_modes=None):
    """Variance of the ensemble-averaged single-bin distribution, +- stderr.

    Averages P(k) over the unitaries first, then takes the variance; the
    standard error comes from the delta method applied to the per-unitary
    first and second moments.
    """
    m1, m2 = [], []
    for u in unitaries:
        dist = _single_bin_distribution(u, gram, bin_size, bin_modes)
        ks = np.array([k[0] for k in dist.probs])
        ps = np.array([dist.probs[k] for k in dist.probs])
        m1.append(float(np.sum(ks * ps)))
        m2.append(float(np.sum(ks**2 * ps)))
    m1 = np.asarray(m1)
    m2 = np.asarray(m2)
    if m1.size == 0:
        raise ValueError("ensemble is empty")
    estimate = float(m2.mean() - m1.mean() ** 2)
    if m1.size > 1:
        g = m2 - 2.0 * m1.mean() * m1
        stderr = float(g.std(ddof=1) / np.sqrt(g.size))
    else:
        stderr = float("inf")
    return estimate, stderr


def ensemble_variance_mc(spec: EnsembleSpec, n: int, gram, bin_size: int):
    """Monte Carlo estimate (mean +- stderr) matching haar_variance_formula.

    Estimates the variance of the Haar-averaged single-bin distribution over
    the seeded ensemble; the O(1/N) downward bias from averaging a finite
    ensemble is negligible at the default sizes.
    """
    gram = np.asarray(gram)
    if gram.shape[0] != n:
        raise ValueError(f"Gram size {gram.shape[0]} != n = {n}")
    return averaged_variance(spec.unitaries(), gram, bin_size)


class WeingartenResult(NamedTuple):
    mc_value: complex
    analytic: complex
    sigma: float


def _analytic_moment(m: int, spec) -> complex:
    if len(spec) == 4:
        i, j, k, l = spec
        return (1.0 if (i == k and j == l) else 0.0) / m
    if len(spec) == 8:
        i, j, k, l, ip, jp, kp, lp = spec

        def d(a, b):
            return 1.0 if a == b else 0.0

        pos = (
            d(i, ip) * d(j, jp) * d(k, kp) * d(l, lp)
            + d(i, kp) * d(j, lp) * d(k, ip) * d(l, jp)
        ) / (m**2 - 1)
        neg = (
            d(i, ip) * d(j, lp) * d(k, kp) * d(l, jp)
            + d(i, kp) * d(j, jp) * d(k, ip) * d(l, lp)
        ) / (m * (m**2 - 1))
        return pos - neg
    raise ValueError("moment_spec must have 4 (degree 1) or 8 (degree 2) indices")


def weingarten_moment_oracle(m: int, moment_spec, num_draws: int, seed: int) -> WeingartenResult:
    """Monte Carlo check of a first- or second-degree Haar moment.

    moment_spec is a tuple of 1-based indices: (i,j,k,l) for
    E[U_ij conj(U_kl)], or (i,j,k,l,i',j',k',l') for
    E[U_ij U_kl conj(U_i'j') conj(U_k'l')].
    """
    spec = tuple(int(v) for v in moment_spec)
    if any(not 1 <= v <= m for v in spec):
        raise ValueError(f"indices must lie in 1..{m}")
    analytic = _analytic_moment(m, spec)
    z = [v - 1 for v in spec]
    rng = derive_rng(seed)
    vals = np.empty(num_draws, dtype=np.complex128)
    for t in range(num_draws):
        u = haar_unitary(m, rng)
        if len(z) == 4:
            vals[t] = u[z[0], z[1]] * np.conj(u[z[2], z[3]])
        else:
            vals[t] = (
                u[z[0], z[1]]
                * u[z[2], z[3]]
                * np.conj(u[z[4], z[5]])
                * np.conj(u[z[6], z[7]])
            )
    mean = complex(vals.mean())
    sigma = float(np.sqrt(np.sum(np.abs(vals - mean) ** 2) / (num_draws - 1) / num_draws))
    return WeingartenResult(mean, complex(analytic), sigma)
