"""Statistical validation of sampler data via binned distributions.

TVD machinery, spoofing baselines (uniform sampler, fixed distribution),
generalized-bunching scans, distinguishability sweeps and phase-sensitivity
probes.  Distributions are compared as mappings outcome -> probability;
outcomes absent from one side count as probability zero.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .binning import (
    BinnedDistribution,
    ModePartition,
    bin_full_distribution,
    bin_samples,
    binned_distribution_exact,
    char_poly_coefficients,
    generalized_bunching_probability,
)
from .errors import DimensionError, InvariantError
from .interference import FullDistribution, SampleSet, all_patterns, full_distribution, gram_uniform
from .linalg import derive_rng, permanent_exact

NORMALIZATION_TOL = 1e-6


def _as_prob_map(dist):
    if isinstance(dist, (FullDistribution, BinnedDistribution)):
        return dist.probs
    return dict(dist)


def tvd(p, q) -> float:
    """Total variation distance (1/2) sum |p - q| between two distributions."""
    p = _as_prob_map(p)
    q = _as_prob_map(q)
    lens = {len(k) for k in p} | {len(k) for k in q}
    if len(lens) > 1:
        raise DimensionError("distributions live on different outcome spaces")
    for name, dist in (("first", p), ("second", q)):
        total = sum(dist.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"{name} distribution sums to {total}, expected 1")
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def as_binned(obj, partition: ModePartition) -> BinnedDistribution:
    """Reduce a sample set, full distribution or binned distribution to a bin table."""
    if isinstance(obj, BinnedDistribution):
        if obj.partition != partition:
            raise ValueError("binned distribution was computed for a different partition")
        return obj
    if isinstance(obj, SampleSet):
        return bin_samples(obj, partition)
    if isinstance(obj, FullDistribution):
        return bin_full_distribution(obj, partition)
    raise TypeError(f"cannot bin object of type {type(obj).__name__}")


def binned_tvd(a, b, partition: ModePartition) -> float:
    """TVD between two inputs after coarse-graining onto the partition."""
    return tvd(as_binned(a, partition), as_binned(b, partition))


class FluctuationScan(NamedTuple):
    pairwise_tvd: np.ndarray
    offdiagonal_mean: float


def bin_fluctuation_scan(u, gram, partitions) -> FluctuationScan:
    """Pairwise TVD matrix between binned distributions of equal-size bins."""
    partitions = list(partitions)
    sizes = {tuple(sorted(len(b) for b in p.bins)) for p in partitions}
    if len(sizes) > 1:
        raise ValueError("all partitions must have the same bin sizes")
    dists = [binned_distribution_exact(u, gram, p) for p in partitions]
    num = len(dists)
    mat = np.zeros((num, num))
    for i in range(num):
        for j in range(i + 1, num):
            mat[i, j] = mat[j, i] = tvd(dists[i], dists[j])
    off = mat[~np.eye(num, dtype=bool)]
    return FluctuationScan(mat, float(off.mean()) if off.size else 0.0)


def ensemble_avg_tvd(unitaries, x_exp, partition: ModePartition, reference_x):
    """Mean +- stderr over unitaries of TVD(binned(X_exp), binned(reference))."""
    values = []
    for u in unitaries:
        d_exp = binned_distribution_exact(u, x_exp, partition)
        d_ref = binned_distribution_exact(u, reference_x, partition)
        values.append(tvd(d_exp, d_ref))
    values = np.asarray(values)
    if values.size == 0:
        raise ValueError("ensemble is empty")
    stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
    return float(values.mean()), stderr


def uniform_sampler_baseline(n: int, m: int, partition: ModePartition) -> BinnedDistribution:
    """Binned distribution of the sampler that is uniform over all n-photon patterns."""
    patterns = all_patterns(n, m)
    p = 1.0 / len(patterns)
    uniform = FullDistribution(n=n, m=m, probs={s: p for s in patterns})
    return bin_full_distribution(uniform, partition)


def fixed_distribution_baseline(reference: BinnedDistribution, targets) -> float:
    """Mean TVD of one fixed binned distribution against each target."""
    targets = list(targets)
    if not targets:
        raise ValueError("no target distributions given")
    ref_sizes = tuple(sorted(len(b) for b in reference.partition.bins))
    for t in targets:
        if tuple(sorted(len(b) for b in t.partition.bins)) != ref_sizes:
            raise ValueError("targets must use the same bin sizes as the reference")
    return float(np.mean([tvd(reference, t) for t in targets]))


class GbpPoint(NamedTuple):
    unitary_index: int
    gram_index: int
    abscissa: float  # Perm(X) / n!
    delta: float  # P^BOS - P^X


@dataclass
class GbpScan:
    subset: tuple
    points: list
    per_gram_mean: np.ndarray
    per_gram_std: np.ndarray


def gbp_difference_scan(unitaries, subset, gram_list, experimental_unitaries=None) -> GbpScan:
    """P^BOS - P^X per (unitary, Gram matrix), with abscissa Perm(X)/n!.

    ``experimental_unitaries`` substitutes a noisy realization of each unitary
    on the P^X side while P^BOS stays noiseless; defaults to the clean ones.
    """
    unitaries = list(unitaries)
    exp_unitaries = list(experimental_unitaries) if experimental_unitaries is not None else unitaries
    if len(exp_unitaries) != len(unitaries):
        raise ValueError("experimental ensemble must match the clean ensemble in length")
    gram_list = [np.asarray(x) for x in gram_list]
    if not gram_list:
        raise ValueError("no Gram matrices given")
    n = gram_list[0].shape[0]
    ones = gram_uniform(n, 1.0)
    points = []
    deltas = np.empty((len(gram_list), len(unitaries)))
    for gi, x in enumerate(gram_list):
        abscissa = permanent_exact(x).real / math.factorial(n)
        for ui, (u_clean, u_exp) in enumerate(zip(unitaries, exp_unitaries)):
            p_bos = generalized_bunching_probability(u_clean, ones, subset, n)
            p_x = generalized_bunching_probability(u_exp, x, subset, n)
            delta = p_bos - p_x
            deltas[gi, ui] = delta
            points.append(GbpPoint(ui, gi, abscissa, delta))
    return GbpScan(
        subset=tuple(sorted(subset)),
        points=points,
        per_gram_mean=deltas.mean(axis=1),
        per_gram_std=deltas.std(axis=1, ddof=1) if len(unitaries) > 1 else np.zeros(len(gram_list)),
    )


class PhaseSensitivityResult(NamedTuple):
    tvd_single_mode_bins: float
    tvd_multi_mode_bins: float
    c_diffs: np.ndarray


def hadamard_family(m: int, seed: int, *, max_iters: int = 20000, tol: float = 1e-13) -> np.ndarray:
    """Random complex Hadamard unitary: all entries have modulus 1/sqrt(m).

    Found by alternating projections between the fixed-moduli set and the
    unitary group from a seeded random start.  Order 6 and above admit many
    inequivalent solutions, so independent seeds typically yield unitaries
    with identical entry moduli but genuinely different internal phases - the
    canonical vehicle for probing phase sensitivity at fixed |U_ij|.
    """
    rng = derive_rng(seed)
    z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    target = 1.0 / np.sqrt(m)
    for _ in range(max_iters):
        z = target * np.exp(1j * np.angle(z))
        left, _, right = np.linalg.svd(z)
        z = left @ right
        if float(np.max(np.abs(np.abs(z) - target))) < tol:
            return z
    raise InvariantError(f"Hadamard projection did not converge for m={m}, seed={seed}")


def random_hadamard_pair(phase_seed: int, m: int = 6):
    """Seeded pair (U, U~) with identical entry moduli but different phases."""
    return hadamard_family(m, 2 * phase_seed), hadamard_family(m, 2 * phase_seed + 1)


def phase_sensitivity_probe(u, u_tilde, gram, partition: ModePartition) -> PhaseSensitivityResult:
    """Compare binned distributions of two unitaries with equal entry moduli.

    Diagonal phase dressings D1 U D2 leave every outcome probability
    unchanged, so any distribution shift at fixed |U_ij| isolates the internal
    phases.  Single-mode-bin distributions depend on the moduli alone and must
    agree; multi-mode bins generally separate.  c_diffs holds
    c_a(H) - c_a(H~) for the first bin of the partition.
    """
    u = np.asarray(u, dtype=np.complex128)
    u_tilde = np.asarray(u_tilde, dtype=np.complex128)
    if u.shape != u_tilde.shape:
        raise DimensionError("unitaries must have equal shape")
    if float(np.max(np.abs(np.abs(u) - np.abs(u_tilde)))) > 1e-10:
        raise ValueError("unitaries must have identical entry moduli")
    m = u.shape[0]

    single = 0.0
    for j in range(1, m + 1):
        part = ModePartition.single_bin(m, (j,))
        single = max(
            single,
            tvd(
                binned_distribution_exact(u, gram, part),
                binned_distribution_exact(u_tilde, gram, part),
            ),
        )
    multi = tvd(
        binned_distribution_exact(u, gram, partition),
        binned_distribution_exact(u_tilde, gram, partition),
    )
    n = np.asarray(gram).shape[0]
    bin0 = partition.bins[0]
    c_diffs = char_poly_coefficients(u, gram, bin0, n) - char_poly_coefficients(
        u_tilde, gram, bin0, n
    )
    return PhaseSensitivityResult(single, multi, c_diffs)


def default_partitions(m: int):
    """All single- and two-mode single-bin partitions of m modes."""
    parts = [ModePartition.single_bin(m, (j,)) for j in range(1, m + 1)]
    parts += [
        ModePartition.single_bin(m, pair) for pair in itertools.combinations(range(1, m + 1), 2)
    ]
    return parts


def _binned_stderr(samples: SampleSet, partition: ModePartition) -> dict:
    """Multinomial standard error per binned outcome."""
    emp = bin_samples(samples, partition)
    num = samples.total_samples
    return {k: float(np.sqrt(max(p * (1.0 - p), 0.0) / num)) for k, p in emp.probs.items()}


@dataclass
class ValidationReport:
    """Binned-TVD validation summary of one sample set against theory."""

    n: int
    m: int
    total_samples: int
    partitions: list
    tvd_vs_bosonic: list
    tvd_vs_model: list
    worst_case_tvd_bosonic: float
    worst_case_tvd_model: float
    uniform_baseline_tvd: list
    binned_stderr: list
    metadata: dict = field(default_factory=dict)


def validation_report(
    samples: SampleSet, u_set, x_model, partitions=None
) -> ValidationReport:
    """Per-partition binned TVDs of the samples against bosonic and model theory.

    The worst case over partitions lower-bounds the full TVD; the uniform
    sampler's TVD against the bosonic theory is reported as a baseline.
    """
    if samples.total_samples == 0:
        raise ValueError("sample set is empty")
    u_set = np.asarray(u_set, dtype=np.complex128)
    n, m = samples.n, samples.m
    if partitions is None:
        partitions = default_partitions(m)
    partitions = list(partitions)
    bosonic = full_distribution(u_set, gram_uniform(n, 1.0), n)
    model = full_distribution(u_set, x_model, n)

    tvd_bos, tvd_mod, uniform_tvd, stderrs = [], [], [], []
    for part in partitions:
        emp = bin_samples(samples, part)
        th_bos = bin_full_distribution(bosonic, part)
        th_mod = bin_full_distribution(model, part)
        tvd_bos.append(tvd(emp, th_bos))
        tvd_mod.append(tvd(emp, th_mod))
        uniform_tvd.append(tvd(uniform_sampler_baseline(n, m, part), th_bos))
        stderrs.append(_binned_stderr(samples, part))
    return ValidationReport(
        n=n,
        m=m,
        total_samples=samples.total_samples,
        partitions=partitions,
        tvd_vs_bosonic=tvd_bos,
        tvd_vs_model=tvd_mod,
        worst_case_tvd_bosonic=max(tvd_bos),
        worst_case_tvd_model=max(tvd_mod),
        uniform_baseline_tvd=uniform_tvd,
        binned_stderr=stderrs,
        metadata=dict(samples.metadata),
    )
