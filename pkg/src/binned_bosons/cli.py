"""Command-line interface.

Each subcommand reproduces one analysis pipeline at desk scale and emits
JSON or CSV; no plotting.  Exit codes: 0 success, 1 error, 2 validation
threshold exceeded.
"""

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io_formats as iof
from .binning import binned_distribution_exact, binned_distribution_gurvits
from .errors import DimensionError, InvariantError, SizeLimitError
from .haarstats import averaged_variance, haar_variance_formula, sum_sq_overlaps
from .interference import (
    DelayConfig,
    draw_samples,
    full_distribution,
    gram_from_delays,
    gram_uniform,
    hom_visibility,
    outcome_probability,
)
from .linalg import (
    NoiseModel,
    amplitude_fidelity,
    apply_noise,
    derive_rng,
    haar_unitary,
    permanent_exact,
)
from .validation import ensemble_avg_tvd, validation_report


def _resolve_threads(value) -> int:
    if value is None:
        value = int(os.environ.get("BINNED_BOSONS_THREADS", "0"))
    return int(value)


def _load_ensemble(directory):
    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        raise FileNotFoundError(f"no unitary JSON files in {directory}")
    return [iof.load_unitary(p) for p in paths]


def cmd_haar_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        u = haar_unitary(args.m, derive_rng(args.seed, i))
        iof.save_unitary(out / f"U_{i:03d}.json", u)
    return 0


def cmd_simulate(args) -> int:
    u = iof.load_unitary(args.unitary)
    gram = iof.load_gram(args.gram)
    dist = full_distribution(u, gram, args.n)
    samples = draw_samples(dist, args.samples, args.seed)
    samples.metadata.update(
        {"unitary": str(args.unitary), "gram": str(args.gram), "seed": args.seed}
    )
    iof.save_samples(args.out, samples)
    return 0


def cmd_bin(args) -> int:
    u = iof.load_unitary(args.unitary)
    gram = iof.load_gram(args.gram)
    partition = iof.parse_partition(args.partition, u.shape[0])
    if args.method == "exact":
        dist = binned_distribution_exact(u, gram, partition)
        iof.save_binned(args.out, dist, "exact")
    else:
        dist, err = binned_distribution_gurvits(
            u, gram, partition, args.samples_per_point, args.seed
        )
        iof.save_binned(args.out, dist, "gurvits", extra={"error_estimate": err})
    return 0


def cmd_gbp(args) -> int:
    u = iof.load_unitary(args.unitary)
    gram = iof.load_gram(args.gram)
    subset = iof.parse_subset(args.subset)
    n = gram.shape[0]
    from .binning import generalized_bunching_probability

    p_x = generalized_bunching_probability(u, gram, subset, n)
    p_bos = generalized_bunching_probability(u, gram_uniform(n, 1.0), subset, n)
    iof.save_json(
        args.out,
        {
            "subset": list(subset),
            "n": int(n),
            "gbp": p_x,
            "gbp_bosonic": p_bos,
            "delta": p_bos - p_x,
            "perm_x_over_nfactorial": permanent_exact(gram).real / math.factorial(n),
        },
    )
    return 0


def cmd_validate(args) -> int:
    samples = iof.load_samples(args.samples)
    u = iof.load_unitary(args.unitary)
    gram = iof.load_gram(args.gram)
    partitions = iof.expand_partitions(args.partitions, samples.m)
    report = validation_report(samples, u, gram, partitions)
    iof.save_report(args.out, report)
    if args.threshold is not None and report.worst_case_tvd_bosonic > args.threshold:
        print(
            f"validation threshold exceeded: worst-case binned TVD "
            f"{report.worst_case_tvd_bosonic:.6g} > {args.threshold:.6g}",
            file=sys.stderr,
        )
        return 2
    return 0


def cmd_sweep_tvd(args) -> int:
    unitaries = _load_ensemble(args.ensemble)
    m = unitaries[0].shape[0]
    partition = iof.parse_partition(args.partition, m)
    grid = iof.parse_grid(args.x_grid)
    reference = gram_uniform(args.n, 1.0)
    rows = []
    for x in grid:
        mean, stderr = ensemble_avg_tvd(unitaries, gram_uniform(args.n, float(x)), partition, reference)
        rows.append((float(x), mean, stderr))
    iof.write_csv(args.out, ["x", "mean_tvd", "stderr"], rows)
    return 0


def cmd_variance_scan(args) -> int:
    unitaries = _load_ensemble(args.ensemble)
    m = unitaries[0].shape[0]
    bin_sizes = [int(v) for v in args.bins.split(",")]
    grid = iof.parse_grid(args.x)
    rows = []
    for size in bin_sizes:
        for x in grid:
            gram = gram_uniform(args.n, float(x))
            mean, stderr = averaged_variance(unitaries, gram, size)
            formula = haar_variance_formula(args.n, m, size, sum_sq_overlaps(gram))
            rows.append((size, float(x), mean, stderr, formula))
    iof.write_csv(
        args.out, ["bin_size", "x", "mean_variance", "stderr", "haar_formula"], rows
    )
    return 0


def cmd_noise_scan(args) -> int:
    grid = iof.parse_grid(args.eps)
    rows = []
    for ei, eps in enumerate(grid):
        fids = np.empty(args.draws)
        for t in range(args.draws):
            rng = derive_rng(args.seed, ei, t)
            u_set = haar_unitary(args.m, rng)
            noise = haar_unitary(args.m, rng)
            u_get = apply_noise(u_set, NoiseModel(epsilon=float(eps), noise_unitary=noise))
            fids[t] = amplitude_fidelity(u_set, u_get)
        stderr = float(fids.std(ddof=1) / np.sqrt(args.draws)) if args.draws > 1 else 0.0
        rows.append((float(eps), float(fids.mean()), stderr))
    iof.write_csv(args.out, ["epsilon", "mean_fidelity", "stderr"], rows)
    return 0


def cmd_hom_curve(args) -> int:
    beamsplitter = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    rows = []
    for delay in iof.parse_grid(args.delays):
        gram = gram_from_delays(DelayConfig(delays=(0.0, float(delay)), coherence_time=args.sigma))
        overlap = float(gram[0, 1])
        coincidence = outcome_probability(beamsplitter, gram, (1, 1))
        rows.append((float(delay), overlap, hom_visibility(overlap), coincidence))
    iof.write_csv(
        args.out, ["delay", "overlap", "visibility", "coincidence_probability"], rows
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="binned-bosons",
        description="Binned-mode distributions of boson samplers and validation pipelines",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (0 = auto); results are identical for any value",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("haar-gen", help="draw Haar-random unitaries to JSON files")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_haar_gen)

    p = sub.add_parser("simulate", help="draw synthetic samples from the exact distribution")
    p.add_argument("--unitary", required=True)
    p.add_argument("--gram", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bin", help="binned distribution for one partition")
    p.add_argument("--unitary", required=True)
    p.add_argument("--gram", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--method", choices=("exact", "gurvits"), default="exact")
    p.add_argument("--samples-per-point", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bin)

    p = sub.add_parser("gbp", help="generalized bunching probability of a mode subset")
    p.add_argument("--unitary", required=True)
    p.add_argument("--gram", required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gbp)

    p = sub.add_parser("validate", help="binned-TVD validation report for sample data")
    p.add_argument("--samples", required=True)
    p.add_argument("--unitary", required=True)
    p.add_argument("--gram", required=True)
    p.add_argument("--partitions", default="all12")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep-tvd", help="mean TVD to the bosonic theory vs uniform overlap x")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--x-grid", dest="x_grid", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep_tvd)

    p = sub.add_parser("variance-scan", help="single-bin variance vs overlap, with Haar formula")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--bins", required=True, help="comma list of bin sizes")
    p.add_argument("--x", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_variance_scan)

    p = sub.add_parser("noise-scan", help="amplitude fidelity vs interpolated noise strength")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_noise_scan)

    p = sub.add_parser("hom-curve", help="two-photon HOM coincidence dip vs relative delay")
    p.add_argument("--delays", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hom_curve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _resolve_threads(args.threads)
    try:
        return args.func(args)
    except (
        ValueError,
        DimensionError,
        SizeLimitError,
        InvariantError,
        OSError,
        KeyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
