"""File formats and text grammars used by the CLI.

JSON schemas:
  unitary  {"m": int, "entries": [[re, im], ...]}          (row-major)
  gram     {"n": int, "entries": [x, ...]}                  (row-major, real)
  samples  {"m": int, "n": int, "total": int,
            "counts": {"s1,s2,...,sm": int}}
  binned   {"partition": str, "n": int, "method": str,
            "probs": {"k1,k2,...": float}, ...}

Partition grammar: bins separated by '|', modes by ','; the keyword 'rest'
denotes the complement of all other listed modes.  Mode indices are 1-based.
All emitted JSON uses sorted keys so identical inputs give identical bytes.
"""

import itertools
import json

import numpy as np

from .binning import BinnedDistribution, ModePartition
from .interference import SampleSet
from .validation import ValidationReport


def _dump(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _load(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def save_unitary(path, u) -> None:
    u = np.asarray(u, dtype=np.complex128)
    entries = [[float(v.real), float(v.imag)] for v in u.ravel()]
    _dump(path, {"m": int(u.shape[0]), "entries": entries})


def load_unitary(path) -> np.ndarray:
    data = _load(path)
    m = int(data["m"])
    entries = data["entries"]
    if len(entries) != m * m:
        raise ValueError(f"{path}: expected {m * m} entries, found {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(m, m)


def save_gram(path, gram) -> None:
    gram = np.asarray(gram, dtype=float)
    _dump(path, {"n": int(gram.shape[0]), "entries": [float(v) for v in gram.ravel()]})


def load_gram(path) -> np.ndarray:
    data = _load(path)
    n = int(data["n"])
    entries = data["entries"]
    if len(entries) != n * n:
        raise ValueError(f"{path}: expected {n * n} entries, found {len(entries)}")
    return np.asarray(entries, dtype=float).reshape(n, n)


def _pattern_key(s) -> str:
    return ",".join(str(int(v)) for v in s)


def _parse_pattern_key(key: str) -> tuple:
    return tuple(int(v) for v in key.split(","))


def save_samples(path, samples: SampleSet) -> None:
    _dump(
        path,
        {
            "m": samples.m,
            "n": samples.n,
            "total": samples.total_samples,
            "counts": {_pattern_key(s): int(c) for s, c in samples.counts.items()},
            "metadata": {k: samples.metadata[k] for k in sorted(samples.metadata)},
        },
    )


def load_samples(path) -> SampleSet:
    data = _load(path)
    counts = {_parse_pattern_key(k): int(c) for k, c in data["counts"].items()}
    return SampleSet(
        m=int(data["m"]),
        n=int(data["n"]),
        counts=counts,
        total_samples=int(data["total"]),
        metadata=data.get("metadata", {}),
    )


def partition_to_text(partition: ModePartition) -> str:
    return "|".join(",".join(str(j) for j in b) for b in partition.bins)


def parse_partition(text: str, m: int) -> ModePartition:
    """Parse e.g. '1,2|3,4' or '1|rest' into a ModePartition."""
    tokens = [t.strip() for t in text.split("|")]
    bins = []
    rest_slots = []
    used = set()
    for i, tok in enumerate(tokens):
        if tok == "rest":
            rest_slots.append(i)
            bins.append(None)
            continue
        try:
            modes = tuple(int(v) for v in tok.split(","))
        except ValueError as exc:
            raise ValueError(f"bad partition token {tok!r} in {text!r}") from exc
        used.update(modes)
        bins.append(modes)
    if len(rest_slots) > 1:
        raise ValueError("'rest' may appear at most once")
    if rest_slots:
        rest = tuple(j for j in range(1, m + 1) if j not in used)
        if not rest:
            raise ValueError("'rest' bin would be empty")
        bins[rest_slots[0]] = rest
    return ModePartition(m=m, bins=tuple(bins))


def expand_partitions(text: str, m: int):
    """Expand a partitions argument into a list of ModePartition.

    'all1' / 'all2' expand to every single-mode / two-mode single-bin
    partition, 'all12' to both; otherwise ';'-separated partition strings.
    """
    text = text.strip()
    if text in ("all1", "all2", "all12"):
        parts = []
        if text in ("all1", "all12"):
            parts += [ModePartition.single_bin(m, (j,)) for j in range(1, m + 1)]
        if text in ("all2", "all12"):
            parts += [
                ModePartition.single_bin(m, pair)
                for pair in itertools.combinations(range(1, m + 1), 2)
            ]
        return parts
    return [parse_partition(chunk, m) for chunk in text.split(";") if chunk.strip()]


def parse_subset(text: str) -> tuple:
    return tuple(int(v) for v in text.split(","))


def save_binned(path, dist: BinnedDistribution, method: str, extra=None) -> None:
    doc = {
        "partition": partition_to_text(dist.partition),
        "m": dist.partition.m,
        "n": dist.n,
        "method": method,
        "probs": {_pattern_key(k): float(p) for k, p in dist.probs.items()},
    }
    if extra:
        doc.update(extra)
    _dump(path, doc)


def load_binned(path):
    data = _load(path)
    partition = parse_partition(data["partition"], int(data["m"]))
    probs = {_parse_pattern_key(k): float(p) for k, p in data["probs"].items()}
    return BinnedDistribution(partition=partition, n=int(data["n"]), probs=probs), data


def save_report(path, report: ValidationReport) -> None:
    doc = {
        "n": report.n,
        "m": report.m,
        "total_samples": report.total_samples,
        "partitions": [partition_to_text(p) for p in report.partitions],
        "tvd_vs_bosonic": report.tvd_vs_bosonic,
        "tvd_vs_model": report.tvd_vs_model,
        "worst_case_tvd_bosonic": report.worst_case_tvd_bosonic,
        "worst_case_tvd_model": report.worst_case_tvd_model,
        "uniform_baseline_tvd": report.uniform_baseline_tvd,
        "binned_stderr": [
            {_pattern_key(k): v for k, v in table.items()} for table in report.binned_stderr
        ],
        "metadata": {k: report.metadata[k] for k in sorted(report.metadata)},
    }
    _dump(path, doc)


def save_json(path, obj) -> None:
    _dump(path, obj)


def write_csv(path, header, rows) -> None:
    """Plain CSV with 17-significant-digit decimals."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(v) for v in row) + "\n")


def _format_cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def parse_grid(text: str) -> np.ndarray:
    """Parse 'start:stop:step' (inclusive of stop) or a comma list of values."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid spec must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(round((stop - start) / step))
        grid = start + step * np.arange(count + 1)
        return grid[grid <= stop + 1e-12]
    return np.asarray([float(v) for v in text.split(",")])
