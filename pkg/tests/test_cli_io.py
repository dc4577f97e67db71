import csv
import json
import math

import numpy as np
import pytest

from binned_bosons import (
    ModePartition,
    SampleSet,
    binned_distribution_exact,
    draw_samples,
    full_distribution,
    gram_uniform,
    haar_unitary,
    haar_variance_formula,
    sum_sq_overlaps,
    tvd,
)
from binned_bosons import io_formats as iof
from binned_bosons.cli import main


class TestJsonRoundTrips:
    def test_unitary(self, tmp_path):
        u = haar_unitary(4, 90)
        path = tmp_path / "u.json"
        iof.save_unitary(path, u)
        assert np.max(np.abs(iof.load_unitary(path) - u)) < 1e-15

    def test_unitary_byte_determinism(self, tmp_path):
        u = haar_unitary(3, 91)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        iof.save_unitary(a, u)
        iof.save_unitary(b, u)
        assert a.read_bytes() == b.read_bytes()

    def test_unitary_entry_count_checked(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"m": 2, "entries": [[1.0, 0.0]]}))
        with pytest.raises(ValueError):
            iof.load_unitary(path)

    def test_gram(self, tmp_path):
        g = gram_uniform(3, 0.42)
        path = tmp_path / "g.json"
        iof.save_gram(path, g)
        assert np.array_equal(iof.load_gram(path), g)

    def test_samples(self, tmp_path):
        samples = SampleSet(
            m=3,
            n=2,
            counts={(2, 0, 0): 5, (1, 1, 0): 7},
            total_samples=12,
            metadata={"seed": 3},
        )
        path = tmp_path / "s.json"
        iof.save_samples(path, samples)
        back = iof.load_samples(path)
        assert back.counts == samples.counts
        assert back.total_samples == 12
        assert back.metadata == {"seed": 3}

    def test_binned(self, tmp_path):
        u = haar_unitary(4, 92)
        part = ModePartition(m=4, bins=((1, 2), (3,)))
        dist = binned_distribution_exact(u, gram_uniform(3, 1.0), part)
        path = tmp_path / "b.json"
        iof.save_binned(path, dist, "exact")
        back, doc = iof.load_binned(path)
        assert back.partition == part
        assert doc["method"] == "exact"
        assert tvd(back, dist) < 1e-15


class TestPartitionGrammar:
    def test_round_trip(self):
        part = ModePartition(m=4, bins=((1, 2), (3,)))
        assert iof.parse_partition(iof.partition_to_text(part), 4) == part

    def test_rest_keyword(self):
        part = iof.parse_partition("1,2|rest", 5)
        assert part.bins == ((1, 2), (3, 4, 5))

    def test_rest_only_once(self):
        with pytest.raises(ValueError):
            iof.parse_partition("rest|rest", 4)

    def test_rest_empty_rejected(self):
        with pytest.raises(ValueError):
            iof.parse_partition("1,2|rest", 2)

    def test_bad_token(self):
        with pytest.raises(ValueError):
            iof.parse_partition("1,x", 4)

    def test_expand_all_forms(self):
        assert len(iof.expand_partitions("all1", 4)) == 4
        assert len(iof.expand_partitions("all2", 4)) == 6
        assert len(iof.expand_partitions("all12", 4)) == 10
        parts = iof.expand_partitions("1|2;3,4", 4)
        assert parts[0].bins == ((1,), (2,))
        assert parts[1].bins == ((3, 4),)


class TestGridGrammar:
    def test_range_inclusive(self):
        assert np.allclose(iof.parse_grid("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1.0])

    def test_comma_list(self):
        assert np.allclose(iof.parse_grid("0.1,0.9"), [0.1, 0.9])

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            iof.parse_grid("0:1")
        with pytest.raises(ValueError):
            iof.parse_grid("0:1:-0.5")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestCliPipelines:
    def test_haar_gen_and_sweep(self, tmp_path):
        ens = tmp_path / "ens"
        assert main(["haar-gen", "--m", "4", "--count", "5", "--seed", "1", "--out", str(ens)]) == 0
        files = sorted(ens.glob("*.json"))
        assert len(files) == 5
        out = tmp_path / "tvd.csv"
        assert (
            main(
                [
                    "sweep-tvd",
                    "--ensemble",
                    str(ens),
                    "--x-grid",
                    "0:1:0.5",
                    "--partition",
                    "1,2",
                    "--n",
                    "3",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        rows = read_csv(out)
        means = [float(r["mean_tvd"]) for r in rows]
        assert means[0] > means[1] > means[2]
        assert means[-1] == pytest.approx(0.0, abs=1e-12)

    def test_simulate_bin_validate(self, tmp_path):
        u = haar_unitary(4, 93)
        upath, gpath = tmp_path / "u.json", tmp_path / "g.json"
        iof.save_unitary(upath, u)
        iof.save_gram(gpath, gram_uniform(3, 1.0))
        spath = tmp_path / "s.json"
        assert (
            main(
                [
                    "simulate",
                    "--unitary",
                    str(upath),
                    "--gram",
                    str(gpath),
                    "--n",
                    "3",
                    "--samples",
                    "20000",
                    "--seed",
                    "7",
                    "--out",
                    str(spath),
                ]
            )
            == 0
        )
        samples = iof.load_samples(spath)
        assert samples.total_samples == 20000

        bpath = tmp_path / "b.json"
        assert (
            main(
                [
                    "bin",
                    "--unitary",
                    str(upath),
                    "--gram",
                    str(gpath),
                    "--partition",
                    "1,2",
                    "--out",
                    str(bpath),
                ]
            )
            == 0
        )
        dist, doc = iof.load_binned(bpath)
        oracle = binned_distribution_exact(u, gram_uniform(3, 1.0), ModePartition.single_bin(4, (1, 2)))
        assert tvd(dist, oracle) < 1e-12

        rpath = tmp_path / "report.json"
        code = main(
            [
                "validate",
                "--samples",
                str(spath),
                "--unitary",
                str(upath),
                "--gram",
                str(gpath),
                "--threshold",
                "0.05",
                "--out",
                str(rpath),
            ]
        )
        assert code == 0
        report = json.loads(rpath.read_text())
        assert report["worst_case_tvd_bosonic"] < 0.05

    def test_validate_threshold_exit_code(self, tmp_path):
        # samples from distinguishable photons fail a tight bosonic threshold
        u = haar_unitary(4, 94)
        upath, gpath = tmp_path / "u.json", tmp_path / "g.json"
        iof.save_unitary(upath, u)
        iof.save_gram(gpath, gram_uniform(3, 0.0))
        dist = full_distribution(u, gram_uniform(3, 0.0), 3)
        samples = draw_samples(dist, 50_000, seed=95)
        spath = tmp_path / "s.json"
        iof.save_samples(spath, samples)
        rpath = tmp_path / "report.json"
        code = main(
            [
                "validate",
                "--samples",
                str(spath),
                "--unitary",
                str(upath),
                "--gram",
                str(gpath),
                "--threshold",
                "0.01",
                "--out",
                str(rpath),
            ]
        )
        assert code == 2

    def test_bin_gurvits_method(self, tmp_path):
        u = haar_unitary(4, 96)
        upath, gpath = tmp_path / "u.json", tmp_path / "g.json"
        iof.save_unitary(upath, u)
        iof.save_gram(gpath, gram_uniform(3, 0.5))
        bpath = tmp_path / "b.json"
        assert (
            main(
                [
                    "bin",
                    "--unitary",
                    str(upath),
                    "--gram",
                    str(gpath),
                    "--partition",
                    "1|rest",
                    "--method",
                    "gurvits",
                    "--samples-per-point",
                    "20000",
                    "--seed",
                    "4",
                    "--out",
                    str(bpath),
                ]
            )
            == 0
        )
        dist, doc = iof.load_binned(bpath)
        assert doc["method"] == "gurvits"
        assert doc["error_estimate"] > 0.0
        exact = binned_distribution_exact(
            u, gram_uniform(3, 0.5), ModePartition(m=4, bins=((1,), (2, 3, 4)))
        )
        gap = 0.5 * sum(
            abs(dist.probs.get(k, 0.0) - exact.probs.get(k, 0.0))
            for k in set(dist.probs) | set(exact.probs)
        )
        assert gap <= doc["error_estimate"]

    def test_gbp_command(self, tmp_path):
        u = haar_unitary(4, 97)
        upath, gpath = tmp_path / "u.json", tmp_path / "g.json"
        iof.save_unitary(upath, u)
        iof.save_gram(gpath, gram_uniform(3, 0.6))
        opath = tmp_path / "gbp.json"
        assert (
            main(
                [
                    "gbp",
                    "--unitary",
                    str(upath),
                    "--gram",
                    str(gpath),
                    "--subset",
                    "1,2",
                    "--out",
                    str(opath),
                ]
            )
            == 0
        )
        doc = json.loads(opath.read_text())
        assert doc["delta"] == pytest.approx(doc["gbp_bosonic"] - doc["gbp"])
        assert doc["delta"] >= -1e-12
        perm_x = (
            math.factorial(3) * doc["perm_x_over_nfactorial"]
        )
        assert 0.0 < doc["perm_x_over_nfactorial"] <= 1.0
        assert perm_x > 1.0  # perm of a PSD Gram with positive overlaps

    def test_variance_scan(self, tmp_path):
        ens = tmp_path / "ens"
        assert main(["haar-gen", "--m", "4", "--count", "300", "--seed", "2", "--out", str(ens)]) == 0
        out = tmp_path / "var.csv"
        assert (
            main(
                [
                    "variance-scan",
                    "--ensemble",
                    str(ens),
                    "--n",
                    "3",
                    "--bins",
                    "1",
                    "--x",
                    "1",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        row = read_csv(out)[0]
        formula = haar_variance_formula(3, 4, 1, sum_sq_overlaps(gram_uniform(3, 1.0)))
        assert float(row["haar_formula"]) == pytest.approx(formula)
        assert abs(float(row["mean_variance"]) - formula) <= 3 * float(row["stderr"])

    def test_noise_scan(self, tmp_path):
        out = tmp_path / "noise.csv"
        assert (
            main(
                [
                    "noise-scan",
                    "--m",
                    "6",
                    "--eps",
                    "0,0.5,1",
                    "--draws",
                    "30",
                    "--seed",
                    "3",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        rows = read_csv(out)
        fids = [float(r["mean_fidelity"]) for r in rows]
        assert fids[0] == pytest.approx(1.0, abs=1e-12)
        assert fids[0] > fids[1] > fids[2]

    def test_hom_curve(self, tmp_path):
        out = tmp_path / "hom.csv"
        assert (
            main(["hom-curve", "--delays", "0,50,1000", "--sigma", "30", "--out", str(out)])
            == 0
        )
        rows = read_csv(out)
        assert float(rows[0]["coincidence_probability"]) == pytest.approx(0.0, abs=1e-12)
        assert float(rows[0]["visibility"]) == pytest.approx(1.0)
        assert float(rows[-1]["coincidence_probability"]) == pytest.approx(0.5, abs=1e-6)
        probs = [float(r["coincidence_probability"]) for r in rows]
        assert probs[0] < probs[1] < probs[2]

    def test_error_exit_code(self, tmp_path):
        assert (
            main(
                [
                    "bin",
                    "--unitary",
                    str(tmp_path / "missing.json"),
                    "--gram",
                    str(tmp_path / "missing.json"),
                    "--partition",
                    "1",
                    "--out",
                    str(tmp_path / "o.json"),
                ]
            )
            == 1
        )

    def test_threads_flag_does_not_change_results(self, tmp_path):
        u = haar_unitary(4, 98)
        upath, gpath = tmp_path / "u.json", tmp_path / "g.json"
        iof.save_unitary(upath, u)
        iof.save_gram(gpath, gram_uniform(3, 0.9))
        outs = []
        for i, threads in enumerate(("1", "4")):
            bpath = tmp_path / f"b{i}.json"
            assert (
                main(
                    [
                        "--threads",
                        threads,
                        "bin",
                        "--unitary",
                        str(upath),
                        "--gram",
                        str(gpath),
                        "--partition",
                        "1,2",
                        "--out",
                        str(bpath),
                    ]
                )
                == 0
            )
            outs.append(bpath.read_bytes())
        assert outs[0] == outs[1]
