import json

import numpy as np
import pytest

from gradembed.cli import cli_main


def run(capsys, *argv):
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    def test_cycle(self, capsys):
        code, out, _ = run(capsys, "gen", "--family", "cycle", "--n", "6")
        assert code == 0
        obj = json.loads(out)
        assert len(obj["labels"]) == 6 and obj["dist"][0][3] == 3

    def test_diamond_counts(self, capsys):
        code, out, _ = run(capsys, "gen", "--family", "diamond", "--k", "2")
        assert code == 0
        assert len(json.loads(out)["labels"]) == 12

    def test_random_needs_seed(self, capsys):
        code, _, err = run(capsys, "gen", "--family", "random", "--n", "5")
        assert code == 2
        assert json.loads(err)["error"] == "UsageError"

    def test_validation_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"labels": [0, 1, 2],
                                   "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}))
        code, _, err = run(capsys, "embed", "--in", str(bad), "--seed", "1")
        assert code == 3
        assert "error" in json.loads(err)

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "embed", "--in", "/nope.json", "--seed", "1")
        assert code == 2


class TestEmbed:
    def test_report_and_determinism(self, capsys, tmp_path):
        mfile = tmp_path / "m.json"
        code, out, _ = run(capsys, "gen", "--family", "cycle", "--n", "8",
                           "--out", str(mfile))
        assert code == 0
        code, out1, _ = run(capsys, "embed", "--in", str(mfile),
                            "--samples", "10", "--seed", "7")
        code2, out2, _ = run(capsys, "embed", "--in", str(mfile),
                             "--samples", "10", "--seed", "7")
        assert code == code2 == 0
        assert out1 == out2  # byte-identical
        obj = json.loads(out1)
        assert obj["report"]["samples"] == 10
        assert obj["report"]["mean_max_gradient"] >= 1.0
        assert "delta" in obj["tree"]


class TestClusterAndOracle:
    def make_tree(self, tmp_path):
        tree = {
            "delta": 8.0,
            "children": [
                {"leaf": "c"},
                {"delta": 2.0, "children": [{"leaf": "a"}, {"leaf": "b"}]},
            ],
        }
        tfile = tmp_path / "t.json"
        tfile.write_text(json.dumps(tree))
        return tfile

    def test_cluster_ft_kmedian(self, capsys, tmp_path):
        tfile = self.make_tree(tmp_path)
        code, out, _ = run(capsys, "cluster", "--objective", "ft_kmedian",
                           "--ultrametric", str(tfile), "--k", "2",
                           "--profile", "2")
        assert code == 0
        sol = json.loads(out)
        assert sol["value"] == 12.0 and sol["objective"] == "ft_kmedian"

    def test_cluster_sigma_lp_inf(self, capsys, tmp_path):
        tfile = self.make_tree(tmp_path)
        code, out, _ = run(capsys, "cluster", "--objective", "sigma_lp",
                           "--ultrametric", str(tfile), "--k", "2",
                           "--p", "inf")
        assert code == 0
        sol = json.loads(out)
        assert sol["params"]["p"] == "inf"
        assert sol["value"] == 2.0

    def test_oracle_mirrors_cluster(self, capsys, tmp_path):
        mfile = tmp_path / "m.json"
        mfile.write_text(json.dumps({
            "labels": ["a", "b", "c"],
            "dist": [[0, 2, 8], [2, 0, 8], [8, 8, 0]],
        }))
        code, out, _ = run(capsys, "oracle", "--objective", "sigma_lp",
                           "--in", str(mfile), "--k", "2", "--p", "2")
        assert code == 0
        assert json.loads(out)["value"] == 2.0

    def test_oracle_infeasible_exit_code(self, capsys, tmp_path):
        rng = np.random.default_rng(0)
        n = 14
        d = np.abs(np.subtract.outer(np.arange(n), np.arange(n))).astype(float)
        mfile = tmp_path / "big.json"
        mfile.write_text(json.dumps({"labels": list(range(n)),
                                     "dist": d.tolist()}))
        code, _, err = run(capsys, "oracle", "--objective", "ft_kmedian",
                           "--in", str(mfile), "--k", "2", "--profile", "1")
        assert code == 4
        assert "error" in json.loads(err)


class TestReduce:
    def test_round_trip(self, capsys, tmp_path):
        mfile = tmp_path / "m.json"
        run(capsys, "gen", "--family", "random", "--n", "6", "--seed", "3",
            "--out", str(mfile))
        code, out, _ = run(capsys, "reduce", "--in", str(mfile),
                           "--objective", "ft_kmedian", "--k", "2",
                           "--profile", "1", "--samples", "4", "--seed", "1")
        assert code == 0
        sol = json.loads(out)
        assert len(sol["centers"]) == 2 and sol["value"] > 0


class TestBenchAndKarp:
    def test_bench_outputs(self, capsys, tmp_path):
        csv_path = tmp_path / "curve.csv"
        code, out, _ = run(capsys, "bench", "--family", "cycle",
                           "--sizes", "8,16", "--samples", "10", "--seed", "2",
                           "--out", str(csv_path))
        assert code == 0
        assert csv_path.exists()
        assert (tmp_path / "curve.png").exists()
        fits = json.loads(out)
        assert "square_log" in fits and "linear_log" in fits

    def test_bench_no_figure(self, capsys, tmp_path):
        csv_path = tmp_path / "c2.csv"
        code, _, _ = run(capsys, "bench", "--family", "path",
                         "--sizes", "8", "--samples", "5", "--seed", "2",
                         "--out", str(csv_path), "--no-figure")
        assert code == 0
        assert not (tmp_path / "c2.png").exists()

    def test_karp(self, capsys):
        code, out, _ = run(capsys, "karp", "--n", "16")
        assert code == 0
        obj = json.loads(out)
        assert obj["max_pair_mean_stretch"] <= 2.0
        assert obj["expected_max_gradient"] > 1.0

    def test_graph_input(self, capsys, tmp_path):
        gfile = tmp_path / "g.json"
        gfile.write_text(json.dumps({"n": 3, "edges": [[0, 1, 1], [1, 2, 1]]}))
        code, out, _ = run(capsys, "oracle", "--objective", "ft_kmedian",
                           "--in", str(gfile), "--k", "1", "--profile", "1")
        assert code == 0
        assert json.loads(out)["value"] == 2.0
