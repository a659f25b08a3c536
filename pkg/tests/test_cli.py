import json

import numpy as np
import pytest

from nieblock import cli


def write_lines(path, rows):
    path.write_text("".join(f"{u} {v} {p}\n" for u, v, p in rows))
    return str(path)


@pytest.fixture(scope="module")
def graphs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cligraphs")
    path3 = write_lines(root / "path3.txt", [(0, 1, 1.0), (1, 2, 1.0)])
    fourcoin = write_lines(root / "fourcoin.txt", [(0, 1, 1.0), (0, 2, 0.5), (1, 2, 0.5)])
    # a 30-node graph with every node on the cycle so ids survive loading
    rng = np.random.default_rng(80)
    rows = [(i, (i + 1) % 30, round(float(rng.uniform(0.2, 1.0)), 3)) for i in range(30)]
    seen = {(u, v) for u, v, _ in rows}
    while len(rows) < 90:
        u, v = int(rng.integers(30)), int(rng.integers(30))
        if u != v and (u, v) not in seen:
            seen.add((u, v))
            rows.append((u, v, round(float(rng.uniform(0.2, 1.0)), 3)))
    medium = write_lines(root / "medium.txt", rows)
    big_star = write_lines(
        root / "star22.txt", [(0, i, 0.5) for i in range(1, 22)]
    )
    return {"path3": path3, "fourcoin": fourcoin, "medium": medium, "star22": big_star}


@pytest.fixture(scope="module")
def pipeline(graphs, tmp_path_factory):
    """stats -> dataset -> model artifacts for the medium graph, built once."""
    root = tmp_path_factory.mktemp("cliwork")
    stats = str(root / "stats.json")
    dataset = str(root / "data.jsonl")
    model = str(root / "model.json")
    assert cli.main(["precompute", "--graph", graphs["medium"], "--out", stats]) == 0
    assert (
        cli.main(
            [
                "gendata", "--graph", graphs["medium"], "--stats", stats,
                "--count", "24", "--label-r", "25", "--rho", "1.0",
                "--seed", "0", "--out", dataset,
            ]
        )
        == 0
    )
    assert (
        cli.main(
            [
                "train", "--dataset", dataset, "--out", model,
                "--batch-size", "16", "--max-epochs", "6", "--patience", "3",
                "--seed", "0",
            ]
        )
        == 0
    )
    return {"stats": stats, "dataset": dataset, "model": model, "root": root}


class TestPrecompute:
    def test_idempotent_cache(self, graphs, tmp_path):
        out = tmp_path / "stats.json"
        assert cli.main(["precompute", "--graph", graphs["path3"], "--out", str(out)]) == 0
        first = out.read_bytes()
        assert cli.main(["precompute", "--graph", graphs["path3"], "--out", str(out)]) == 0
        assert out.read_bytes() == first

    def test_corrupted_cache_regenerated(self, graphs, tmp_path):
        out = tmp_path / "stats.json"
        assert cli.main(["precompute", "--graph", graphs["path3"], "--out", str(out)]) == 0
        good = out.read_bytes()
        out.write_text("{broken")
        with pytest.warns(UserWarning, match="regenerating"):
            assert cli.main(["precompute", "--graph", graphs["path3"], "--out", str(out)]) == 0
        assert out.read_bytes() == good

    def test_explicit_sampled_mode(self, graphs, tmp_path):
        out = tmp_path / "s.json"
        rc = cli.main(
            [
                "precompute", "--graph", graphs["medium"], "--out", str(out),
                "--closeness-mode", "sampled", "--sample-size", "30",
            ]
        )
        assert rc == 0
        # sample covering every node reproduces exact output
        exact = tmp_path / "e.json"
        assert cli.main(
            ["precompute", "--graph", graphs["medium"], "--out", str(exact),
             "--closeness-mode", "exact"]
        ) == 0
        s = json.loads(out.read_text())
        e = json.loads(exact.read_text())
        assert s["closeness"] == e["closeness"]


class TestGendata:
    def test_rerun_and_threads_identical(self, graphs, pipeline, tmp_path):
        args = [
            "gendata", "--graph", graphs["medium"], "--stats", pipeline["stats"],
            "--count", "12", "--label-r", "20", "--rho", "1.0", "--seed", "3",
        ]
        a, b, c = (tmp_path / n for n in ("a.jsonl", "b.jsonl", "c.jsonl"))
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0
        assert cli.main(args + ["--out", str(c), "--threads", "2"]) == 0
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()

    def test_seed_changes_data(self, graphs, pipeline, tmp_path):
        base = [
            "gendata", "--graph", graphs["medium"], "--stats", pipeline["stats"],
            "--count", "6", "--label-r", "10", "--rho", "1.0",
        ]
        a, b = tmp_path / "s0.jsonl", tmp_path / "s1.jsonl"
        assert cli.main(base + ["--seed", "0", "--out", str(a)]) == 0
        assert cli.main(base + ["--seed", "1", "--out", str(b)]) == 0
        assert a.read_bytes() != b.read_bytes()

    def test_no_features(self, graphs, tmp_path):
        out = tmp_path / "nf.jsonl"
        rc = cli.main(
            [
                "gendata", "--graph", graphs["medium"], "--count", "4",
                "--label-r", "10", "--rho", "1.0", "--no-features",
                "--out", str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 5
        assert "features" not in lines[1]


class TestTrain:
    def test_rerun_identical(self, pipeline, tmp_path):
        args = [
            "train", "--dataset", pipeline["dataset"],
            "--batch-size", "16", "--max-epochs", "6", "--patience", "3",
            "--seed", "0",
        ]
        a, b = tmp_path / "m1.json", tmp_path / "m2.json"
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_reports_progress(self, pipeline, tmp_path, capsys):
        out = tmp_path / "m.json"
        assert (
            cli.main(
                ["train", "--dataset", pipeline["dataset"], "--out", str(out),
                 "--batch-size", "16", "--max-epochs", "2", "--patience", "2"]
            )
            == 0
        )
        assert "epochs" in capsys.readouterr().out


class TestSolve:
    def test_exact_on_path(self, graphs, tmp_path):
        out = tmp_path / "sol.json"
        rc = cli.main(
            [
                "solve", "--graph", graphs["path3"], "--sf", "0",
                "--estimator", "exact", "--eval-r", "200", "--out", str(out),
            ]
        )
        assert rc == 0
        sol = json.loads(out.read_text())
        assert sol["s_f"] == [0]
        assert sol["s_t"] == [1]
        assert sol["k"] == 1
        assert sol["estimator"] == "exact"
        assert sol["predicted"] == 2.0
        assert sol["mcs_value"] == 2.0  # certain edges: every replication blocks both
        assert sol["mcs_replications"] == 200

    def test_nie_pipeline(self, graphs, pipeline, tmp_path):
        out1, out2 = tmp_path / "n1.json", tmp_path / "n2.json"
        args = [
            "solve", "--graph", graphs["medium"], "--sf", "0,3",
            "--estimator", "nie", "--model", pipeline["model"],
            "--stats", pipeline["stats"], "--eval-r", "300", "--seed", "0",
        ]
        assert cli.main(args + ["--out", str(out1)]) == 0
        assert cli.main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        sol = json.loads(out1.read_text())
        assert len(sol["s_t"]) == 2
        assert not set(sol["s_t"]) & {0, 3}

    def test_mcs_estimator(self, graphs, tmp_path):
        out = tmp_path / "m.json"
        rc = cli.main(
            [
                "solve", "--graph", graphs["fourcoin"], "--sf", "0",
                "--estimator", "mcs", "--mcs-r", "400", "--eval-r", "400",
                "--out", str(out),
            ]
        )
        assert rc == 0
        sol = json.loads(out.read_text())
        assert sol["s_t"] == [1]  # clear winner even at modest replication counts

    def test_nie_requires_model(self, graphs, capsys):
        rc = cli.main(["solve", "--graph", graphs["path3"], "--sf", "0"])
        assert rc == 1
        assert "requires --model" in capsys.readouterr().err

    def test_at_file_ids(self, graphs, tmp_path):
        idfile = tmp_path / "ids.txt"
        idfile.write_text("0\n")
        out = tmp_path / "sol.json"
        rc = cli.main(
            [
                "solve", "--graph", graphs["path3"], "--sf", f"@{idfile}",
                "--estimator", "exact", "--eval-r", "50", "--out", str(out),
            ]
        )
        assert rc == 0
        assert json.loads(out.read_text())["s_f"] == [0]


class TestEval:
    def test_crn_anchor_stdout(self, graphs, capsys):
        rc = cli.main(["eval", "--graph", graphs["fourcoin"], "--sf", "0", "--r", "100"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["mean"] == 0.0
        assert payload["std_error"] == 0.0
        assert payload["replications"] == 100

    def test_eval_to_file(self, graphs, tmp_path, capsys):
        out = tmp_path / "e.json"
        rc = cli.main(
            ["eval", "--graph", graphs["path3"], "--sf", "0", "--st", "1",
             "--r", "50", "--out", str(out)]
        )
        assert rc == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["mean"] == 2.0

    def test_missing_graph_errors(self, capsys):
        rc = cli.main(["eval", "--graph", "/nonexistent/g.txt", "--sf", "0"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestBench:
    def test_quality_mode_end_to_end(self, graphs, tmp_path):
        problems = tmp_path / "problems.txt"
        problems.write_text("# two problems\n0,1\n2 3\n")
        out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        args = [
            "bench", "--graph", graphs["medium"], "--problems", str(problems),
            "--methods", "mcs", "--mcs-r", "60", "--eval-r", "100",
            "--budget", "60", "--seed", "2",
        ]
        assert cli.main(args + ["--out", str(out1)]) == 0
        assert cli.main(args + ["--out", str(out2)]) == 0
        rows1 = out1.read_text().splitlines()
        assert rows1[0].startswith("problem_id,method,")
        assert len(rows1) == 3

        def stable(path):
            lines = path.read_text().splitlines()[1:]
            return [
                (c[0], c[1], c[3], c[4], c[5])
                for c in (ln.split(",") for ln in lines)
            ]

        assert stable(out1) == stable(out2)
        assert (tmp_path / "r1.meta.json").read_text() == (tmp_path / "r2.meta.json").read_text()

    def test_time_to_target_explicit(self, graphs, tmp_path):
        problems = tmp_path / "p.txt"
        problems.write_text("0,1\n")
        out = tmp_path / "t.csv"
        rc = cli.main(
            [
                "bench", "--graph", graphs["medium"], "--problems", str(problems),
                "--methods", "mcs", "--mode", "time-to-target", "--target", "0.0",
                "--mcs-r", "40", "--eval-r", "60", "--out", str(out),
            ]
        )
        assert rc == 0
        body = out.read_text().splitlines()[1]
        assert body.endswith("true")

    def test_empty_problems_errors(self, graphs, tmp_path, capsys):
        problems = tmp_path / "empty.txt"
        problems.write_text("# nothing here\n")
        rc = cli.main(
            ["bench", "--graph", graphs["medium"], "--problems", str(problems),
             "--methods", "mcs", "--out", str(tmp_path / "x.csv")]
        )
        assert rc == 1
        assert "no problems" in capsys.readouterr().err

    def test_unknown_method_errors(self, graphs, tmp_path, capsys):
        problems = tmp_path / "p.txt"
        problems.write_text("0\n")
        rc = cli.main(
            ["bench", "--graph", graphs["medium"], "--problems", str(problems),
             "--methods", "voodoo", "--out", str(tmp_path / "x.csv")]
        )
        assert rc == 1
        assert "unknown method" in capsys.readouterr().err


class TestOracle:
    def test_fourcoin_value(self, graphs, capsys):
        rc = cli.main(["oracle", "--graph", graphs["fourcoin"], "--sf", "0", "--st", "1"])
        assert rc == 0
        assert capsys.readouterr().out == "1.25\n"

    def test_refuses_large_graphs(self, graphs, capsys):
        rc = cli.main(["oracle", "--graph", graphs["star22"], "--sf", "0", "--st", "1"])
        assert rc == 1
        assert "max_edges" in capsys.readouterr().err

    def test_max_edges_override(self, graphs, capsys):
        rc = cli.main(
            ["oracle", "--graph", graphs["star22"], "--sf", "0", "--st", "1",
             "--max-edges", "21"]
        )
        assert rc == 0
        # star with p=0.5 edges: seeding one leaf true blocks exactly the
        # half-probability false activation of that leaf
        assert capsys.readouterr().out == "0.5\n"


class TestErrors:
    def test_gendata_bad_count(self, graphs, tmp_path, capsys):
        rc = cli.main(
            ["gendata", "--graph", graphs["medium"], "--count", "0",
             "--out", str(tmp_path / "x.jsonl")]
        )
        assert rc == 1
        assert "count" in capsys.readouterr().err

    def test_solve_empty_sf(self, graphs, capsys):
        rc = cli.main(
            ["solve", "--graph", graphs["path3"], "--sf", "", "--estimator", "exact"]
        )
        assert rc == 1
        assert "--sf" in capsys.readouterr().err
