import csv
import json

import numpy as np
import pytest
from conftest import random_graph, random_mlp

from nieblock import (
    compute_node_stats,
    run_quality_within_budget,
    run_time_to_target,
    write_report,
)


@pytest.fixture(scope="module")
def bench_graph():
    return random_graph(np.random.default_rng(70), 20, 60, min_nodes=20)


@pytest.fixture(scope="module")
def surrogate(bench_graph):
    rng = np.random.default_rng(71)
    stats = compute_node_stats(bench_graph)
    return random_mlp(rng, bench_graph), stats


def quality_columns(report):
    return [
        (r.problem_id, r.method, r.blocked_influence, r.evaluations_used, r.reached_target)
        for r in report.rows
    ]


class TestQualityMode:
    def test_rows_and_flags(self, bench_graph):
        report = run_quality_within_budget(
            bench_graph, [[0, 1], [2]], ["mcs"], budget_seconds=120.0,
            mcs_r=100, eval_r=200, seed=0,
        )
        assert [r.problem_id for r in report.rows] == ["p0", "p1"]
        for row in report.rows:
            assert row.method == "mcs"
            assert row.reached_target
            assert row.blocked_influence is not None and row.blocked_influence >= 0.0
            assert row.evaluations_used > 0
            assert row.runtime_seconds >= 0.0
        assert report.environment["mode"] == "quality-within-budget"
        assert report.environment["graph_fingerprint"] == bench_graph.fingerprint

    def test_both_methods_ordered(self, bench_graph, surrogate):
        model, stats = surrogate
        report = run_quality_within_budget(
            bench_graph, [[0, 1]], ["nie", "mcs"], budget_seconds=120.0,
            model=model, stats=stats, mcs_r=100, eval_r=200, seed=0,
        )
        assert [(r.problem_id, r.method) for r in report.rows] == [("p0", "nie"), ("p0", "mcs")]

    def test_starved_budget_reports_absent_quality(self, bench_graph):
        report = run_quality_within_budget(
            bench_graph, [[0, 1]], ["mcs"], budget_seconds=1e-9,
            mcs_r=100, eval_r=200, seed=0,
        )
        (row,) = report.rows
        assert row.blocked_influence is None
        assert not row.reached_target

    def test_quality_columns_reproducible(self, bench_graph, surrogate):
        model, stats = surrogate
        kwargs = dict(
            budget_seconds=120.0, model=model, stats=stats, mcs_r=100, eval_r=200, seed=3
        )
        a = run_quality_within_budget(bench_graph, [[0, 5], [1]], ["nie", "mcs"], **kwargs)
        b = run_quality_within_budget(bench_graph, [[0, 5], [1]], ["nie", "mcs"], **kwargs)
        assert quality_columns(a) == quality_columns(b)

    def test_k_override(self, bench_graph):
        report = run_quality_within_budget(
            bench_graph, [[0]], ["mcs"], budget_seconds=120.0,
            mcs_r=50, eval_r=100, seed=0, k=3,
        )
        assert report.rows[0].reached_target

    def test_validation(self, bench_graph):
        with pytest.raises(ValueError, match="budget_seconds"):
            run_quality_within_budget(bench_graph, [[0]], ["mcs"], budget_seconds=0.0)
        with pytest.raises(ValueError, match="unknown method"):
            run_quality_within_budget(bench_graph, [[0]], ["simulated-annealing"], budget_seconds=1.0)
        with pytest.raises(ValueError, match="nonempty"):
            run_quality_within_budget(bench_graph, [[0]], [], budget_seconds=1.0)
        with pytest.raises(ValueError, match="needs a trained model"):
            run_quality_within_budget(bench_graph, [[0]], ["nie"], budget_seconds=1.0)


class TestTimeToTarget:
    def test_trivial_target_reached_at_first_pick(self, bench_graph):
        report = run_time_to_target(
            bench_graph, [[0, 1]], ["mcs"], target_source=0.0,
            mcs_r=100, eval_r=200, seed=0,
        )
        (row,) = report.rows
        assert row.reached_target
        assert row.runtime_seconds == 0.0
        assert row.blocked_influence is not None

    def test_unreachable_target_times_out(self, bench_graph):
        report = run_time_to_target(
            bench_graph, [[0, 1]], ["mcs"], target_source=1e9,
            mcs_r=100, eval_r=200, seed=0, budget_seconds=120.0,
        )
        (row,) = report.rows
        assert not row.reached_target
        assert row.runtime_seconds == 120.0
        assert row.blocked_influence is not None  # final incumbent still evaluated

    def test_nie_final_produces_target_then_chasers(self, bench_graph, surrogate):
        model, stats = surrogate
        report = run_time_to_target(
            bench_graph, [[0, 1], [2, 3]], ["nie", "mcs"],
            model=model, stats=stats, mcs_r=100, eval_r=200, seed=0,
        )
        assert [(r.problem_id, r.method) for r in report.rows] == [
            ("p0", "nie"), ("p0", "mcs"), ("p1", "nie"), ("p1", "mcs"),
        ]
        for row in report.rows:
            if row.method == "nie":
                assert row.reached_target
                assert row.blocked_influence is not None
        assert report.environment["target_source"] == "nie_final"

    def test_nie_final_requires_nie_method(self, bench_graph):
        with pytest.raises(ValueError, match="requires the 'nie' method"):
            run_time_to_target(bench_graph, [[0]], ["mcs"], mcs_r=10, eval_r=10)


class TestWriteReport:
    def test_csv_and_sidecar(self, bench_graph, tmp_path):
        report = run_quality_within_budget(
            bench_graph, [[0, 1]], ["mcs"], budget_seconds=120.0,
            mcs_r=100, eval_r=200, seed=0,
        )
        csv_path = tmp_path / "out.csv"
        write_report(report, str(csv_path))
        with open(csv_path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "problem_id", "method", "runtime_seconds", "blocked_influence",
            "evaluations_used", "reached_target",
        ]
        assert rows[1][0] == "p0" and rows[1][1] == "mcs"
        assert float(rows[1][2]) >= 0.0
        assert rows[1][3] == repr(report.rows[0].blocked_influence)
        assert rows[1][5] == "true"
        meta = json.loads((tmp_path / "out.meta.json").read_text())
        assert meta["graph_fingerprint"] == bench_graph.fingerprint
        assert meta["budget_seconds"] == 120.0

    def test_absent_quality_written_empty(self, bench_graph, tmp_path):
        report = run_quality_within_budget(
            bench_graph, [[0, 1]], ["mcs"], budget_seconds=1e-9,
            mcs_r=100, eval_r=100, seed=0,
        )
        csv_path = tmp_path / "none.csv"
        write_report(report, str(csv_path))
        with open(csv_path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[1][3] == ""
        assert rows[1][5] == "false"

    def test_explicit_sidecar_path(self, bench_graph, tmp_path):
        report = run_quality_within_budget(
            bench_graph, [[0]], ["mcs"], budget_seconds=120.0, mcs_r=20, eval_r=20, seed=0
        )
        write_report(report, str(tmp_path / "a.csv"), str(tmp_path / "b.json"))
        assert (tmp_path / "b.json").exists()
        assert not (tmp_path / "a.meta.json").exists()

    def test_quality_columns_stable_across_reruns(self, bench_graph, tmp_path):
        def make():
            return run_quality_within_budget(
                bench_graph, [[0, 1], [4]], ["mcs"], budget_seconds=120.0,
                mcs_r=100, eval_r=200, seed=1,
            )

        p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        write_report(make(), str(p1))
        write_report(make(), str(p2))

        def stable_columns(path):
            with open(path, newline="") as fh:
                rows = list(csv.reader(fh))
            return [(r[0], r[1], r[3], r[4], r[5]) for r in rows[1:]]

        assert stable_columns(p1) == stable_columns(p2)
        meta1 = (p1.parent / "r1.meta.json").read_text()
        meta2 = (p2.parent / "r2.meta.json").read_text()
        assert meta1 == meta2
