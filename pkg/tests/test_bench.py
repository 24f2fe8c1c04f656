import math
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from exactmip.bench import BenchRecord, BenchReport, run_bench, shifted_geomean

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def test_shifted_geomean_examples():
    assert shifted_geomean([1, 9], 1) == pytest.approx(math.sqrt(20) - 1, rel=1e-12)
    assert shifted_geomean([7.25], 10) == 7.25
    assert shifted_geomean([0, 0, 0], 100) == 0
    with pytest.raises(ValueError):
        shifted_geomean([], 1)


@given(st.floats(0, 1e6), st.integers(1, 50), st.floats(0, 100))
def test_equal_values_come_back(v, n, s):
    assert shifted_geomean([v] * n, s) == pytest.approx(v, rel=1e-12, abs=1e-9)


@given(st.lists(st.floats(0, 1e4), min_size=1, max_size=30), st.floats(0.5, 100))
def test_between_min_and_max(vals, s):
    g = shifted_geomean(vals, s)
    assert min(vals) - 1e-9 * (1 + max(vals)) <= g <= max(vals) * (1 + 1e-12) + 1e-9


def rec(inst, cfg, status="OPTIMAL", t=1.0, nodes=10):
    return BenchRecord(inst, cfg, status, t, nodes, 0.0, 0.0, 1, 0, 0)


def test_identical_configs_give_unit_ratios():
    report = BenchReport(configs=["baseline", "cp"])
    for inst in ("a", "b"):
        for cfg in report.configs:
            report.records.append(rec(inst, cfg))
    lines = report.table().splitlines()
    assert lines[2].count("(1.00)") == 2


def test_unsolved_everywhere_is_excluded():
    report = BenchReport(configs=["baseline", "cp"])
    report.records += [rec("a", "baseline"), rec("a", "cp"),
                       rec("b", "baseline", "LIMIT", 50, 1000), rec("b", "cp", "LIMIT", 50, 1000),
                       rec("c", "baseline")]
    assert report.common_instances() == ["a"]
    assert report.summaries()[1].nodes == 10


def test_run_bench_records_read_errors(tmp_path):
    bad = tmp_path / "bad.mip"
    bad.write_text("nonsense\n")
    report = run_bench([bad, CORPUS / "hand_knapsack.mip"], ["baseline"])
    assert [r.status for r in report.records] == ["ERROR", "OPTIMAL"]
    assert report.records[1].objective == "-4"
