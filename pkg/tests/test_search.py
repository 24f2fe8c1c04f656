import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from exactmip.io import read_instance
from exactmip.model import GE, RawProblem, canonicalize, check_feasible
from exactmip.search import (
    CONFIG_NAMES, INFEASIBLE, LIMIT, OPTIMAL, SolveConfig, select_branch_var, solve,
)
from oracles import brute_force, random_mip

F = Fraction
CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def knapsack() -> RawProblem:
    raw = RawProblem()
    raw.add_var("x1", 0, 1, True)
    raw.add_var("x2", 0, 1, True)
    raw.obj = {0: F(-3), 1: F(-4)}
    raw.add_constraint({0: -2, 1: -3}, GE, -4)
    return raw


@pytest.mark.parametrize("name", CONFIG_NAMES)
def test_knapsack(name):
    res = solve(knapsack(), SolveConfig.preset(name))
    assert res.status == OPTIMAL
    assert res.objective == -4 and res.x == [0, 1]
    assert res.dual_bound == res.objective


@pytest.mark.parametrize("name", CONFIG_NAMES)
def test_infeasible(name):
    raw = RawProblem()
    raw.add_var("x", 0, 1, True)
    raw.add_var("y", 0, 1, True)
    raw.add_constraint({0: 1, 1: 1}, GE, 3)
    assert solve(raw, SolveConfig.preset(name)).status == INFEASIBLE


def test_empty_problem():
    res = solve(RawProblem())
    assert res.status == OPTIMAL and res.objective == 0


def test_integer_bounds_crossing_at_load():
    raw = RawProblem()
    raw.add_var("x", F(1, 3), F(2, 3), True)
    res = solve(raw, SolveConfig(certify=True))
    assert res.status == INFEASIBLE and res.certificate is not None


def test_max_objective_reported_in_original_sense():
    raw = RawProblem(obj_sense="max")
    raw.add_var("x", 0, F(7, 2), True)
    raw.obj = {0: F(2)}
    res = solve(raw)
    assert res.objective == 6 and res.x == [3]


def test_select_branch_var_examples():
    assert select_branch_var([F(1, 2), F(9, 10)], [True, True]) == 0
    assert select_branch_var([F(3, 10), F(7, 10)], [True, True]) == 0
    assert select_branch_var([F(1), F(5, 2)], [True, True]) == 1
    assert select_branch_var([F(1, 2)], [False]) is None


def test_node_limit_reports_dual_bound():
    raw = read_instance(CORPUS / "market_03.mip")
    res = solve(raw, SolveConfig(node_limit=1))
    assert res.status == LIMIT
    assert res.stats.nodes == 1
    full = solve(raw)
    if full.status == OPTIMAL:
        assert res.dual_bound <= full.objective


def test_propagation_prunes_nodes_before_lp():
    # both window rows become tight after a few fixings, so propagation closes
    # nodes that would otherwise need an LP
    raw = read_instance(CORPUS / "knap_infeas_02.mip")
    base = solve(raw, SolveConfig.preset("baseline"))
    cp = solve(raw, SolveConfig.preset("cp"))
    assert base.status == cp.status == INFEASIBLE
    assert cp.stats.prop_pruned > 0
    assert cp.stats.lp_solves < base.stats.lp_solves


def test_pool_rows_prune_later_nodes():
    raw = read_instance(CORPUS / "market_03.mip")
    res = solve(raw, SolveConfig.preset("cp+dpa"))
    assert res.stats.conflicts_created > 0 and res.stats.conflicts_used > 0


def test_deterministic():
    raw = read_instance(CORPUS / "market_02.mip")
    a = solve(raw, SolveConfig.preset("cp+dpa", seed=3))
    b = solve(raw, SolveConfig.preset("cp+dpa", seed=3))
    assert (a.status, a.objective, a.stats.nodes, a.stats.lp_solves) == \
        (b.status, b.objective, b.stats.nodes, b.stats.lp_solves)


def test_unbounded():
    raw = RawProblem()
    raw.add_var("x", 0, float("inf"), True)
    raw.obj = {0: F(-1)}
    assert solve(raw).status == "UNBOUNDED"


def test_unknown_preset():
    with pytest.raises(ValueError):
        SolveConfig.preset("fast")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_matches_brute_force_under_all_configs(seed):
    raw = random_mip(random.Random(seed))
    status, value = brute_force(raw)
    problem = canonicalize(raw)
    for name in CONFIG_NAMES:
        res = solve(problem, SolveConfig.preset(name))
        if status == "infeasible":
            assert res.status == INFEASIBLE
        else:
            assert res.status == OPTIMAL and res.objective == value
            assert check_feasible(problem, res.x)
