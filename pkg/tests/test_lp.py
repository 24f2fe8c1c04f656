import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from exactmip.lp import (
    INFEASIBLE, OPTIMAL, UNBOUNDED, dual_objective, degrade_duals, solve_lp, verify_farkas_ray,
)
from exactmip.model import INF, Row, canonicalize
from checks import Box, check_lp
from oracles import brute_force, random_mip

F = Fraction


def test_simple_optimum_with_duals():
    rows = [Row(0, {0: 1, 1: 1}, 1)]
    box = Box([F(0), F(0)], [F(1), F(1)])
    out = solve_lp(rows, [F(1), F(1)], box)
    assert out.status == OPTIMAL and out.value == 1
    assert out.y == [1] and out.r == [0, 0]
    assert dual_objective(rows, out.y, out.r, box.lb, box.ub) == out.value


def test_infeasible_gives_farkas_ray():
    rows = [Row(0, {0: 1, 1: 1}, 3)]
    box = Box([F(0), F(0)], [F(1), F(1)])
    out = solve_lp(rows, [F(0), F(0)], box)
    assert out.status == INFEASIBLE
    assert out.y[0] > 0 and verify_farkas_ray(out.y, rows, box)


def test_unbounded():
    out = solve_lp([], [F(-1)], Box([F(0)], [INF]))
    assert out.status == UNBOUNDED


def test_farkas_verdicts():
    rows = [Row(0, {0: 1, 1: 1}, 3)]
    box = Box([F(0), F(0)], [F(1), F(1)])
    assert verify_farkas_ray([F(1)], rows, box)
    assert not verify_farkas_ray([F(0)], rows, box)
    assert verify_farkas_ray([F(5)], rows, box)
    assert not verify_farkas_ray([F(-1)], rows, box)


def test_crossed_box_rejected():
    with pytest.raises(ValueError):
        solve_lp([], [F(0)], Box([F(1)], [F(0)]))


def test_degrade_duals_examples():
    assert degrade_duals([F(1, 3)]) == [1 / 3]
    assert degrade_duals([F(-1, 10**12)]) == [0.0]
    assert degrade_duals([F(0), F(2)]) == [0.0, 2.0]


def test_degrade_duals_noise_is_seeded_and_small():
    y = [F(1, 3), F(5), F(0)]
    a = degrade_duals(y, 1e-9, seed=4)
    assert a == degrade_duals(y, 1e-9, seed=4)
    assert a[2] == 0.0
    for v, exact in zip(a, y):
        assert abs(F(v) - exact) <= F(2, 10**9) * exact + F(1, 10**15)


def test_determinism():
    rng = random.Random(11)
    from checks import random_lp
    rows, c, box = random_lp(rng)
    a, b = solve_lp(rows, c, box), solve_lp(rows, c, box)
    assert (a.status, a.x, a.y, a.value) == (b.status, b.x, b.y, b.value)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_strong_duality_and_farkas(seed):
    check_lp(random.Random(seed))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_agrees_with_vertex_enumeration(seed):
    raw = random_mip(random.Random(seed), n_max=4, m_max=5, max_den=100, int_frac=0.0)
    p = canonicalize(raw)
    box = Box([v.lb for v in p.variables], [v.ub for v in p.variables])
    out = solve_lp(p.rows, p.c, box)
    status, value = brute_force(raw)
    if status == "infeasible":
        assert out.status == INFEASIBLE
    else:
        assert out.status == OPTIMAL and p.obj_sign * out.value == value
