import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from exactmip.model import (
    EQ, GE, INF, LE, LOWER, UPPER, LocalBounds, RawProblem, Row, canonicalize, check_feasible,
    eval_row,
)
from oracles import brute_force, random_mip


def knapsack() -> RawProblem:
    raw = RawProblem()
    raw.add_var("x1", 0, 1, True)
    raw.add_var("x2", 0, 1, True)
    raw.obj = {0: Fraction(-3), 1: Fraction(-4)}
    raw.add_constraint({0: -2, 1: -3}, GE, -4)
    return raw


def test_max_becomes_min():
    raw = RawProblem(obj_sense="max")
    raw.add_var("x", 0, 1)
    raw.obj = {0: Fraction(3)}
    p = canonicalize(raw)
    assert p.c == [-3] and p.obj_sign == -1


def test_le_row_negated():
    raw = RawProblem()
    raw.add_var("x")
    raw.add_var("y")
    raw.add_constraint({0: 2, 1: -1}, LE, 4)
    (row,) = canonicalize(raw).rows
    assert row.as_dict() == {0: -2, 1: 1} and row.rhs == -4
    assert row.cert_mult == -1


def test_eq_row_split_and_linked():
    raw = RawProblem()
    raw.add_var("x")
    raw.add_constraint({0: 1}, EQ, 2)
    a, b = canonicalize(raw).rows
    assert (a.rhs, b.rhs) == (2, -2)
    assert a.link == b.id and b.link == a.id
    assert a.cert_line == b.cert_line == 0


def test_integer_bounds_rounded_inward():
    raw = RawProblem()
    raw.add_var("x", Fraction(1, 2), Fraction(5, 2), True)
    v = canonicalize(raw).variables[0]
    assert (v.lb, v.ub) == (1, 2)


def test_integer_bounds_crossing_flags_infeasible():
    raw = RawProblem()
    raw.add_var("x", Fraction(1, 3), Fraction(2, 3), True)
    assert canonicalize(raw).infeasible_var == 0


def test_eval_row():
    assert eval_row(Row(0, {0: 2, 1: 3}, 0), [Fraction(1), Fraction(1)]) == 5
    assert eval_row(Row(0, {}, 0), [Fraction(7)]) == 0
    assert eval_row(Row(0, {0: Fraction(1, 3)}, 0), [Fraction(3)]) == 1


def test_row_is_sorted_without_zeros():
    row = Row(0, [(3, Fraction(1)), (1, Fraction(2)), (2, Fraction(0)), (1, Fraction(-2))], 0)
    assert row.idx == (3,)
    for a, img in zip(row.coef, row.images):
        assert Fraction(img.lo) <= a <= Fraction(img.hi)


def test_check_feasible_examples():
    p = canonicalize(knapsack())
    assert check_feasible(p, [Fraction(0), Fraction(1)])
    assert not check_feasible(p, [Fraction(1), Fraction(1)])
    assert not check_feasible(p, [Fraction(1, 2), Fraction(0)])


def test_bound_change_and_undo():
    b = LocalBounds([Fraction(0)], [Fraction(2)], [False])
    b.push()
    b.apply(0, LOWER, Fraction(4, 3))
    assert (b.lb[0], b.ub[0]) == (Fraction(4, 3), 2)
    b.undo_to(0)
    assert (b.lb[0], b.ub[0]) == (0, 2)


def test_integer_bound_must_be_integral():
    b = LocalBounds([Fraction(0)], [Fraction(2)], [True])
    with pytest.raises(AssertionError):
        b.apply(0, LOWER, Fraction(4, 3))


def test_loosening_rejected():
    b = LocalBounds([Fraction(0)], [Fraction(2)], [False])
    with pytest.raises(AssertionError):
        b.apply(0, UPPER, Fraction(3))


def test_crossing_is_not_an_error():
    b = LocalBounds([Fraction(0)], [Fraction(2)], [False])
    b.apply(0, LOWER, Fraction(3))
    assert b.crossed() == 0


def test_listeners_see_changes_and_undos():
    seen = []
    b = LocalBounds([Fraction(0)], [INF], [False])
    b.listeners.append(lambda *ev: seen.append(ev))
    b.push()
    b.apply(0, UPPER, Fraction(5))
    b.undo_to(0)
    assert seen == [(0, UPPER, INF, 5), (0, UPPER, 5, INF)]


@settings(max_examples=50, deadline=None)
@given(st.randoms(use_true_random=False))
def test_apply_undo_round_trip(rng):
    n = 4
    lb = [Fraction(rng.randint(-5, 0)) for _ in range(n)]
    ub = [Fraction(rng.randint(1, 5)) for _ in range(n)]
    b = LocalBounds(lb, ub, [rng.random() < 0.5 for _ in range(n)])
    before = b.snapshot()
    for _ in range(rng.randint(1, 6)):
        b.push()
        for _ in range(rng.randint(0, 5)):
            i = rng.randrange(n)
            if b.lb[i] >= b.ub[i]:
                continue
            side = rng.choice([LOWER, UPPER])
            v = Fraction(rng.randint(int(b.lb[i]) * 4, int(b.ub[i]) * 4), 4)
            if b.is_int[i]:
                v = Fraction(round(v))
            if (side == LOWER and v > b.lb[i]) or (side == UPPER and v < b.ub[i]):
                b.apply(i, side, v)
    b.undo_to(0)
    assert b.snapshot() == before


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_canonicalization_preserves_optimum(seed):
    raw = random_mip(random.Random(seed), n_max=4, m_max=4, max_den=50)
    p = canonicalize(raw)
    # rebuild a raw problem from the canonical rows and compare brute-force optima
    again = RawProblem(obj_sense="min")
    for v in p.variables:
        again.add_var(v.name, v.lb, v.ub, v.is_integer)
    again.obj = {i: ci for i, ci in enumerate(p.c) if ci}
    for row in p.rows:
        again.add_constraint(row.as_dict(), GE, row.rhs)
    s1, v1 = brute_force(raw)
    s2, v2 = brute_force(again)
    assert s1 == s2
    if s1 == "optimal":
        assert v1 == p.obj_sign * v2
