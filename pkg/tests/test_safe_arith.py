import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from exactmip.safe_arith import (
    DOWN, MAX_FLOAT, UP, FpInterval, fp_op_dir, fp_to_rat, interval_image, rat_to_fp,
)

finite = st.floats(allow_nan=False, allow_infinity=False)
EXACT = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def neighbors_ok(r: Fraction, lo: float, hi: float) -> bool:
    """No double lies strictly between lo and r, or between r and hi."""
    if not Fraction(lo) <= r <= Fraction(hi):
        return False
    if Fraction(lo) != r and Fraction(math.nextafter(lo, math.inf)) <= r:
        return False
    if Fraction(hi) != r and Fraction(math.nextafter(hi, -math.inf)) >= r:
        return False
    return True


def test_rat_to_fp_representable():
    assert rat_to_fp(Fraction(1, 2), UP) == 0.5
    assert rat_to_fp(Fraction(1, 2), DOWN) == 0.5


def test_rat_to_fp_one_tenth_straddles():
    lo, hi = rat_to_fp(Fraction(1, 10), DOWN), rat_to_fp(Fraction(1, 10), UP)
    assert Fraction(lo) < Fraction(1, 10) < Fraction(hi)
    assert math.nextafter(lo, 1.0) == hi


def test_rat_to_fp_negative_third():
    r = Fraction(-1, 3)
    lo = rat_to_fp(r, DOWN)
    assert Fraction(lo) < r
    assert neighbors_ok(r, lo, rat_to_fp(r, UP))


def test_fp_to_rat_examples():
    assert fp_to_rat(0.75) == Fraction(3, 4)
    assert fp_to_rat(0.1) == Fraction(3602879701896397, 36028797018963968)
    assert fp_to_rat(-0.0) == 0


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_fp_to_rat_rejects_nonfinite(bad):
    with pytest.raises(ValueError):
        fp_to_rat(bad)


def test_interval_image_examples():
    assert interval_image(Fraction(1, 2)) == FpInterval(0.5, 0.5)
    assert interval_image(Fraction(0)) == FpInterval(0.0, 0.0)
    lo, hi = interval_image(Fraction(1, 3))
    assert math.nextafter(lo, 1.0) == hi
    assert Fraction(lo) < Fraction(1, 3) < Fraction(hi)


def test_overflow_saturates():
    assert fp_op_dir("mul", MAX_FLOAT, 2.0, UP) == math.inf
    assert fp_op_dir("mul", MAX_FLOAT, 2.0, DOWN) == MAX_FLOAT
    assert fp_op_dir("add", -MAX_FLOAT, -MAX_FLOAT, DOWN) == -math.inf
    assert rat_to_fp(Fraction(10) ** 400, UP) == math.inf
    assert rat_to_fp(Fraction(10) ** 400, DOWN) == MAX_FLOAT


def test_underflow_steps_to_smallest_subnormal():
    tiny = 5e-324
    assert fp_op_dir("mul", tiny, 0.5, UP) == tiny
    assert fp_op_dir("mul", tiny, 0.5, DOWN) == 0.0


def test_nan_rejected():
    with pytest.raises(ValueError):
        fp_op_dir("add", math.nan, 1.0, UP)


@given(st.sampled_from(sorted(EXACT)), finite, finite)
def test_directed_ops_bracket_exact(op, a, b):
    if op == "div" and b == 0:
        return
    exact = EXACT[op](Fraction(a), Fraction(b))
    lo, hi = fp_op_dir(op, a, b, DOWN), fp_op_dir(op, a, b, UP)
    assert lo == -math.inf or Fraction(lo) <= exact
    assert hi == math.inf or exact <= Fraction(hi)
    if not math.isinf(lo) and not math.isinf(hi):
        assert neighbors_ok(exact, lo, hi)


@given(st.sampled_from(sorted(EXACT)), finite, finite)
def test_exact_results_are_returned_in_both_directions(op, a, b):
    if op == "div" and b == 0:
        return
    exact = EXACT[op](Fraction(a), Fraction(b))
    nearest = {"add": a + b, "sub": a - b, "mul": a * b, "div": a / b if b else 0.0}[op]
    if math.isfinite(nearest) and Fraction(nearest) == exact:
        assert fp_op_dir(op, a, b, UP) == fp_op_dir(op, a, b, DOWN) == nearest


@given(st.fractions(max_denominator=10**30))
def test_rat_to_fp_is_tight(r):
    lo, hi = rat_to_fp(r, DOWN), rat_to_fp(r, UP)
    assert neighbors_ok(r, lo, hi)


@given(finite)
def test_round_trip(x):
    r = fp_to_rat(x)
    assert rat_to_fp(r, UP) == x and rat_to_fp(r, DOWN) == x
