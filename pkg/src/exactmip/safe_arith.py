"""Directed rounding on binary64 and exact rational conversions.

Rounding is emulated portably: the operation is evaluated in
round-to-nearest, the exact error is recovered (error-free transformation or
a rational comparison), and the result is stepped one ulp in the requested
direction when the nearest value lies on the wrong side. The process-global
rounding mode is never touched.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

MAX_FLOAT = 1.7976931348623157e308
INF = math.inf

# Dekker splitting and TwoSum stay exact inside these magnitudes.
_SPLIT_MAX = 2.0 ** 995
_PROD_MIN = 2.0 ** -960
_SUM_MAX = 2.0 ** 1020
_SPLITTER = 134217729.0  # 2**27 + 1


class RoundDir(enum.Enum):
    UP = "up"
    DOWN = "down"


UP = RoundDir.UP
DOWN = RoundDir.DOWN


class FpInterval(NamedTuple):
    lo: float
    hi: float


def _check(a: float, b: float) -> None:
    if a != a or b != b:
        raise ValueError("NaN operand in directed-rounding arithmetic")


def _step(x: float, err_sign: int, direction: RoundDir) -> float:
    # err_sign is sign(exact - x)
    if err_sign > 0 and direction is UP:
        return math.nextafter(x, INF)
    if err_sign < 0 and direction is DOWN:
        return math.nextafter(x, -INF)
    return x


def _overflowed(s: float, direction: RoundDir) -> float:
    # nearest rounding overflowed, so |exact| > MAX_FLOAT with the sign of s
    if s > 0:
        return INF if direction is UP else MAX_FLOAT
    return -MAX_FLOAT if direction is UP else -INF


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def add_dir(a: float, b: float, direction: RoundDir) -> float:
    _check(a, b)
    s = a + b
    if s != s:
        raise ValueError(f"undefined sum {a!r} + {b!r}")
    if math.isinf(s):
        if math.isinf(a) or math.isinf(b):
            return s
        return _overflowed(s, direction)
    if abs(a) > _SUM_MAX or abs(b) > _SUM_MAX:
        return _step(s, _sign(Fraction(a) + Fraction(b) - Fraction(s)), direction)
    # Knuth TwoSum
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _step(s, _sign(err), direction)


def sub_dir(a: float, b: float, direction: RoundDir) -> float:
    _check(a, b)
    return add_dir(a, -b, direction)


def _split(a: float) -> tuple[float, float]:
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def mul_dir(a: float, b: float, direction: RoundDir) -> float:
    _check(a, b)
    p = a * b
    if p != p:
        raise ValueError(f"undefined product {a!r} * {b!r}")
    if math.isinf(p):
        if math.isinf(a) or math.isinf(b):
            return p
        return _overflowed(p, direction)
    if p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0.0
        # underflow of a nonzero product
        return _step(0.0, _sign(a) * _sign(b), direction)
    aa, ab = abs(a), abs(b)
    if _PROD_MIN < aa < _SPLIT_MAX and _PROD_MIN < ab < _SPLIT_MAX and abs(p) > _PROD_MIN:
        # Dekker TwoProduct
        ah, al = _split(a)
        bh, bl = _split(b)
        err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
        return _step(p, _sign(err), direction)
    return _step(p, _sign(Fraction(a) * Fraction(b) - Fraction(p)), direction)


def div_dir(a: float, b: float, direction: RoundDir) -> float:
    _check(a, b)
    if b == 0.0:
        raise ValueError(f"division by zero: {a!r} / {b!r}")
    if math.isinf(a) and math.isinf(b):
        raise ValueError(f"undefined quotient {a!r} / {b!r}")
    if math.isinf(a) or math.isinf(b):
        return a / b
    try:
        q = a / b
    except OverflowError:  # pragma: no cover - CPython returns inf instead
        q = math.copysign(INF, a) * math.copysign(1.0, b)
    if math.isinf(q):
        return _overflowed(q, direction)
    return _step(q, _sign(Fraction(a) / Fraction(b) - Fraction(q)), direction)


_OPS = {"add": add_dir, "sub": sub_dir, "mul": mul_dir, "div": div_dir}


def fp_op_dir(op: str, a: float, b: float, direction: RoundDir) -> float:
    """Apply ``op`` to two doubles, rounding the exact result in ``direction``.

    Up results are never below the exact rational value and Down results never
    above it; exactly representable results are returned unchanged.
    """
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(a, b, direction)


def add_up(a: float, b: float) -> float:
    return add_dir(a, b, UP)


def add_down(a: float, b: float) -> float:
    return add_dir(a, b, DOWN)


def sub_up(a: float, b: float) -> float:
    return add_dir(a, -b, UP)


def sub_down(a: float, b: float) -> float:
    return add_dir(a, -b, DOWN)


def mul_up(a: float, b: float) -> float:
    return mul_dir(a, b, UP)


def mul_down(a: float, b: float) -> float:
    return mul_dir(a, b, DOWN)


def rat_to_fp(r: Fraction, direction: RoundDir) -> float:
    """Tightest double on the requested side of ``r``."""
    r = Fraction(r)
    try:
        f = r.numerator / r.denominator
    except OverflowError:
        return _overflowed(1.0 if r > 0 else -1.0, direction)
    if math.isinf(f):
        return _overflowed(f, direction)
    diff = r - Fraction(f)
    if diff > 0 and direction is UP:
        f = math.nextafter(f, INF)
    elif diff < 0 and direction is DOWN:
        f = math.nextafter(f, -INF)
    return f


def fp_to_rat(x: float) -> Fraction:
    if math.isinf(x) or x != x:
        raise ValueError(f"cannot convert {x!r} to a rational")
    return Fraction(x)


@lru_cache(maxsize=1 << 16)
def interval_image(r: Fraction) -> FpInterval:
    return FpInterval(rat_to_fp(r, DOWN), rat_to_fp(r, UP))


def interval_mul_hi(a: FpInterval, b: FpInterval) -> float:
    """Upper bound on x*y over x in ``a`` and y in ``b``."""
    if a.lo == a.hi and b.lo == b.hi:
        return mul_up(a.lo, b.lo)
    return max(mul_up(a.lo, b.lo), mul_up(a.lo, b.hi),
               mul_up(a.hi, b.lo), mul_up(a.hi, b.hi))


def interval_mul_lo(a: FpInterval, b: FpInterval) -> float:
    if a.lo == a.hi and b.lo == b.hi:
        return mul_down(a.lo, b.lo)
    return min(mul_down(a.lo, b.lo), mul_down(a.lo, b.hi),
               mul_down(a.hi, b.lo), mul_down(a.hi, b.hi))
