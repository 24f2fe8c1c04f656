"""Dual proof analysis with safely rounded aggregation, plus the conflict pool.

A conflict row is a nonnegative combination of GE model rows (and, for
bound-exceeding nodes, the objective cutoff ``-c x >= -cutoff``) accumulated in
floating point. Each coefficient is rounded in the direction that weakens the
row over the global box; when neither direction is safe by sign alone, the
rounding error is paid for in the right-hand side using a finite bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .model import INF, Row
from .safe_arith import (
    DOWN, UP, FpInterval, add_down, add_up, interval_mul_hi, interval_mul_lo,
    mul_down, mul_up, rat_to_fp, sub_down, sub_up,
)

FARKAS, BOUND_EXCEEDING = "farkas", "bound_exceeding"

SPARSIFY_REL = 1e-12

# compensation cases, recorded per variable for testing
CASE_NONPOS, CASE_NONNEG, CASE_UB, CASE_LB, CASE_FREE = "a", "b", "c", "d", "free"


@dataclass
class ConflictRow:
    coefs: dict[int, float]
    rhs: float
    origin: str
    y: list[float]
    cutoff: Optional[Fraction] = None
    obj_mult: float = 0.0
    cases: dict[int, str] = field(default_factory=dict)
    age: int = 0
    id: Optional[int] = None
    cert_line: Optional[int] = None

    def exact_terms(self) -> dict[int, Fraction]:
        return {i: Fraction(a) for i, a in sorted(self.coefs.items())}

    def exact_rhs(self) -> Fraction:
        return Fraction(self.rhs)

    def key(self) -> tuple:
        return tuple(sorted(self.coefs.items())), self.rhs

    def to_row(self, row_id: int) -> Row:
        return Row(row_id, self.exact_terms(), self.exact_rhs(), origin="conflict",
                   cert_line=self.cert_line, cert_mult=1)

    def __len__(self) -> int:
        return len(self.coefs)


class _Aggregator:
    def __init__(self, lb: Sequence, ub: Sequence):
        self.lb, self.ub = lb, ub
        self.coefs: dict[int, float] = {}
        self.rhs = 0.0
        self.cases: dict[int, str] = {}
        self.failed = False

    def fold(self, mult: float, terms, images, rhs_image) -> None:
        mimg = FpInterval(mult, mult)
        self.rhs = add_down(self.rhs, interval_mul_lo(mimg, rhs_image))
        for (i, _), img in zip(terms, images):
            cur = self.coefs.get(i, 0.0)
            s_hi = add_up(cur, interval_mul_hi(mimg, img))
            s_lo = add_down(cur, interval_mul_lo(mimg, img))
            self._set(i, s_lo, s_hi)

    def _set(self, i: int, s_lo: float, s_hi: float) -> None:
        l, u = self.lb[i], self.ub[i]
        if s_lo == s_hi:
            self.coefs[i] = s_lo
            self.cases.setdefault(i, _case(l, u))
            return
        case = _case(l, u)
        self.cases[i] = case
        width = sub_up(s_hi, s_lo)
        if case == CASE_NONPOS:
            self.coefs[i] = s_lo
        elif case == CASE_NONNEG:
            self.coefs[i] = s_hi
        elif case == CASE_UB:
            # coefficient pushed down by < width, costs at most width * u
            self.coefs[i] = s_lo
            self.rhs = sub_down(self.rhs, mul_up(width, rat_to_fp(u, UP)))
        elif case == CASE_LB:
            # coefficient pushed up by < width, costs at most width * |l|
            self.coefs[i] = s_hi
            self.rhs = add_down(self.rhs, mul_down(width, rat_to_fp(l, DOWN)))
        else:
            self.failed = True


def _case(l, u) -> str:
    if u <= 0:
        return CASE_NONPOS
    if l >= 0:
        return CASE_NONNEG
    if u != INF:
        return CASE_UB
    if l != -INF:
        return CASE_LB
    return CASE_FREE


def aggregate_safe(y: Sequence[float], rows: Sequence[Row], lb: Sequence, ub: Sequence,
                   mode: str = FARKAS, c: Optional[Sequence[Fraction]] = None,
                   cutoff: Optional[Fraction] = None) -> Optional[ConflictRow]:
    """Fold ``sum_j y_j row_j`` (plus the cutoff row) into a globally valid GE row.

    ``lb``/``ub`` are the global bounds. Returns ``None`` when the aggregation
    must be abandoned (inexact coefficient on a free variable) or the result
    is trivially satisfied.
    """
    if any(v < 0 or v != v for v in y):
        raise ValueError("dual multipliers must be nonnegative")
    if mode == BOUND_EXCEEDING and (c is None or cutoff is None):
        raise ValueError("bound-exceeding aggregation needs objective and cutoff")
    ymax = max(y, default=0.0)
    y = [v if v >= SPARSIFY_REL * ymax else 0.0 for v in y]
    agg = _Aggregator(lb, ub)
    for yj, row in zip(y, rows):
        if yj:
            agg.fold(yj, row.terms(), row.images, row.rhs_image)
    if mode == BOUND_EXCEEDING:
        obj = Row(-1, [(i, -ci) for i, ci in enumerate(c) if ci], -Fraction(cutoff))
        agg.fold(1.0, obj.terms(), obj.images, obj.rhs_image)
    if agg.failed:
        return None
    coefs = {i: a for i, a in sorted(agg.coefs.items()) if a != 0.0}
    if not coefs and agg.rhs <= 0:
        return None
    if math.isinf(agg.rhs):
        return None
    return ConflictRow(coefs, agg.rhs, mode, list(y),
                       cutoff=Fraction(cutoff) if mode == BOUND_EXCEEDING else None,
                       obj_mult=1.0 if mode == BOUND_EXCEEDING else 0.0,
                       cases={i: agg.cases[i] for i in coefs})


def exact_aggregate(y: Sequence[float], rows: Sequence[Row], mode: str = FARKAS,
                    c=None, cutoff=None) -> tuple[dict[int, Fraction], Fraction]:
    """Rational combination with the same (sparsified) multipliers; test oracle."""
    ymax = max(y, default=0.0)
    coefs: dict[int, Fraction] = {}
    rhs = Fraction(0)
    for yj, row in zip(y, rows):
        if yj and yj >= SPARSIFY_REL * ymax:
            fy = Fraction(yj)
            rhs += fy * row.rhs
            for i, a in row.terms():
                coefs[i] = coefs.get(i, Fraction(0)) + fy * a
    if mode == BOUND_EXCEEDING:
        rhs -= Fraction(cutoff)
        for i, ci in enumerate(c):
            if ci:
                coefs[i] = coefs.get(i, Fraction(0)) - ci
    return {i: a for i, a in coefs.items() if a}, rhs


def implied_by(exact: tuple[dict[int, Fraction], Fraction], row: ConflictRow,
               lb: Sequence, ub: Sequence) -> bool:
    """True if ``exact`` plus bound multiples yields the stored row with rhs >= stored."""
    coefs, rhs = exact
    stored = row.exact_terms()
    total = rhs
    for i in set(coefs) | set(stored):
        delta = stored.get(i, Fraction(0)) - coefs.get(i, Fraction(0))
        if delta > 0:
            if lb[i] == -INF:
                return False
            total += delta * lb[i]
        elif delta < 0:
            if ub[i] == INF:
                return False
            total += delta * ub[i]
    return total >= row.exact_rhs()


@dataclass
class ConflictPool:
    capacity: int = 100
    age_limit: int = 20
    max_density: float = 0.5
    min_nnz_limit: int = 30
    rows: list[ConflictRow] = field(default_factory=list)
    next_id: int = 0
    keys: set = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


ACCEPTED, DUPLICATE, TOO_DENSE, GLOBALLY_INFEASIBLE = (
    "accepted", "duplicate", "too_dense", "globally_infeasible")


def pool_insert(pool: ConflictPool, row: ConflictRow, n: int, lb: Sequence, ub: Sequence,
                evicted: Optional[list] = None) -> str:
    """Add a row to the pool; returns ACCEPTED, GLOBALLY_INFEASIBLE or a rejection reason.

    Rows too dense (more than ``max(max_density * n, min_nnz_limit)``
    nonzeros) and duplicates are rejected. A row that is already violated
    over the global box is still stored (it prunes every node) but reported
    as GLOBALLY_INFEASIBLE: it proves the problem infeasible, or for cutoff
    rows that nothing better than the incumbent exists. Evicted rows are
    appended to ``evicted``.
    """
    if len(row) > max(pool.max_density * n, pool.min_nnz_limit):
        return TOO_DENSE
    if row.key() in pool.keys:
        return DUPLICATE
    maxact = Fraction(0)
    for i, a in row.exact_terms().items():
        v = ub[i] if a > 0 else lb[i]
        if v in (INF, -INF):
            maxact = None
            break
        maxact += a * v
    status = ACCEPTED
    if maxact is not None and maxact < row.exact_rhs():
        status = GLOBALLY_INFEASIBLE
    if len(pool.rows) >= pool.capacity:
        oldest = max(pool.rows, key=lambda r: (r.age, -r.id))
        pool.rows.remove(oldest)
        pool.keys.discard(oldest.key())
        if evicted is not None:
            evicted.append(oldest)
    row.age = 0
    row.id = pool.next_id
    pool.next_id += 1
    pool.rows.append(row)
    pool.keys.add(row.key())
    return status


def pool_age_and_evict(pool: ConflictPool, useful_ids, evicted: Optional[list] = None) -> int:
    useful = set(useful_ids)
    keep = []
    gone = 0
    for row in pool.rows:
        if row.id in useful:
            row.age = 0
        else:
            row.age += 1
        if row.age > pool.age_limit:
            pool.keys.discard(row.key())
            gone += 1
            if evicted is not None:
                evicted.append(row)
        else:
            keep.append(row)
    pool.rows = keep
    return gone
