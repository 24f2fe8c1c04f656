"""Safe activity-based bound propagation on GE rows.

Activities are kept in floating point as one-sided estimates (maximum
activity rounded up, minimum activity rounded down) and are only ever updated
incrementally. A candidate bound is finished in exact arithmetic from the
safe relative activity, so every applied bound is implied by the row and the
current box.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .model import INF, LOWER, UPPER, LocalBounds, Row
from .safe_arith import (
    add_down, add_up, fp_to_rat, interval_image, interval_mul_hi, interval_mul_lo,
    sub_down, sub_up,
)

INFEASIBLE, REDUNDANT, ACTIVE = "infeasible", "redundant", "active"
FIXPOINT, ROUND_LIMIT = "fixpoint", "round_limit"

CONT_IMPROVE_REL = 1e-9


def _hi(img, v) -> float:
    return interval_mul_hi(img, interval_image(v))


def _lo(img, v) -> float:
    return interval_mul_lo(img, interval_image(v))


class ActivityState:
    """Per-row safe activity bounds, maintained through bound-change hooks."""

    def __init__(self, bounds: LocalBounds, rows: Iterable[Row] = ()):
        self.bounds = bounds
        self.rows: dict[int, Row] = {}
        self.actmax_up: dict[int, float] = {}
        self.actmin_down: dict[int, float] = {}
        self.pos_inf: dict[int, int] = {}
        self.neg_inf: dict[int, int] = {}
        self.stamp: dict[int, int] = {}
        self.var_rows: dict[int, list[tuple[int, int]]] = {}
        self.dirty: set[int] = set()
        self.clock = 0
        self.updates = 0
        for row in rows:
            self.add_row(row)
        bounds.listeners.append(self.on_bound_change)

    def detach(self) -> None:
        self.bounds.listeners.remove(self.on_bound_change)

    def add_row(self, row: Row) -> None:
        """Compute the activities of a new row from the current bounds."""
        lb, ub = self.bounds.lb, self.bounds.ub
        amax, amin = 0.0, 0.0
        pinf = ninf = 0
        for pos, (i, a) in enumerate(row.terms()):
            img = row.images[pos]
            hi_src, lo_src = (ub[i], lb[i]) if a > 0 else (lb[i], ub[i])
            if hi_src in (INF, -INF):
                pinf += 1
            else:
                amax = add_up(amax, _hi(img, hi_src))
            if lo_src in (INF, -INF):
                ninf += 1
            else:
                amin = add_down(amin, _lo(img, lo_src))
            self.var_rows.setdefault(i, []).append((row.id, pos))
        self.rows[row.id] = row
        self.actmax_up[row.id] = amax
        self.actmin_down[row.id] = amin
        self.pos_inf[row.id] = pinf
        self.neg_inf[row.id] = ninf
        self.stamp[row.id] = self.clock
        self.dirty.add(row.id)

    def remove_row(self, row_id: int) -> None:
        row = self.rows.pop(row_id)
        for i in row.idx:
            self.var_rows[i] = [e for e in self.var_rows[i] if e[0] != row_id]
        for d in (self.actmax_up, self.actmin_down, self.pos_inf, self.neg_inf, self.stamp):
            del d[row_id]
        self.dirty.discard(row_id)

    def on_bound_change(self, var: int, side: str, old, new) -> None:
        self.clock += 1
        for rid, pos in self.var_rows.get(var, ()):
            row = self.rows[rid]
            a = row.coef[pos]
            # a > 0: ub feeds act+ and lb feeds act-; a < 0 mirrored
            feeds_max = (side == UPPER) == (a > 0)
            self.update_activity(rid, row.images[pos], feeds_max, old, new)
            self.stamp[rid] = self.clock
            self.dirty.add(rid)

    def update_activity(self, rid: int, img, feeds_max: bool, old, new) -> None:
        self.updates += 1
        old_inf = old in (INF, -INF)
        new_inf = new in (INF, -INF)
        if feeds_max:
            cur = self.actmax_up[rid]
            if old_inf and new_inf:
                return
            if old_inf:
                self.pos_inf[rid] -= 1
                cur = add_up(cur, _hi(img, new))
            elif new_inf:
                self.pos_inf[rid] += 1
                cur = sub_up(cur, _lo(img, old))
            else:
                cur = add_up(cur, sub_up(_hi(img, new), _lo(img, old)))
            self.actmax_up[rid] = cur
        else:
            cur = self.actmin_down[rid]
            if old_inf and new_inf:
                return
            if old_inf:
                self.neg_inf[rid] -= 1
                cur = add_down(cur, _lo(img, new))
            elif new_inf:
                self.neg_inf[rid] += 1
                cur = sub_down(cur, _hi(img, old))
            else:
                cur = add_down(cur, sub_down(_lo(img, new), _hi(img, old)))
            self.actmin_down[rid] = cur


def init_activities(rows: Iterable[Row], bounds: LocalBounds) -> ActivityState:
    return ActivityState(bounds, rows)


def _max_contrib_bound(bounds: LocalBounds, i: int, a: Fraction):
    return bounds.ub[i] if a > 0 else bounds.lb[i]


def _min_contrib_bound(bounds: LocalBounds, i: int, a: Fraction):
    return bounds.lb[i] if a > 0 else bounds.ub[i]


def relative_activity_bound(state: ActivityState, row: Row, pos: int,
                            which: str = "max") -> Optional[float]:
    """Safe estimate of the row activity without term ``pos``.

    Returns an upper bound on act_k^+ (``which="max"``) or a lower bound on
    act_k^- (``which="min"``), or ``None`` if some other term is unbounded.
    """
    i, a, img = row.idx[pos], row.coef[pos], row.images[pos]
    bounds = state.bounds
    if which == "max":
        v = _max_contrib_bound(bounds, i, a)
        own_inf = v in (INF, -INF)
        ninf = state.pos_inf[row.id] - own_inf
        if ninf:
            return None
        total = state.actmax_up[row.id]
        return total if own_inf else sub_up(total, _lo(img, v))
    v = _min_contrib_bound(bounds, i, a)
    own_inf = v in (INF, -INF)
    if state.neg_inf[row.id] - own_inf:
        return None
    total = state.actmin_down[row.id]
    return total if own_inf else sub_down(total, _hi(img, v))


@dataclass
class BoundCandidate:
    var: int
    side: str
    value: Fraction
    row_id: int
    raw_value: Fraction  # exact (b - R) / a_k before integer rounding / limiting
    bound_lines: tuple  # ((var, side, line), ...) of the other terms' bounds used
    is_integral_rounded: bool = False


def _limit_denominator(t: Fraction, side: str, max_den: int) -> Fraction:
    if t.denominator <= max_den:
        return t
    if side == LOWER:
        return Fraction(math.floor(t * max_den), max_den)
    return Fraction(math.ceil(t * max_den), max_den)


def _improves(bounds: LocalBounds, var: int, side: str, value: Fraction) -> bool:
    old = bounds.lb[var] if side == LOWER else bounds.ub[var]
    if old in (INF, -INF):
        return True
    gain = value - old if side == LOWER else old - value
    if gain <= 0:
        return False
    if bounds.is_int[var]:
        return True
    return gain >= CONT_IMPROVE_REL * (1 + abs(old))


def propagate_row(row: Row, bounds: LocalBounds, state: ActivityState,
                  max_den: Optional[int] = None) -> list[BoundCandidate]:
    """Bound candidates implied by one GE row under the current box."""
    out = []
    if state.pos_inf[row.id] > 1:
        return out
    for pos, (k, a) in enumerate(row.terms()):
        rel = relative_activity_bound(state, row, pos, "max")
        if rel is None or math.isinf(rel):
            continue
        t = (row.rhs - fp_to_rat(rel)) / a
        side = LOWER if a > 0 else UPPER
        value = t
        rounded = False
        if bounds.is_int[k]:
            value = Fraction(math.ceil(t)) if side == LOWER else Fraction(math.floor(t))
            rounded = value != t
        elif max_den is not None:
            value = _limit_denominator(t, side, max_den)
        if not _improves(bounds, k, side, value):
            continue
        used = []
        for i, ai in row.terms():
            if i == k:
                continue
            s = UPPER if ai > 0 else LOWER
            used.append((i, s, bounds.ub_line[i] if s == UPPER else bounds.lb_line[i]))
        out.append(BoundCandidate(k, side, value, row.id, t, tuple(used), rounded))
    return out


def detect_row_status(row: Row, state: ActivityState) -> str:
    rid = row.id
    if state.pos_inf[rid] == 0 and not math.isinf(state.actmax_up[rid]) \
            and fp_to_rat(state.actmax_up[rid]) < row.rhs:
        return INFEASIBLE
    if state.neg_inf[rid] == 0 and not math.isinf(state.actmin_down[rid]) \
            and fp_to_rat(state.actmin_down[rid]) >= row.rhs:
        return REDUNDANT
    return ACTIVE


@dataclass
class PropagationResult:
    status: str  # FIXPOINT, ROUND_LIMIT or INFEASIBLE
    changes: list[BoundCandidate] = field(default_factory=list)
    lines: list = field(default_factory=list)
    rounds: int = 0
    infeasible_row: Optional[int] = None
    crossed_var: Optional[int] = None
    useful_rows: set[int] = field(default_factory=set)

    @property
    def infeasible(self) -> bool:
        return self.status == INFEASIBLE


def propagate_fixpoint(rows: dict[int, Row], bounds: LocalBounds, state: ActivityState,
                       max_rounds: Optional[int] = 10, cert=None,
                       max_den: Optional[int] = None) -> PropagationResult:
    """Propagate dirty rows until nothing changes, a conflict, or the round limit.

    Rows are visited in id order within a round; candidates in variable order.
    ``cert`` (a certificate builder) is asked for a line for every applied
    bound, and the line is stored with the bound.
    """
    res = PropagationResult(FIXPOINT)
    while state.dirty & rows.keys():
        if max_rounds is not None and res.rounds >= max_rounds:
            res.status = ROUND_LIMIT
            break
        res.rounds += 1
        batch = sorted(state.dirty & rows.keys())
        state.dirty.difference_update(batch)
        for rid in batch:
            row = rows[rid]
            status = detect_row_status(row, state)
            if status == INFEASIBLE:
                res.status = INFEASIBLE
                res.infeasible_row = rid
                res.useful_rows.add(rid)
                return res
            if status == REDUNDANT:
                continue
            for cand in propagate_row(row, bounds, state, max_den):
                # an earlier candidate of this row may have tightened further
                if not _improves(bounds, cand.var, cand.side, cand.value):
                    continue
                line = cert.log_propagation(cand, row) if cert is not None else None
                bounds.apply(cand.var, cand.side, cand.value, line=line, reason=rid)
                res.changes.append(cand)
                res.lines.append(line)
                res.useful_rows.add(rid)
                if bounds.lb[cand.var] > bounds.ub[cand.var]:
                    res.status = INFEASIBLE
                    res.crossed_var = cand.var
                    return res
    return res


def exact_activity(row: Row, lb, ub, which: str = "max", skip: Optional[int] = None):
    """Exact act^+ / act^- (or relative to position ``skip``); may be +-inf."""
    total = Fraction(0)
    for pos, (i, a) in enumerate(row.terms()):
        if pos == skip:
            continue
        if which == "max":
            v = ub[i] if a > 0 else lb[i]
        else:
            v = lb[i] if a > 0 else ub[i]
        if v in (INF, -INF):
            return INF if which == "max" else -INF
        total += a * v
    return total


def exact_propagate_row(row: Row, bounds: LocalBounds) -> list[tuple[int, str, Fraction]]:
    """Rational reference implementation of the propagation formulas (test oracle).

    Returns (var, side, value) with integer rounding applied but no improvement
    filtering, so it can be compared against the safe candidates directly.
    """
    out = []
    for pos, (k, a) in enumerate(row.terms()):
        rel = exact_activity(row, bounds.lb, bounds.ub, "max", skip=pos)
        if rel == INF:
            continue
        t = (row.rhs - rel) / a
        side = LOWER if a > 0 else UPPER
        if bounds.is_int[k]:
            t = Fraction(math.ceil(t)) if side == LOWER else Fraction(math.floor(t))
        out.append((k, side, t))
    return out
