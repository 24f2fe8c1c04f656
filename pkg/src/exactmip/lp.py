"""Exact bounded-variable simplex over rationals.

Solves ``min c x  s.t.  A x >= b,  l <= x <= u`` with Bland's rule and a
dense explicit basis inverse. Each row j gets a surplus ``s_j >= 0`` with
``a_j x - s_j = b_j``; rows that are violated at the starting point also get
an artificial ``t_j >= 0``. Phase 1 minimizes the artificials and its final
duals are a Farkas ray when the LP is infeasible.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .model import INF, Row

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

ZERO = Fraction(0)
ONE = Fraction(1)

REFACTOR_EVERY = 64
MAX_ITERS = 100_000


@dataclass
class LpOutcome:
    status: str
    x: list[Fraction] = field(default_factory=list)
    y: list[Fraction] = field(default_factory=list)
    r: list[Fraction] = field(default_factory=list)
    value: Optional[Fraction] = None
    iterations: int = 0

    @property
    def r_plus(self) -> list[Fraction]:
        return [v if v > 0 else ZERO for v in self.r]

    @property
    def r_minus(self) -> list[Fraction]:
        return [-v if v < 0 else ZERO for v in self.r]


def _is_inf(v) -> bool:
    return v == INF or v == -INF


class _Simplex:
    def __init__(self, rows: Sequence[Row], n: int, lb, ub):
        self.m = m = len(rows)
        self.n = n
        # columns as sparse {row: coef}
        cols: list[dict[int, Fraction]] = [dict() for _ in range(n)]
        for j, row in enumerate(rows):
            for i, a in row.terms():
                cols[i][j] = a
        self.b = [row.rhs for row in rows]
        lo = list(lb)
        hi = list(ub)
        x = []
        for i in range(n):
            if not _is_inf(lo[i]):
                x.append(Fraction(lo[i]))
            elif not _is_inf(hi[i]):
                x.append(Fraction(hi[i]))
            else:
                x.append(ZERO)
        act = [ZERO] * m
        for i in range(n):
            if x[i]:
                for j, a in cols[i].items():
                    act[j] += a * x[i]
        # surplus columns
        for j in range(m):
            cols.append({j: -ONE})
            lo.append(ZERO)
            hi.append(INF)
            x.append(ZERO)
        head = [0] * m
        self.artificials = []
        for j in range(m):
            surplus = act[j] - self.b[j]
            if surplus >= 0:
                head[j] = n + j
                x[n + j] = surplus
            else:
                k = len(cols)
                cols.append({j: ONE})
                lo.append(ZERO)
                hi.append(INF)
                x.append(-surplus)
                head[j] = k
                self.artificials.append(k)
        self.cols = cols
        self.lo, self.hi, self.x = lo, hi, x
        self.head = head
        self.N = len(cols)
        self.iterations = 0
        self.pivots = 0
        self.refactor()

    def refactor(self) -> None:
        m = self.m
        # B is a signed permutation-free matrix in general; Gauss-Jordan on [B | I]
        B = [[ZERO] * m for _ in range(m)]
        for r, k in enumerate(self.head):
            for j, a in self.cols[k].items():
                B[j][r] = a
        inv = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
        for col in range(m):
            piv = next((r for r in range(col, m) if B[r][col] != 0), None)
            if piv is None:
                raise ArithmeticError("singular basis")
            if piv != col:
                B[col], B[piv] = B[piv], B[col]
                inv[col], inv[piv] = inv[piv], inv[col]
            p = B[col][col]
            if p != 1:
                B[col] = [v / p for v in B[col]]
                inv[col] = [v / p for v in inv[col]]
            for r in range(m):
                f = B[r][col]
                if r != col and f != 0:
                    Br, Bc = B[r], B[col]
                    Ir, Ic = inv[r], inv[col]
                    for t in range(m):
                        if Bc[t]:
                            Br[t] -= f * Bc[t]
                        if Ic[t]:
                            Ir[t] -= f * Ic[t]
        self.binv = inv
        # recompute basic values from nonbasic ones
        rhs = list(self.b)
        basic = set(self.head)
        for k in range(self.N):
            if k not in basic and self.x[k]:
                for j, a in self.cols[k].items():
                    rhs[j] -= a * self.x[k]
        for r, k in enumerate(self.head):
            self.x[k] = sum((inv[r][j] * rhs[j] for j in range(m) if inv[r][j] and rhs[j]), ZERO)
        self.pivots = 0

    def duals(self, cost: Sequence[Fraction]) -> list[Fraction]:
        m = self.m
        y = [ZERO] * m
        for r, k in enumerate(self.head):
            ck = cost[k]
            if ck:
                row = self.binv[r]
                for j in range(m):
                    if row[j]:
                        y[j] += ck * row[j]
        return y

    def run(self, cost: Sequence[Fraction]) -> str:
        m = self.m
        while True:
            self.iterations += 1
            if self.iterations > MAX_ITERS:
                raise RuntimeError("simplex iteration limit exceeded")
            y = self.duals(cost)
            basic = set(self.head)
            enter = None
            direction = 0
            for k in range(self.N):
                if k in basic:
                    continue
                d = cost[k] - sum((y[j] * a for j, a in self.cols[k].items() if y[j]), ZERO)
                if d < 0 and self.x[k] < self.hi[k]:
                    enter, direction = k, 1
                    break
                if d > 0 and self.x[k] > self.lo[k]:
                    enter, direction = k, -1
                    break
            if enter is None:
                return OPTIMAL
            col = self.cols[enter]
            alpha = [sum((self.binv[r][j] * a for j, a in col.items() if self.binv[r][j]), ZERO)
                     for r in range(m)]
            # basic var at position r moves by -direction * theta * alpha[r]
            theta = None
            leave = None  # position in head, or -1 for a bound flip
            if not _is_inf(self.hi[enter]) and not _is_inf(self.lo[enter]):
                theta = self.hi[enter] - self.lo[enter]
                leave = -1
            for r in range(m):
                rate = -direction * alpha[r]
                if rate == 0:
                    continue
                k = self.head[r]
                if rate < 0:
                    if _is_inf(self.lo[k]):
                        continue
                    lim = (self.x[k] - self.lo[k]) / -rate
                else:
                    if _is_inf(self.hi[k]):
                        continue
                    lim = (self.hi[k] - self.x[k]) / rate
                if theta is None or lim < theta or (
                        lim == theta and leave != -1 and k < self.head[leave]):
                    theta, leave = lim, r
            if theta is None:
                return UNBOUNDED
            if theta:
                self.x[enter] += direction * theta
                for r in range(m):
                    if alpha[r]:
                        self.x[self.head[r]] -= direction * theta * alpha[r]
            if leave == -1:
                continue
            out = self.head[leave]
            # snap the leaving variable onto the bound it reached
            rate = -direction * alpha[leave]
            self.x[out] = self.lo[out] if rate < 0 else self.hi[out]
            self._pivot(leave, enter, alpha)

    def _pivot(self, r: int, enter: int, alpha: list[Fraction]) -> None:
        self.head[r] = enter
        self.pivots += 1
        if self.pivots >= REFACTOR_EVERY:
            self.refactor()
            return
        m = self.m
        inv = self.binv
        p = alpha[r]
        inv[r] = [v / p for v in inv[r]]
        pr = inv[r]
        for i in range(m):
            f = alpha[i]
            if i != r and f:
                row = inv[i]
                for j in range(m):
                    if pr[j]:
                        row[j] -= f * pr[j]


def solve_lp(rows: Sequence[Row], c: Sequence[Fraction], bounds) -> LpOutcome:
    """Exact LP solve over the box of ``bounds`` (anything with ``lb``/``ub``).

    OPTIMAL outcomes carry duals ``y >= 0`` and reduced costs ``r = c - A^T y``
    with ``c x = b y + l r+ - u r-``; INFEASIBLE outcomes carry a Farkas ray
    ``y`` with ``r = -A^T y``.
    """
    n = len(c)
    lb, ub = list(bounds.lb), list(bounds.ub)
    for i in range(n):
        if lb[i] > ub[i]:
            raise ValueError(f"crossed bounds on variable {i}")
    sx = _Simplex(rows, n, lb, ub)
    m = sx.m
    if sx.artificials:
        cost1 = [ZERO] * sx.N
        for k in sx.artificials:
            cost1[k] = ONE
        sx.run(cost1)
        infeas = sum((sx.x[k] for k in sx.artificials), ZERO)
        if infeas > 0:
            y = sx.duals(cost1)
            r = _reduced(rows, n, [ZERO] * n, y)
            return LpOutcome(INFEASIBLE, x=sx.x[:n], y=y, r=r, iterations=sx.iterations)
        for k in sx.artificials:
            sx.hi[k] = ZERO
    cost = [Fraction(ci) for ci in c] + [ZERO] * (sx.N - n)
    status = sx.run(cost)
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED, x=sx.x[:n], iterations=sx.iterations)
    y = sx.duals(cost)
    x = sx.x[:n]
    r = _reduced(rows, n, c, y)
    value = sum((ci * xi for ci, xi in zip(c, x) if ci), ZERO)
    return LpOutcome(OPTIMAL, x=x, y=y[:m], r=r, value=value, iterations=sx.iterations)


def _reduced(rows: Sequence[Row], n: int, c: Sequence[Fraction], y: Sequence[Fraction]):
    r = [Fraction(ci) for ci in c]
    for row, yj in zip(rows, y):
        if yj:
            for i, a in row.terms():
                r[i] -= yj * a
    return r


def dual_objective(rows: Sequence[Row], y, r, lb, ub) -> Fraction:
    """b y + l r+ - u r- (with 0 * inf = 0); -inf if an unbounded side is priced."""
    total = sum((row.rhs * yj for row, yj in zip(rows, y) if yj), ZERO)
    for i, ri in enumerate(r):
        if ri > 0:
            if _is_inf(lb[i]):
                return -INF
            total += ri * lb[i]
        elif ri < 0:
            if _is_inf(ub[i]):
                return -INF
            total += ri * ub[i]
    return total


def verify_farkas_ray(y: Sequence[Fraction], rows: Sequence[Row], bounds) -> bool:
    """Exact check that ``y`` proves the rows infeasible over the box."""
    if len(y) != len(rows) or any(v < 0 for v in y):
        return False
    n = len(bounds.lb)
    g = [ZERO] * n
    for row, yj in zip(rows, y):
        if yj:
            for i, a in row.terms():
                g[i] += yj * Fraction(a)
    maxact = ZERO
    for i, gi in enumerate(g):
        if gi == 0:
            continue
        v = bounds.ub[i] if gi > 0 else bounds.lb[i]
        if _is_inf(v):
            return False
        maxact += gi * v
    rhs = sum((Fraction(yj) * row.rhs for row, yj in zip(rows, y) if yj), ZERO)
    return maxact < rhs


def degrade_duals(y: Sequence[Fraction], rel_noise: float = 0.0,
                  seed: Optional[int] = None) -> list[float]:
    """Round exact duals to nearest doubles the way an inexact LP would report them.

    Negative entries are clipped to zero. A nonzero ``rel_noise`` perturbs each
    entry by a seeded relative factor in ``[-rel_noise, rel_noise]``.
    """
    rng = random.Random(seed) if rel_noise else None
    out = []
    for v in y:
        f = float(v)
        if rng is not None and f:
            f *= 1.0 + rel_noise * rng.uniform(-1.0, 1.0)
        out.append(f if f > 0 else 0.0)
    return out
