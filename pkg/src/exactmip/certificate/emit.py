"""Certificate emission during search.

The builder mirrors the solver's canonical view onto certificate lines:

* constraint lines are the raw constraints (original senses), followed by one
  line per finite raw variable bound (``G`` for lower, ``L`` for upper);
* every canonical GE row equals ``cert_mult * line`` for its ``cert_line``, so
  a nonnegative GE multiplier ``lam`` on the row becomes the line multiplier
  ``lam * cert_mult`` (negated again when the target sense is ``L``).

Dual-proof conflicts are logged as *weak* lines whose exact multipliers are
left to :func:`exactmip.certificate.complete.complete_certificate`.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

from ..model import INF, LOWER, Problem, Row
from .format import CRow, Certificate, Derivation, Reason, WeakPayload, write_certificate

ABSURD_KIND = "absurd"


class CertificateBuilder:
    def __init__(self, problem: Problem):
        raw = problem.raw
        if raw is None:
            raise ValueError("certificate needs the raw problem")
        self.problem = problem
        n = raw.n
        self.cons: list[CRow] = [CRow(dict(con.coefs), con.sense, con.rhs)
                                 for con in raw.constraints]
        lb_line: list[Optional[int]] = [None] * n
        ub_line: list[Optional[int]] = [None] * n
        for j in range(n):
            if raw.lb[j] != -INF:
                lb_line[j] = len(self.cons)
                self.cons.append(CRow({j: Fraction(1)}, "G", Fraction(raw.lb[j])))
            if raw.ub[j] != INF:
                ub_line[j] = len(self.cons)
                self.cons.append(CRow({j: Fraction(1)}, "L", Fraction(raw.ub[j])))
        self.ders: list[Derivation] = []
        self.sols: list[dict[int, Fraction]] = []
        self.rtp: tuple = ("range", -INF, INF)
        for j in range(n):
            if not raw.is_int[j]:
                continue
            if lb_line[j] is not None and Fraction(raw.lb[j]).denominator != 1:
                lb_line[j] = self._add(CRow({j: Fraction(1)}, "G", Fraction(math.ceil(raw.lb[j]))),
                                       Reason("rnd", [(lb_line[j], Fraction(1))]))
            if ub_line[j] is not None and Fraction(raw.ub[j]).denominator != 1:
                ub_line[j] = self._add(CRow({j: Fraction(1)}, "L", Fraction(math.floor(raw.ub[j]))),
                                       Reason("rnd", [(ub_line[j], Fraction(1))]))
        self.lb_line = lb_line
        self.ub_line = ub_line
        self.obj = {i: ci for i, ci in enumerate(problem.c) if ci}

    # -- bookkeeping ---------------------------------------------------------

    @property
    def num_lines(self) -> int:
        return len(self.cons) + len(self.ders)

    def _add(self, row: CRow, reason: Reason, weak: Optional[WeakPayload] = None) -> int:
        self.ders.append(Derivation(row, reason, weak))
        return self.num_lines - 1

    def line_row(self, line: int) -> CRow:
        if line < len(self.cons):
            return self.cons[line]
        return self.ders[line - len(self.cons)].row

    @staticmethod
    def _refs(items, target: str) -> list[tuple[int, Fraction]]:
        """Merge ``(line, ge_mult)`` pairs into line multipliers for ``target``."""
        sign = 1 if target == "G" else -1
        acc: dict[int, Fraction] = {}
        for line, mult in items:
            if line is None:
                raise ValueError("bound without a certificate line")
            acc[line] = acc.get(line, Fraction(0)) + sign * Fraction(mult)
        return [(l, m) for l, m in acc.items() if m]

    @staticmethod
    def _row_items(row: Row, lam) -> tuple:
        return (row.cert_line, Fraction(lam) * row.cert_mult)

    @staticmethod
    def _bound_item(bounds, i: int, side: str, lam):
        """GE multiplier on the lower (``x >= l``) or upper (``-x >= -u``) bound line."""
        if side == LOWER:
            return (bounds.lb_line[i], Fraction(lam))
        return (bounds.ub_line[i], -Fraction(lam))

    # -- derivations ---------------------------------------------------------

    def log_assumption(self, var: int, side: str, value) -> int:
        sense = "G" if side == LOWER else "L"
        return self._add(CRow({var: Fraction(1)}, sense, Fraction(value)), Reason("asm"))

    def log_propagation(self, cand, row: Row) -> int:
        k = cand.var
        a = row.as_dict()[k]
        target = "G" if a > 0 else "L"
        items = [self._row_items(row, 1 / abs(a))]
        coefs = row.as_dict()
        for i, side, line in cand.bound_lines:
            lam = abs(coefs[i]) / abs(a)
            items.append((line, lam if side == LOWER else -lam))
        refs = self._refs(items, target)
        if cand.is_integral_rounded:
            mid = self._add(CRow({k: Fraction(1)}, target, Fraction(cand.raw_value)),
                            Reason("lin", refs))
            return self._add(CRow({k: Fraction(1)}, target, Fraction(cand.value)),
                             Reason("rnd", [(mid, Fraction(1))]))
        return self._add(CRow({k: Fraction(1)}, target, Fraction(cand.value)), Reason("lin", refs))

    def _dual_items(self, rows, y, r, bounds) -> list:
        items = [self._row_items(row, yj) for row, yj in zip(rows, y) if yj]
        for i, ri in enumerate(r):
            if ri > 0:
                items.append(self._bound_item(bounds, i, LOWER, ri))
            elif ri < 0:
                items.append(self._bound_item(bounds, i, "ub", -ri))
        return items

    def log_lp_bound(self, rows, outcome, bounds) -> int:
        """``c x >= z`` from optimal LP duals over the current local box."""
        items = self._dual_items(rows, outcome.y, outcome.r, bounds)
        return self._add(CRow(dict(self.obj), "G", Fraction(outcome.value)),
                         Reason("lin", self._refs(items, "G")))

    def log_farkas(self, rows, outcome, bounds) -> int:
        items = self._dual_items(rows, outcome.y, outcome.r, bounds)
        rhs = sum((row.rhs * yj for row, yj in zip(rows, outcome.y) if yj), Fraction(0))
        for i, ri in enumerate(outcome.r):
            if ri > 0:
                rhs += ri * bounds.lb[i]
            elif ri < 0:
                rhs += ri * bounds.ub[i]
        return self._add(CRow({}, "G", rhs), Reason("lin", self._refs(items, "G")))

    def log_row_infeasible(self, row: Row, bounds) -> int:
        items = [self._row_items(row, 1)]
        rhs = row.rhs
        for i, a in row.terms():
            if a > 0:
                items.append(self._bound_item(bounds, i, "ub", a))
                rhs -= a * bounds.ub[i]
            else:
                items.append(self._bound_item(bounds, i, LOWER, -a))
                rhs -= a * bounds.lb[i]
        return self._add(CRow({}, "G", rhs), Reason("lin", self._refs(items, "G")))

    def log_crossing(self, var: int, bounds) -> int:
        items = [self._bound_item(bounds, var, LOWER, 1), self._bound_item(bounds, var, "ub", 1)]
        return self._add(CRow({}, "G", bounds.lb[var] - bounds.ub[var]),
                         Reason("lin", self._refs(items, "G")))

    def log_solution(self, x) -> int:
        sol = {i: Fraction(v) for i, v in enumerate(x) if v}
        self.sols.append(sol)
        value = sum((ci * sol.get(i, 0) for i, ci in self.obj.items()), Fraction(0))
        return self._add(CRow(dict(self.obj), "L", value), Reason("sol", sol=len(self.sols) - 1))

    def log_weak_conflict(self, conflict, rows, cutoff_line: Optional[int] = None) -> int:
        """Stated conflict row with float multipliers; exact repair happens later."""
        mults: list[tuple[int, float]] = []
        touched: set[int] = set()
        for row, yj in zip(rows, conflict.y):
            if yj:
                mults.append((row.cert_line, yj * row.cert_mult))
                touched.update(row.idx)
        if conflict.obj_mult:
            if cutoff_line is None:
                raise ValueError("bound-exceeding conflict needs the cutoff line")
            # the cutoff line reads c x <= v; its GE form carries multiplier -1
            mults.append((cutoff_line, -conflict.obj_mult))
            touched.update(self.obj)
        touched.update(conflict.coefs)
        bnds = []
        for i in sorted(touched):
            for line in (self.lb_line[i], self.ub_line[i]):
                if line is not None:
                    bnds.append(line)
        row = CRow(conflict.exact_terms(), "G", conflict.exact_rhs())
        return self._add(row, Reason("lin", []), WeakPayload(mults, bnds))

    def log_unsplit(self, l1: int, a1: int, l2: int, a2: int) -> int:
        r1, r2 = self.line_row(l1), self.line_row(l2)
        if r1.is_absurd() and r2.is_absurd():
            row = CRow({}, "G", min(r1.ge_form()[1], r2.ge_form()[1]))
        elif r1.is_absurd():
            row = CRow(*_ge(r2))
        elif r2.is_absurd():
            row = CRow(*_ge(r1))
        else:
            c1, b1 = r1.ge_form()
            c2, b2 = r2.ge_form()
            if c1 != c2:
                raise ValueError("unsplit of rows with different left-hand sides")
            row = CRow(c1, "G", min(b1, b2))
        return self._add(row, Reason("uns", uns=(l1, a1, l2, a2)))

    # -- output --------------------------------------------------------------

    def set_infeasible(self) -> None:
        self.rtp = ("infeas",)

    def set_range(self, lb, ub) -> None:
        self.rtp = ("range", lb, ub)

    def certificate(self) -> Certificate:
        raw = self.problem.raw
        return Certificate(list(raw.names), [j for j in range(raw.n) if raw.is_int[j]],
                           dict(self.obj), list(self.cons), self.rtp, list(self.sols),
                           list(self.ders))

    def to_text(self) -> str:
        return write_certificate(self.certificate())

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())


def _ge(row: CRow) -> tuple:
    coefs, rhs = row.ge_form()
    return coefs, "G", rhs
