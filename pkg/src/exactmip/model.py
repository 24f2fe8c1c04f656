"""Exact MIP model: raw input form, canonical GE form, node-local bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .safe_arith import FpInterval, interval_image

INF = math.inf

GE, LE, EQ = "G", "L", "E"
LOWER, UPPER = "lb", "ub"


def _merge_terms(terms: Iterable[tuple[int, Fraction]]) -> dict[int, Fraction]:
    acc: dict[int, Fraction] = {}
    for i, a in terms:
        acc[i] = acc.get(i, Fraction(0)) + Fraction(a)
    return {i: a for i, a in sorted(acc.items()) if a != 0}


@dataclass
class RawConstraint:
    name: str
    coefs: dict[int, Fraction]
    sense: str
    rhs: Fraction


@dataclass
class RawProblem:
    """Problem as parsed, before canonicalization (any senses, min or max)."""

    names: list[str] = field(default_factory=list)
    lb: list = field(default_factory=list)
    ub: list = field(default_factory=list)
    is_int: list[bool] = field(default_factory=list)
    obj_sense: str = "min"
    obj: dict[int, Fraction] = field(default_factory=dict)
    constraints: list[RawConstraint] = field(default_factory=list)
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.names)

    def add_var(self, name: str, lb=Fraction(0), ub=INF, is_int: bool = False) -> int:
        self.names.append(name)
        self.lb.append(lb)
        self.ub.append(ub)
        self.is_int.append(is_int)
        return len(self.names) - 1

    def add_constraint(self, coefs, sense: str, rhs, name: str = "") -> None:
        if sense not in (GE, LE, EQ):
            raise ValueError(f"bad sense {sense!r}")
        items = coefs.items() if isinstance(coefs, dict) else coefs
        self.constraints.append(RawConstraint(
            name or f"c{len(self.constraints)}", _merge_terms(items), sense, Fraction(rhs)))


@dataclass
class Variable:
    name: str
    lb: object
    ub: object
    is_integer: bool


class Row:
    """A canonical row ``sum coef_i x_i >= rhs`` with cached float images.

    ``cert_line``/``cert_mult`` say how to obtain this row from a certificate
    line: row = cert_mult * line.
    """

    __slots__ = ("id", "idx", "coef", "rhs", "origin", "cert_line", "cert_mult",
                 "source", "link", "images", "rhs_image")

    def __init__(self, id: int, terms, rhs, origin: str = "original",
                 cert_line: Optional[int] = None, cert_mult: int = 1,
                 source: Optional[int] = None, link: Optional[int] = None):
        merged = _merge_terms(terms.items() if isinstance(terms, dict) else terms)
        self.id = id
        self.idx: tuple[int, ...] = tuple(merged)
        self.coef: tuple[Fraction, ...] = tuple(merged.values())
        self.rhs = Fraction(rhs)
        self.origin = origin
        self.cert_line = cert_line
        self.cert_mult = cert_mult
        self.source = source
        self.link = link
        self.images: tuple[FpInterval, ...] = tuple(interval_image(a) for a in self.coef)
        self.rhs_image = interval_image(self.rhs)

    def terms(self):
        return zip(self.idx, self.coef)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.idx, self.coef))

    def __len__(self) -> int:
        return len(self.idx)

    def __repr__(self) -> str:
        lhs = " + ".join(f"{a}*x{i}" for i, a in self.terms()) or "0"
        return f"Row({self.id}: {lhs} >= {self.rhs})"


@dataclass
class Problem:
    variables: list[Variable]
    rows: list[Row]
    c: list[Fraction]
    obj_sign: int = 1  # original objective = obj_sign * canonical objective
    raw: Optional[RawProblem] = None
    infeasible_var: Optional[int] = None  # integer var whose tightened bounds cross

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def is_int(self) -> list[bool]:
        return [v.is_integer for v in self.variables]

    def objective(self, x: Sequence[Fraction]) -> Fraction:
        return sum((ci * xi for ci, xi in zip(self.c, x) if ci), Fraction(0))


@dataclass
class ExactSolution:
    x: list[Fraction]
    value: Fraction


def _ceil(v):
    return v if v in (INF, -INF) else Fraction(math.ceil(v))


def _floor(v):
    return v if v in (INF, -INF) else Fraction(math.floor(v))


def canonicalize(raw: RawProblem) -> Problem:
    """Normalize to ``min c x, A x >= b`` with integral integer bounds.

    EQ constraints become a linked pair of GE rows; both point at the single
    certificate line of the original equality.
    """
    variables = []
    infeasible_var = None
    for j, name in enumerate(raw.names):
        lb, ub = raw.lb[j], raw.ub[j]
        lb = lb if lb == -INF else Fraction(lb)
        ub = ub if ub == INF else Fraction(ub)
        if raw.is_int[j]:
            lb, ub = _ceil(lb), _floor(ub)
        if lb > ub and infeasible_var is None:
            infeasible_var = j
        variables.append(Variable(name, lb, ub, bool(raw.is_int[j])))
    sign = -1 if raw.obj_sense == "max" else 1
    c = [Fraction(0)] * raw.n
    for j, a in raw.obj.items():
        c[j] = sign * Fraction(a)
    rows: list[Row] = []
    for k, con in enumerate(raw.constraints):
        terms = list(con.coefs.items())
        neg = [(i, -a) for i, a in terms]
        if con.sense == GE:
            rows.append(Row(len(rows), terms, con.rhs, cert_line=k, cert_mult=1, source=k))
        elif con.sense == LE:
            rows.append(Row(len(rows), neg, -con.rhs, cert_line=k, cert_mult=-1, source=k))
        else:
            first = len(rows)
            rows.append(Row(first, terms, con.rhs, cert_line=k, cert_mult=1,
                            source=k, link=first + 1))
            rows.append(Row(first + 1, neg, -con.rhs, cert_line=k, cert_mult=-1,
                            source=k, link=first))
    return Problem(variables, rows, c, sign, raw, infeasible_var)


def eval_row(row: Row, x: Sequence[Fraction]) -> Fraction:
    return sum((a * x[i] for i, a in row.terms()), Fraction(0))


def check_feasible(problem: Problem, x: Sequence[Fraction]) -> bool:
    """Exact membership test: rows, global bounds and integrality, zero tolerance."""
    if len(x) != problem.n:
        raise ValueError("solution has wrong length")
    for v, xi in zip(problem.variables, x):
        if xi < v.lb or xi > v.ub:
            return False
        if v.is_integer and Fraction(xi).denominator != 1:
            return False
    return all(eval_row(r, x) >= r.rhs for r in problem.rows)


class LocalBounds:
    """Node-local bounds with an undo trail.

    Each bound carries the certificate line that proves it (``None`` when no
    certificate is being written or the bound is infinite). Listeners are
    called as ``fn(var, side, old, new)`` on every change, including undos.
    """

    def __init__(self, lb: Sequence, ub: Sequence, is_int: Sequence[bool],
                 lb_line: Optional[Sequence] = None, ub_line: Optional[Sequence] = None):
        self.lb = list(lb)
        self.ub = list(ub)
        self.is_int = list(is_int)
        n = len(self.lb)
        self.lb_line = list(lb_line) if lb_line is not None else [None] * n
        self.ub_line = list(ub_line) if ub_line is not None else [None] * n
        self.global_lb = tuple(self.lb)
        self.global_ub = tuple(self.ub)
        self.global_lb_line = tuple(self.lb_line)
        self.global_ub_line = tuple(self.ub_line)
        self._trail: list[tuple] = []
        self._marks: list[int] = []
        self.listeners: list[Callable] = []

    @classmethod
    def from_problem(cls, problem: Problem, lb_line=None, ub_line=None) -> "LocalBounds":
        return cls([v.lb for v in problem.variables], [v.ub for v in problem.variables],
                   problem.is_int, lb_line, ub_line)

    @property
    def depth(self) -> int:
        return len(self._marks)

    def push(self) -> int:
        self._marks.append(len(self._trail))
        return len(self._marks)

    def apply(self, var: int, side: str, value, line=None, reason=None) -> int:
        """Tighten one bound; returns a trail position usable as undo token."""
        value = Fraction(value)
        if self.is_int[var]:
            assert value.denominator == 1, "integer variable bound must be integral"
        if side == LOWER:
            old = self.lb[var]
            assert value > old, "bound change must tighten"
            self._trail.append((var, side, old, self.lb_line[var], reason))
            self.lb[var] = value
            self.lb_line[var] = line
        elif side == UPPER:
            old = self.ub[var]
            assert value < old, "bound change must tighten"
            self._trail.append((var, side, old, self.ub_line[var], reason))
            self.ub[var] = value
            self.ub_line[var] = line
        else:
            raise ValueError(f"bad side {side!r}")
        for fn in self.listeners:
            fn(var, side, old, value)
        return len(self._trail) - 1

    def undo_to(self, depth: int) -> None:
        if depth < 0 or depth > len(self._marks):
            raise ValueError("bad depth")
        target = self._marks[depth] if depth < len(self._marks) else len(self._trail)
        while len(self._trail) > target:
            var, side, old, old_line, _ = self._trail.pop()
            if side == LOWER:
                cur = self.lb[var]
                self.lb[var], self.lb_line[var] = old, old_line
            else:
                cur = self.ub[var]
                self.ub[var], self.ub_line[var] = old, old_line
            for fn in self.listeners:
                fn(var, side, cur, old)
        del self._marks[depth:]

    def crossed(self) -> Optional[int]:
        for i, (l, u) in enumerate(zip(self.lb, self.ub)):
            if l > u:
                return i
        return None

    def snapshot(self) -> tuple[tuple, tuple]:
        return tuple(self.lb), tuple(self.ub)
