"""Stand-alone certificate checker.

Relies only on the certificate format module and exact rationals; nothing from
the solver is imported, so a bug in the search cannot hide itself here.

Semantics follow the usual derivation-line scheme. Each line is a linear
inequality valid for every feasible point that satisfies the line's
assumptions. Lines that lean on a ``sol`` line are only claimed for points no
worse than that solution, which is why the final lower bound may not exceed
any solution value used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .format import Certificate, CertificateFormatError, CRow, parse_certificate

INF = float("inf")


@dataclass
class VerifyResult:
    ok: bool
    section: str = ""
    line: Optional[int] = None
    rule: str = ""
    message: str = ""

    def __str__(self) -> str:
        if self.ok:
            return "certificate accepted"
        where = self.section + (f" line {self.line}" if self.line is not None else "")
        return f"certificate rejected at {where} [{self.rule}]: {self.message}"


class _Reject(Exception):
    def __init__(self, section: str, line: Optional[int], rule: str, message: str):
        super().__init__(message)
        self.result = VerifyResult(False, section, line, rule, message)


def _ge(row: CRow) -> tuple[dict[int, Fraction], Fraction]:
    return row.ge_form()


def _absurd_ge(coefs: dict, rhs: Fraction) -> bool:
    return not coefs and rhs > 0


def _dominates(coefs: dict, rhs: Fraction, target: CRow) -> bool:
    """Does the valid GE row ``coefs x >= rhs`` imply ``target``?"""
    if _absurd_ge(coefs, rhs):
        return True
    if target.sense == "E":
        return False
    tc, tr = _ge(target)
    return coefs == tc and rhs >= tr


def verify_certificate(source: Union[str, Certificate]) -> VerifyResult:
    try:
        cert = parse_certificate(source) if isinstance(source, str) else source
    except CertificateFormatError as e:
        return VerifyResult(False, "parse", e.lineno, "format", str(e))
    try:
        _Checker(cert).run()
    except _Reject as r:
        return r.result
    return VerifyResult(True)


def verify_file(path) -> VerifyResult:
    with open(path) as fh:
        return verify_certificate(fh.read())


class _Checker:
    def __init__(self, cert: Certificate):
        self.cert = cert
        self.n = len(cert.names)
        self.ints = set(cert.int_idx)
        self.ncons = len(cert.cons)

    def fail(self, section, line, rule, msg):
        raise _Reject(section, line, rule, msg)

    def run(self) -> None:
        cert = self.cert
        if cert.obj_sense != "min":
            self.fail("OBJ", None, "header", "only minimization certificates are supported")
        if len(set(cert.names)) != self.n:
            self.fail("VAR", None, "header", "duplicate variable names")
        for i in cert.int_idx:
            if not 0 <= i < self.n:
                self.fail("INT", None, "header", f"integer index {i} out of range")
        for i in cert.obj:
            if not 0 <= i < self.n:
                self.fail("OBJ", None, "header", f"objective index {i} out of range")
        for k, row in enumerate(cert.cons):
            self.check_indices("CON", k, row)
        self.sol_values = [self.check_solution(k, s) for k, s in enumerate(cert.sols)]
        self.assumptions: list[frozenset] = [frozenset()] * self.ncons
        self.sol_cap = INF  # smallest solution value that any line leans on
        self.sol_depends: list[bool] = [False] * self.ncons
        for k, der in enumerate(cert.ders):
            self.check_derivation(self.ncons + k, der)
        self.check_rtp()

    def check_indices(self, section, line, row: CRow) -> None:
        for i in row.coefs:
            if not 0 <= i < self.n:
                self.fail(section, line, "index", f"variable index {i} out of range")

    # -- solutions -------------------------------------------------------------

    def check_solution(self, k: int, sol: dict) -> Fraction:
        for i, v in sol.items():
            if not 0 <= i < self.n:
                self.fail("SOL", k, "sol", f"variable index {i} out of range")
            if i in self.ints and v.denominator != 1:
                self.fail("SOL", k, "sol", f"integer variable {self.cert.names[i]} = {v}")
        for j, row in enumerate(self.cert.cons):
            act = sum((a * sol.get(i, 0) for i, a in row.coefs.items()), Fraction(0))
            ok = (act >= row.rhs if row.sense == "G" else
                  act <= row.rhs if row.sense == "L" else act == row.rhs)
            if not ok:
                self.fail("SOL", k, "sol", f"violates constraint line {j}")
        return sum((c * sol.get(i, 0) for i, c in self.cert.obj.items()), Fraction(0))

    # -- derivations -----------------------------------------------------------

    def combine(self, line: int, refs, target: str) -> tuple[dict, Fraction]:
        """GE form of ``sum m_l * row_l`` after the sign rules for ``target``."""
        coefs: dict[int, Fraction] = {}
        rhs = Fraction(0)
        for l, m in refs:
            if not 0 <= l < line:
                self.fail("DER", line, "reference", f"line {l} is not an earlier line")
            if m == 0:
                continue
            src = self.cert.line_row(l)
            if src.sense != "E" and (m > 0) != (src.sense == target):
                self.fail("DER", line, "sign", f"multiplier {m} on {src.sense} line {l}")
            rhs += m * src.rhs
            for i, a in src.coefs.items():
                coefs[i] = coefs.get(i, Fraction(0)) + m * a
        sign = 1 if target == "G" else -1
        return {i: sign * a for i, a in coefs.items() if a}, sign * rhs

    def check_derivation(self, line: int, der) -> None:
        row = der.row
        self.check_indices("DER", line, row)
        if der.weak is not None:
            self.fail("DER", line, "weak", "weak derivation has not been completed")
        kind = der.reason.kind
        if row.sense not in ("G", "L"):
            self.fail("DER", line, kind, "derived lines must have sense G or L")
        assume: frozenset = frozenset()
        leans_on_sol = False
        if kind == "asm":
            assume = frozenset([line])
        elif kind in ("lin", "rnd"):
            refs = der.reason.refs
            coefs, rhs = self.combine(line, refs, row.sense)
            if kind == "rnd":
                for i, a in coefs.items():
                    if i not in self.ints or a.denominator != 1:
                        self.fail("DER", line, "rnd",
                                  f"coefficient {a} on variable {i} cannot be rounded")
                rhs = Fraction(math.ceil(rhs))
            if not _dominates(coefs, rhs, row):
                self.fail("DER", line, kind, "combination does not imply the stated row")
            for l, m in refs:
                if m:
                    assume |= self.assumptions[l]
                    leans_on_sol |= self.sol_depends[l]
        elif kind == "uns":
            l1, a1, l2, a2 = der.reason.uns
            for l in (l1, a1, l2, a2):
                if not 0 <= l < line:
                    self.fail("DER", line, "reference", f"line {l} is not an earlier line")
            for a in (a1, a2):
                if a < self.ncons or self.cert.ders[a - self.ncons].reason.kind != "asm":
                    self.fail("DER", line, "uns", f"line {a} is not an assumption")
            if not self.complementary(self.cert.line_row(a1), self.cert.line_row(a2)):
                self.fail("DER", line, "uns", "assumptions are not complementary")
            if not self.is_integer_split(self.cert.line_row(a1)):
                self.fail("DER", line, "uns", "split variable is not integer")
            for l in (l1, l2):
                c, r = _ge(self.cert.line_row(l))
                if not _dominates(c, r, row):
                    self.fail("DER", line, "uns", f"line {l} does not imply the stated row")
            assume = (self.assumptions[l1] - {a1}) | (self.assumptions[l2] - {a2})
            leans_on_sol = self.sol_depends[l1] or self.sol_depends[l2]
        elif kind == "sol":
            k = der.reason.sol
            if not 0 <= k < len(self.sol_values):
                self.fail("DER", line, "sol", f"no solution {k}")
            coefs, rhs = _ge(row)
            if {i: -a for i, a in coefs.items()} != self.cert.obj:
                self.fail("DER", line, "sol", "row is not an objective cutoff")
            if -rhs < self.sol_values[k]:
                self.fail("DER", line, "sol", "cutoff is below the solution value")
            self.sol_cap = min(self.sol_cap, -rhs)
            leans_on_sol = True
        else:
            self.fail("DER", line, kind, "unknown reason")
        self.assumptions.append(assume)
        self.sol_depends.append(leans_on_sol)

    @staticmethod
    def complementary(r1: CRow, r2: CRow) -> bool:
        if len(r1.coefs) != 1 or len(r2.coefs) != 1:
            return False
        c1, b1 = _ge(r1)
        c2, b2 = _ge(r2)
        (i1, p1), = c1.items()
        (i2, p2), = c2.items()
        if i1 != i2 or abs(p1) != 1 or p1 != -p2:
            return False
        # normalize to x <= k  and  x >= k + 1
        if p1 == 1:
            low, up = b1, -b2
        else:
            low, up = b2, -b1
        return low.denominator == 1 and up.denominator == 1 and low == up + 1

    def is_integer_split(self, r1: CRow) -> bool:
        (i, _), = r1.coefs.items()
        return i in self.ints

    # -- conclusion ------------------------------------------------------------

    def check_rtp(self) -> None:
        cert = self.cert
        total = self.ncons + len(cert.ders)
        if cert.rtp[0] == "infeas":
            if cert.sols:
                self.fail("RTP", None, "infeas", "infeasibility claimed but a solution is listed")
            for k in range(total):
                if not self.assumptions[k] and cert.line_row(k).is_absurd():
                    return
            self.fail("RTP", None, "infeas", "no assumption-free contradiction derived")
        _, lb, ub = cert.rtp
        if lb > ub:
            self.fail("RTP", None, "range", "lower bound exceeds upper bound")
        if ub != INF:
            if not any(v <= ub for v in self.sol_values):
                self.fail("RTP", None, "range", "no solution attains the upper bound")
        if lb != -INF:
            if lb > self.sol_cap:
                self.fail("RTP", None, "range", "lower bound exceeds a cutoff used in the proof")
            target = CRow(dict(cert.obj), "G", Fraction(lb))
            for k in range(total):
                if self.assumptions[k]:
                    continue
                c, r = _ge(cert.line_row(k))
                if _dominates(c, r, target):
                    return
            self.fail("RTP", None, "range", "no assumption-free line proves the lower bound")
