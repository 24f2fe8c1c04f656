"""Repair weak derivations into exact ones.

A weak line carries floating-point multipliers and a list of bound lines it
may lean on. Completion recomputes the combination exactly, pays for every
coefficient mismatch with a multiple of a single-variable bound line, and
checks that the resulting right-hand side still covers the stated one.
Lines without a weak payload are copied through byte for byte.
"""
from __future__ import annotations

from fractions import Fraction

from .format import Certificate, Derivation, Reason, fmt_derivation


class CompletionError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def complete_certificate(cert: Certificate) -> Certificate:
    ncons = len(cert.cons)
    ders = []
    for k, der in enumerate(cert.ders):
        line_no = ncons + k
        if der.weak is None:
            ders.append(der)
            continue
        ders.append(_complete_line(cert, line_no, der))
    return Certificate(cert.names, cert.int_idx, cert.obj, cert.cons, cert.rtp, cert.sols,
                       ders, cert.obj_sense, cert.version)


def _complete_line(cert: Certificate, line_no: int, der: Derivation) -> Derivation:
    row = der.row
    if row.sense not in ("G", "L"):
        raise CompletionError(line_no, "weak line must have sense G or L")
    sign = 1 if row.sense == "G" else -1
    acc: dict[int, Fraction] = {}
    for line, f in der.weak.mults:
        if not 0 <= line < line_no:
            raise CompletionError(line_no, f"reference to line {line} not yet derived")
        acc[line] = acc.get(line, Fraction(0)) + sign * Fraction(f)
    coefs: dict[int, Fraction] = {}
    rhs = Fraction(0)
    for line, m in acc.items():
        src = cert.line_row(line)
        _check_sign(line_no, src.sense, row.sense, line, m)
        rhs += m * src.rhs
        for i, a in src.coefs.items():
            coefs[i] = coefs.get(i, Fraction(0)) + m * a
    # work in GE form: stated_ge - combined_ge must be covered by bounds
    combined = {i: sign * a for i, a in coefs.items() if a}
    combined_rhs = sign * rhs
    stated, stated_rhs = row.ge_form()
    lower: dict[int, tuple[int, Fraction]] = {}
    upper: dict[int, tuple[int, Fraction]] = {}
    for line in der.weak.bounds:
        if not 0 <= line < line_no:
            raise CompletionError(line_no, f"bound reference {line} not yet derived")
        src = cert.line_row(line)
        if len(src.coefs) != 1 or src.sense == "E":
            continue
        (i, a), = src.coefs.items()
        ge_coefs, ge_rhs = src.ge_form()
        p = ge_coefs[i]
        # GE form p x_i >= ge_rhs: p > 0 is a lower bound, p < 0 an upper bound
        (lower if p > 0 else upper).setdefault(i, (line, p))
    for i in sorted(set(stated) | set(combined)):
        delta = stated.get(i, Fraction(0)) - combined.get(i, Fraction(0))
        if delta == 0:
            continue
        table = lower if delta > 0 else upper
        if i not in table:
            side = "lower" if delta > 0 else "upper"
            raise CompletionError(line_no, f"no {side} bound line for variable {i}")
        line, p = table[i]
        lam = delta / p  # nonnegative GE multiplier
        src = cert.line_row(line)
        ge_sign = 1 if src.sense == "G" else -1
        combined_rhs += lam * ge_sign * src.rhs
        acc[line] = acc.get(line, Fraction(0)) + sign * lam * ge_sign
    if combined_rhs < stated_rhs:
        raise CompletionError(line_no, f"repaired rhs {combined_rhs} below stated {stated_rhs}")
    refs = [(l, m) for l, m in sorted(acc.items()) if m]
    out = Derivation(row, Reason("lin", refs))
    out.raw = fmt_derivation(out)
    return out


def _check_sign(line_no: int, src_sense: str, target: str, line: int, m: Fraction) -> None:
    if src_sense == "E" or m == 0:
        return
    ok = (m > 0) == (src_sense == target)
    if not ok:
        raise CompletionError(line_no, f"multiplier {m} on line {line} has the wrong sign")
