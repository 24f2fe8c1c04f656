"""Single-field mutations of a valid certificate, each with its expected rejection site.

Every mutation is chosen so that it provably breaks the certificate at one
place: the expected ``(section, line)`` is where an exact checker must stop.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from exactmip.certificate import Certificate, CRow, Reason

EPS = Fraction(1, 10**9)


@dataclass
class Mutation:
    name: str
    cert: Certificate
    section: str
    line: Optional[int]


def _combine(cert: Certificate, refs, target: str):
    coefs: dict[int, Fraction] = {}
    rhs = Fraction(0)
    for l, m in refs:
        src = cert.line_row(l)
        rhs += m * src.rhs
        for i, a in src.coefs.items():
            coefs[i] = coefs.get(i, Fraction(0)) + m * a
    s = 1 if target == "G" else -1
    return {i: s * a for i, a in coefs.items() if a}, s * rhs


def _edit(cert: Certificate, k: int):
    """Copy sharing everything except derivation ``k``, which loses its raw text."""
    out = copy.copy(cert)
    out.ders = list(cert.ders)
    out.ders[k] = copy.deepcopy(cert.ders[k])
    out.ders[k].raw = None
    return out, out.ders[k]


def _with_sols(cert: Certificate):
    out = copy.copy(cert)
    out.sols = [dict(s) for s in cert.sols]
    return out


def mutations(cert: Certificate, per_kind: int = 2) -> list[Mutation]:
    nc = len(cert.cons)
    out: list[Mutation] = []
    counts: dict[str, int] = {}

    def add(name, mutated, section, line):
        if counts.get(name, 0) < per_kind:
            counts[name] = counts.get(name, 0) + 1
            out.append(Mutation(f"{name}@{line}", mutated, section, line))

    for k, der in enumerate(cert.ders):
        line = nc + k
        kind = der.reason.kind
        row = der.row
        if kind == "lin" and row.coefs:
            coefs, rhs = _combine(cert, der.reason.refs, row.sense)
            ge_c, ge_r = row.ge_form()
            if coefs == ge_c and rhs == ge_r:
                m, d = _edit(cert, k)
                d.row = CRow(dict(row.coefs), row.sense,
                             row.rhs + (EPS if row.sense == "G" else -EPS))
                add("rhs+1e-9", m, "DER", line)
            signed = [(j, (l, mult)) for j, (l, mult) in enumerate(der.reason.refs)
                      if mult and cert.line_row(l).sense != "E"]
            if signed:
                j, (l, mult) = signed[0]
                m, d = _edit(cert, k)
                d.reason.refs[j] = (l, -mult)
                add("negate-multiplier", m, "DER", line)
                m, d = _edit(cert, k)
                d.row = CRow(dict(row.coefs), "L" if row.sense == "G" else "G", row.rhs)
                add("flip-sense", m, "DER", line)
            m, d = _edit(cert, k)
            l, mult = d.reason.refs[0]
            d.reason.refs[0] = (line, mult)
            add("forward-reference", m, "DER", line)
            bumped = [(j, l, mult) for j, (l, mult) in enumerate(der.reason.refs)
                      if mult and cert.line_row(l).coefs]
            for j, l, mult in bumped:
                m, d = _edit(cert, k)
                d.reason.refs[j] = (l, 2 * mult)
                c2, r2 = _combine(m, d.reason.refs, row.sense)
                if c2 != ge_c and c2:
                    add("double-multiplier", m, "DER", line)
                    break
            m, d = _edit(cert, k)
            i0 = min(row.coefs)
            d.row = CRow({**row.coefs, i0: row.coefs[i0] + 1}, row.sense, row.rhs)
            if d.row.coefs[i0] == 0:
                del d.row.coefs[i0]
            add("coefficient+1", m, "DER", line)
        elif kind == "rnd":
            m, d = _edit(cert, k)
            d.reason = Reason("lin", list(der.reason.refs))
            coefs, rhs = _combine(cert, der.reason.refs, row.sense)
            ge_c, ge_r = row.ge_form()
            if coefs and rhs < ge_r:
                add("rnd-as-lin", m, "DER", line)
        elif kind == "asm":
            m, d = _edit(cert, k)
            d.reason = Reason("lin", [])
            add("asm-as-lin", m, "DER", line)
        elif kind == "uns":
            l1, a1, l2, a2 = der.reason.uns
            m, d = _edit(cert, k)
            d.reason = Reason("uns", uns=(l1, l1, l2, a2))
            add("uns-bad-assumption", m, "DER", line)
            m, d = _edit(cert, k)
            d.reason = Reason("uns", uns=(l1, a1, l2, a1))
            add("uns-same-assumption", m, "DER", line)
        elif kind == "sol":
            m, d = _edit(cert, k)
            d.row = CRow(dict(row.coefs), row.sense, row.rhs - 1)
            add("sol-cutoff-below-value", m, "DER", line)
            m, d = _edit(cert, k)
            d.reason = Reason("sol", sol=len(cert.sols))
            add("sol-missing-index", m, "DER", line)

    for s, sol in enumerate(cert.sols):
        ints = [i for i in cert.int_idx]
        if ints:
            m = _with_sols(cert)
            m.sols[s][ints[0]] = m.sols[s].get(ints[0], Fraction(0)) + Fraction(1, 2)
            add("fractional-solution", m, "SOL", s)
        m = _with_sols(cert)
        m.sols[s][cert.n + 3] = Fraction(1)
        add("solution-index", m, "SOL", s)

    if cert.rtp[0] == "range":
        _, lb, ub = cert.rtp
        if lb != float("-inf"):
            m = copy.copy(cert)
            m.rtp = ("range", lb + 1, max(ub, lb + 1))
            add("rtp-lower-bound", m, "RTP", None)
        if ub != float("inf"):
            m = copy.copy(cert)
            m.rtp = ("range", min(lb, ub - 1), ub - 1)
            add("rtp-upper-bound", m, "RTP", None)
    elif cert.rtp[0] == "infeas":
        m = copy.copy(cert)
        m.rtp = ("range", Fraction(0), Fraction(0))
        add("rtp-infeas-to-range", m, "RTP", None)
    return out
