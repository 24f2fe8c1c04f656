"""Text certificate format: data model, parser and writer.

Only the standard library is used here so that the verifier can depend on
this module without touching any solver code.

Layout, one record per line::

    VER 1.0
    VAR <n> <name>...
    INT <k> <index>...
    OBJ min <nnz> {<idx> <coef>}
    CON <m>
    <sense> <rhs> <nnz> {<idx> <coef>}            (m lines)
    RTP infeas | RTP range <lb> <ub>
    SOL <k>
    <nnz> {<idx> <value>}                        (k lines)
    DER <d>
    <sense> <rhs> <nnz> {<idx> <coef>} { <reason> } [weak <k> {<line> <fp>} bounds <k> {<line>}]

Constraint lines are numbered from 0 in CON order and DER lines continue the
numbering. Reasons: ``asm``, ``lin <k> {<line> <mult>}``, ``rnd <k> {<line>
<mult>}``, ``uns <l1> <a1> <l2> <a2>``, ``sol <index>``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

VERSION = "1.0"

_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")


class CertificateFormatError(ValueError):
    def __init__(self, msg: str, lineno: Optional[int] = None):
        super().__init__(msg if lineno is None else f"text line {lineno}: {msg}")
        self.lineno = lineno


def parse_rat(tok: str) -> Fraction:
    if not _RAT.match(tok):
        raise CertificateFormatError(f"not an exact rational: {tok!r}")
    if "/" in tok and int(tok.split("/")[1]) == 0:
        raise CertificateFormatError("zero denominator")
    return Fraction(tok)


def parse_bound(tok: str) -> Union[Fraction, float]:
    if tok in ("inf", "+inf"):
        return float("inf")
    if tok == "-inf":
        return float("-inf")
    return parse_rat(tok)


def fmt_rat(v) -> str:
    if v == float("inf"):
        return "inf"
    if v == float("-inf"):
        return "-inf"
    return str(Fraction(v))


@dataclass
class CRow:
    coefs: dict[int, Fraction]
    sense: str  # 'G', 'L' or 'E'
    rhs: Fraction

    def ge_form(self) -> tuple[dict[int, Fraction], Fraction]:
        """Coefficients and rhs of the equivalent ``>=`` row (not valid for E)."""
        if self.sense == "L":
            return {i: -a for i, a in self.coefs.items()}, -self.rhs
        return dict(self.coefs), self.rhs

    def is_absurd(self) -> bool:
        if self.coefs:
            return False
        return (self.sense == "G" and self.rhs > 0) or (self.sense == "L" and self.rhs < 0) \
            or (self.sense == "E" and self.rhs != 0)


@dataclass
class Reason:
    kind: str  # asm, lin, rnd, uns, sol
    refs: list[tuple[int, Fraction]] = field(default_factory=list)
    uns: tuple[int, int, int, int] = (0, 0, 0, 0)
    sol: int = 0


@dataclass
class WeakPayload:
    mults: list[tuple[int, float]]
    bounds: list[int]


@dataclass
class Derivation:
    row: CRow
    reason: Reason
    weak: Optional[WeakPayload] = None
    raw: Optional[str] = None  # exact source text, kept for pass-through


@dataclass
class Certificate:
    names: list[str]
    int_idx: list[int]
    obj: dict[int, Fraction]
    cons: list[CRow]
    rtp: tuple
    sols: list[dict[int, Fraction]]
    ders: list[Derivation]
    obj_sense: str = "min"
    version: str = VERSION

    @property
    def n(self) -> int:
        return len(self.names)

    def line_row(self, line: int) -> CRow:
        if line < len(self.cons):
            return self.cons[line]
        return self.ders[line - len(self.cons)].row


# -- writing -----------------------------------------------------------------

def fmt_row(row: CRow) -> str:
    parts = [row.sense, fmt_rat(row.rhs), str(len(row.coefs))]
    for i, a in sorted(row.coefs.items()):
        parts += [str(i), fmt_rat(a)]
    return " ".join(parts)


def fmt_reason(reason: Reason) -> str:
    if reason.kind == "asm":
        body = "asm"
    elif reason.kind in ("lin", "rnd"):
        items = " ".join(f"{l} {fmt_rat(m)}" for l, m in reason.refs)
        body = f"{reason.kind} {len(reason.refs)}" + (f" {items}" if items else "")
    elif reason.kind == "uns":
        body = "uns " + " ".join(str(v) for v in reason.uns)
    elif reason.kind == "sol":
        body = f"sol {reason.sol}"
    else:
        raise ValueError(f"unknown reason {reason.kind!r}")
    return "{ " + body + " }"


def fmt_derivation(der: Derivation) -> str:
    text = f"{fmt_row(der.row)} {fmt_reason(der.reason)}"
    if der.weak is not None:
        w = der.weak
        mults = " ".join(f"{l} {f!r}" for l, f in w.mults)
        bnds = " ".join(str(l) for l in w.bounds)
        text += f" weak {len(w.mults)}" + (f" {mults}" if mults else "")
        text += f" bounds {len(w.bounds)}" + (f" {bnds}" if bnds else "")
    return text


def write_certificate(cert: Certificate) -> str:
    out = [f"VER {cert.version}"]
    out.append(" ".join(["VAR", str(len(cert.names))] + list(cert.names)))
    out.append(" ".join(["INT", str(len(cert.int_idx))] + [str(i) for i in cert.int_idx]))
    obj = [f"{i} {fmt_rat(a)}" for i, a in sorted(cert.obj.items())]
    out.append(" ".join(["OBJ", cert.obj_sense, str(len(obj))] + obj))
    out.append(f"CON {len(cert.cons)}")
    out.extend(fmt_row(r) for r in cert.cons)
    if cert.rtp[0] == "infeas":
        out.append("RTP infeas")
    else:
        out.append(f"RTP range {fmt_rat(cert.rtp[1])} {fmt_rat(cert.rtp[2])}")
    out.append(f"SOL {len(cert.sols)}")
    for s in cert.sols:
        items = [f"{i} {fmt_rat(v)}" for i, v in sorted(s.items()) if v]
        out.append(" ".join([str(len(items))] + items))
    out.append(f"DER {len(cert.ders)}")
    out.extend(d.raw if d.raw is not None else fmt_derivation(d) for d in cert.ders)
    return "\n".join(out) + "\n"


# -- parsing -----------------------------------------------------------------

class _Tokens:
    def __init__(self, toks: list[str], lineno: int):
        self.toks = toks
        self.pos = 0
        self.lineno = lineno

    def next(self) -> str:
        if self.pos >= len(self.toks):
            raise CertificateFormatError("unexpected end of line", self.lineno)
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def int(self, lo: int = 0) -> int:
        tok = self.next()
        if not re.match(r"^[+-]?\d+$", tok):
            raise CertificateFormatError(f"expected integer, got {tok!r}", self.lineno)
        v = int(tok)
        if v < lo:
            raise CertificateFormatError(f"integer {v} out of range", self.lineno)
        return v

    def rat(self) -> Fraction:
        try:
            return parse_rat(self.next())
        except CertificateFormatError as e:
            raise CertificateFormatError(str(e), self.lineno) from None

    def expect(self, word: str) -> None:
        tok = self.next()
        if tok != word:
            raise CertificateFormatError(f"expected {word!r}, got {tok!r}", self.lineno)

    def done(self) -> None:
        if self.pos != len(self.toks):
            raise CertificateFormatError(f"trailing tokens {self.toks[self.pos:]}", self.lineno)


def _parse_row(t: _Tokens) -> CRow:
    sense = t.next()
    if sense not in ("G", "L", "E"):
        raise CertificateFormatError(f"bad sense {sense!r}", t.lineno)
    rhs = t.rat()
    nnz = t.int()
    coefs: dict[int, Fraction] = {}
    for _ in range(nnz):
        i = t.int()
        a = t.rat()
        if i in coefs:
            raise CertificateFormatError(f"duplicate index {i}", t.lineno)
        if a != 0:
            coefs[i] = a
    return CRow(coefs, sense, rhs)


def _parse_derivation(t: _Tokens, raw: str) -> Derivation:
    row = _parse_row(t)
    t.expect("{")
    kind = t.next()
    reason = Reason(kind)
    if kind == "asm":
        pass
    elif kind in ("lin", "rnd"):
        k = t.int()
        reason.refs = [(t.int(), t.rat()) for _ in range(k)]
    elif kind == "uns":
        reason.uns = (t.int(), t.int(), t.int(), t.int())
    elif kind == "sol":
        reason.sol = t.int()
    else:
        raise CertificateFormatError(f"unknown reason {kind!r}", t.lineno)
    t.expect("}")
    weak = None
    if t.pos < len(t.toks):
        t.expect("weak")
        k = t.int()
        mults = []
        for _ in range(k):
            line = t.int()
            try:
                f = float(t.next())
            except ValueError:
                raise CertificateFormatError("bad weak multiplier", t.lineno) from None
            mults.append((line, f))
        t.expect("bounds")
        k = t.int()
        weak = WeakPayload(mults, [t.int() for _ in range(k)])
    t.done()
    return Derivation(row, reason, weak, raw)


def parse_certificate(text: str) -> Certificate:
    lines = [(no, ln.strip()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    it = iter(lines)

    def header(word: str) -> _Tokens:
        try:
            no, ln = next(it)
        except StopIteration:
            raise CertificateFormatError(f"missing {word} section") from None
        t = _Tokens(ln.split(), no)
        t.expect(word)
        return t

    def body() -> tuple[int, str]:
        try:
            return next(it)
        except StopIteration:
            raise CertificateFormatError("unexpected end of certificate") from None

    t = header("VER")
    version = t.next()
    t.done()
    t = header("VAR")
    n = t.int()
    names = [t.next() for _ in range(n)]
    t.done()
    t = header("INT")
    k = t.int()
    int_idx = [t.int() for _ in range(k)]
    t.done()
    t = header("OBJ")
    sense = t.next()
    if sense not in ("min", "max"):
        raise CertificateFormatError(f"bad objective sense {sense!r}", t.lineno)
    k = t.int()
    obj: dict[int, Fraction] = {}
    for _ in range(k):
        i = t.int()
        a = t.rat()
        if a:
            obj[i] = a
    t.done()
    t = header("CON")
    m = t.int()
    cons = []
    for _ in range(m):
        no, ln = body()
        rt = _Tokens(ln.split(), no)
        cons.append(_parse_row(rt))
        rt.done()
    t = header("RTP")
    kind = t.next()
    if kind == "infeas":
        rtp: tuple = ("infeas",)
    elif kind == "range":
        try:
            rtp = ("range", parse_bound(t.next()), parse_bound(t.next()))
        except CertificateFormatError as e:
            raise CertificateFormatError(str(e), t.lineno) from None
    else:
        raise CertificateFormatError(f"bad RTP {kind!r}", t.lineno)
    t.done()
    t = header("SOL")
    k = t.int()
    sols = []
    for _ in range(k):
        no, ln = body()
        st = _Tokens(ln.split(), no)
        nnz = st.int()
        sol: dict[int, Fraction] = {}
        for _ in range(nnz):
            i = st.int()
            sol[i] = st.rat()
        st.done()
        sols.append(sol)
    t = header("DER")
    d = t.int()
    t.done()
    ders = []
    for _ in range(d):
        no, ln = body()
        ders.append(_parse_derivation(_Tokens(ln.split(), no), ln))
    rest = list(it)
    if rest:
        raise CertificateFormatError("content after DER section", rest[0][0])
    return Certificate(names, int_idx, obj, cons, rtp, sols, ders, sense, version)


def read_certificate(path) -> Certificate:
    with open(path) as fh:
        return parse_certificate(fh.read())
