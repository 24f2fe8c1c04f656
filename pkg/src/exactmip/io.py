"""Instance readers and writers: the native exact format and an MPS subset.

Native format, one statement per line (``#`` starts a comment)::

    var x 0 1 int
    var y -inf 5/2
    max 3 x + 2 y
    row cap: 2 x + 3.5 y <= 7

Numbers are integers, ``p/q`` fractions, or decimals with an optional
exponent, all converted to rationals without rounding. Row names are
optional. Every variable must be declared before use.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Union

from .model import EQ, GE, INF, LE, RawProblem

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_NAME = r"[A-Za-z_][\w.\[\]$@#]*"
_TERM = re.compile(rf"\s*([+-])?\s*({_NUM})?\s*\*?\s*({_NAME})\s*")
_SENSES = {">=": GE, "=>": GE, "<=": LE, "=<": LE, "=": EQ, "==": EQ}


class InstanceError(ValueError):
    def __init__(self, msg: str, lineno: int | None = None, path: str | None = None):
        where = ""
        if path:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {msg}" if where else msg)
        self.msg = msg
        self.lineno = lineno


def parse_number(tok: str) -> Fraction:
    """Exact rational from an integer, ``p/q`` or decimal literal."""
    t = tok.strip()
    if not re.fullmatch(rf"[+-]?{_NUM}", t):
        raise ValueError(f"bad number {tok!r}")
    if "/" in t:
        num, den = t.split("/")
        if int(den) == 0:
            raise ValueError("zero denominator")
        return Fraction(num) / int(den)
    return Fraction(t)


def _parse_bound(tok: str):
    low = tok.lower()
    if low in ("inf", "+inf", "infinity", "+infinity"):
        return INF
    if low in ("-inf", "-infinity"):
        return -INF
    return parse_number(tok)


def _parse_terms(text: str, index: dict[str, int], lineno: int) -> dict[int, Fraction]:
    text = text.strip()
    if text in ("", "0"):
        return {}
    coefs: dict[int, Fraction] = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise InstanceError(f"cannot parse terms near {text[pos:]!r}", lineno)
        sign, num, name = m.groups()
        if sign is None and not first:
            raise InstanceError(f"missing '+' or '-' before {name!r}", lineno)
        if name not in index:
            raise InstanceError(f"undeclared variable {name!r}", lineno)
        val = parse_number(num) if num else Fraction(1)
        if sign == "-":
            val = -val
        j = index[name]
        coefs[j] = coefs.get(j, Fraction(0)) + val
        pos = m.end()
        first = False
    return coefs


def parse_native(text: str, name: str = "", path: str | None = None) -> RawProblem:
    raw = RawProblem(name=name)
    index: dict[str, int] = {}
    seen_obj = False
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "var":
                toks = rest.split()
                if len(toks) not in (3, 4) or (len(toks) == 4 and toks[3] != "int"):
                    raise InstanceError("expected: var <name> <lb> <ub> [int]", lineno)
                vname = toks[0]
                if not re.fullmatch(_NAME, vname):
                    raise InstanceError(f"bad variable name {vname!r}", lineno)
                if vname in index:
                    raise InstanceError(f"duplicate variable {vname!r}", lineno)
                lb, ub = _parse_bound(toks[1]), _parse_bound(toks[2])
                if lb == INF or ub == -INF:
                    raise InstanceError("bound on the wrong infinite side", lineno)
                index[vname] = raw.add_var(vname, lb, ub, len(toks) == 4)
            elif head in ("min", "max"):
                if seen_obj:
                    raise InstanceError("objective given twice", lineno)
                seen_obj = True
                raw.obj_sense = head
                raw.obj = {j: a for j, a in _parse_terms(rest, index, lineno).items() if a}
            elif head == "row":
                rname = ""
                m = re.match(rf"\s*({_NAME})\s*:(.*)$", rest)
                if m:
                    rname, rest = m.group(1), m.group(2)
                m = re.match(r"(.*?)(>=|=>|<=|=<|==|=)\s*(\S+)\s*$", rest)
                if not m:
                    raise InstanceError("expected: row <terms> <sense> <rhs>", lineno)
                coefs = _parse_terms(m.group(1), index, lineno)
                raw.add_constraint(coefs, _SENSES[m.group(2)], parse_number(m.group(3)), rname)
            else:
                raise InstanceError(f"unknown statement {head!r}", lineno)
        except InstanceError as e:
            raise InstanceError(e.msg, lineno, path) from None
        except ValueError as e:
            raise InstanceError(str(e), lineno, path) from None
    return raw


def _fmt_num(v) -> str:
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return str(Fraction(v))


def _fmt_terms(coefs: dict[int, Fraction], names: list[str]) -> str:
    parts = []
    for j, a in sorted(coefs.items()):
        if parts:
            parts.append("-" if a < 0 else "+")
            parts.append(f"{_fmt_num(abs(a))} {names[j]}")
        else:
            parts.append(f"{_fmt_num(a)} {names[j]}")
    return " ".join(parts) if parts else "0"


def write_native(raw: RawProblem) -> str:
    out = []
    for j, name in enumerate(raw.names):
        kind = " int" if raw.is_int[j] else ""
        out.append(f"var {name} {_fmt_num(raw.lb[j])} {_fmt_num(raw.ub[j])}{kind}")
    out.append(f"{raw.obj_sense} {_fmt_terms(raw.obj, raw.names)}")
    sym = {GE: ">=", LE: "<=", EQ: "="}
    for con in raw.constraints:
        out.append(f"row {con.name}: {_fmt_terms(con.coefs, raw.names)} {sym[con.sense]} "
                   f"{_fmt_num(con.rhs)}")
    return "\n".join(out) + "\n"


# -- MPS subset ----------------------------------------------------------------

_MPS_SUPPORTED = ("NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA")


def parse_mps(text: str, path: str | None = None) -> RawProblem:
    """Free-form MPS without RANGES, OBJSENSE or SOS; integers via MARKER lines.

    Integer columns default to bounds ``[0, inf)``. A negative ``UP`` bound
    on a column whose lower bound is still 0 is rejected, since readers
    disagree on its meaning.
    """
    raw = RawProblem()
    section = None
    obj_row = None
    row_sense: dict[str, str] = {}
    row_order: list[str] = []
    row_coefs: dict[str, dict[int, Fraction]] = {}
    rhs: dict[str, Fraction] = {}
    index: dict[str, int] = {}
    in_int = False
    lb_set: set[int] = set()

    def err(msg, lineno):
        return InstanceError(msg, lineno, path)

    def num(tok, lineno):
        try:
            return parse_number(tok)
        except ValueError:
            raise err(f"bad number {tok!r}", lineno) from None

    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("*"):
            continue
        toks = line.split()
        if not line[0].isspace():
            section = toks[0].upper()
            if section not in _MPS_SUPPORTED:
                raise err(f"unsupported MPS section {section}", lineno)
            if section == "NAME":
                raw.name = toks[1] if len(toks) > 1 else ""
            if section == "ENDATA":
                break
            continue
        if section == "ROWS":
            if len(toks) != 2:
                raise err("ROWS entry needs a type and a name", lineno)
            kind, rname = toks[0].upper(), toks[1]
            if rname in row_sense or rname == obj_row:
                raise err(f"duplicate row {rname!r}", lineno)
            if kind == "N":
                if obj_row is None:
                    obj_row = rname
                continue
            if kind not in ("L", "G", "E"):
                raise err(f"bad row type {kind!r}", lineno)
            row_sense[rname] = {"L": LE, "G": GE, "E": EQ}[kind]
            row_order.append(rname)
            row_coefs[rname] = {}
        elif section == "COLUMNS":
            if len(toks) >= 3 and toks[1].strip("'").upper() == "MARKER":
                marker = toks[2].strip("'").upper()
                if marker == "INTORG":
                    in_int = True
                elif marker == "INTEND":
                    in_int = False
                else:
                    raise err(f"unsupported marker {marker}", lineno)
                continue
            if len(toks) not in (3, 5):
                raise err("COLUMNS entry needs 1 or 2 (row, value) pairs", lineno)
            col = toks[0]
            if col not in index:
                index[col] = raw.add_var(col, Fraction(0), INF, in_int)
            j = index[col]
            for rname, val in zip(toks[1::2], toks[2::2]):
                v = num(val, lineno)
                if rname == obj_row:
                    raw.obj[j] = raw.obj.get(j, Fraction(0)) + v
                elif rname in row_coefs:
                    row_coefs[rname][j] = row_coefs[rname].get(j, Fraction(0)) + v
                else:
                    raise err(f"unknown row {rname!r}", lineno)
        elif section == "RHS":
            if len(toks) not in (2, 3, 4, 5):
                raise err("bad RHS entry", lineno)
            pairs = toks[1:] if len(toks) % 2 == 1 else toks  # set name is optional
            for rname, val in zip(pairs[0::2], pairs[1::2]):
                if rname == obj_row:
                    raise err("objective constants are unsupported", lineno)
                if rname not in row_sense:
                    raise err(f"unknown row {rname!r}", lineno)
                rhs[rname] = num(val, lineno)
        elif section == "BOUNDS":
            kind = toks[0].upper()
            if kind in ("FR", "MI", "PL", "BV"):
                if len(toks) not in (2, 3):
                    raise err("bad BOUNDS entry", lineno)
                col = toks[-1]
                val = None
            else:
                if len(toks) not in (3, 4):
                    raise err("bad BOUNDS entry", lineno)
                col, val = toks[-2], num(toks[-1], lineno)
            if col not in index:
                raise err(f"unknown column {col!r}", lineno)
            j = index[col]
            if kind == "UP":
                if val < 0 and j not in lb_set and raw.lb[j] == 0:
                    raise err("negative UP bound with default lower bound is unsupported", lineno)
                raw.ub[j] = val
            elif kind == "LO":
                raw.lb[j] = val
                lb_set.add(j)
            elif kind == "FX":
                raw.lb[j] = raw.ub[j] = val
                lb_set.add(j)
            elif kind == "FR":
                raw.lb[j], raw.ub[j] = -INF, INF
                lb_set.add(j)
            elif kind == "MI":
                raw.lb[j] = -INF
                lb_set.add(j)
            elif kind == "PL":
                raw.ub[j] = INF
            elif kind == "BV":
                raw.lb[j], raw.ub[j] = Fraction(0), Fraction(1)
                raw.is_int[j] = True
                lb_set.add(j)
            elif kind in ("LI", "UI"):
                raw.is_int[j] = True
                if kind == "LI":
                    raw.lb[j] = val
                    lb_set.add(j)
                else:
                    raw.ub[j] = val
            else:
                raise err(f"unsupported bound type {kind}", lineno)
        else:
            raise err("data line outside a section", lineno)
    for rname in row_order:
        raw.add_constraint(row_coefs[rname], row_sense[rname], rhs.get(rname, Fraction(0)), rname)
    raw.obj = {j: a for j, a in raw.obj.items() if a}
    return raw


def read_instance(path: Union[str, Path]) -> RawProblem:
    """Read a ``.mps`` file or a native-format file (any other suffix)."""
    p = Path(path)
    text = p.read_text()
    if p.suffix.lower() == ".mps":
        raw = parse_mps(text, str(p))
        raw.name = raw.name or p.stem
        return raw
    return parse_native(text, p.stem, str(p))
