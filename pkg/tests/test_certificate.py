from fractions import Fraction
from pathlib import Path

import pytest

from exactmip.certificate import (
    CertificateBuilder, CertificateFormatError, CompletionError, complete_certificate,
    parse_certificate, verify_certificate, write_certificate,
)
from exactmip.io import read_instance
from exactmip.model import GE, RawProblem, canonicalize
from exactmip.search import SolveConfig, solve
from mutations import mutations

F = Fraction
CORPUS = Path(__file__).resolve().parent.parent / "corpus"

HEAD = """VER 1.0
VAR 2 x y
INT {ints}
OBJ min 0
CON 5
G 6 2 0 2 1 3
G 0 1 0 1
L 1 1 0 1
G 0 1 1 1
L 2 1 1 1
RTP range -inf inf
SOL 0
"""


def cert_text(ders, ints="1 1"):
    return HEAD.format(ints=ints) + f"DER {len(ders)}\n" + "\n".join(ders) + "\n"


# 1/3 (2x + 3y >= 6) - 2/3 (x <= 1)  gives  y >= 4/3
LIN = "G 4/3 1 1 1 { lin 2 0 1/3 2 -2/3 }"


def test_lin_propagation_line():
    assert verify_certificate(cert_text([LIN])).ok


def test_integer_rounding_line():
    assert verify_certificate(cert_text([LIN, "G 2 1 1 1 { rnd 1 5 1 }"])).ok


def test_rounding_needs_integer_variables():
    res = verify_certificate(cert_text([LIN, "G 2 1 1 1 { rnd 1 5 1 }"], ints="0"))
    assert not res.ok and (res.section, res.line, res.rule) == ("DER", 6, "rnd")


def test_weaker_stated_rhs_is_dominated():
    # the float nearest 4/3 lies below it, so the stated row is implied
    stated = F(1.3333333333333333)
    assert stated < F(4, 3)
    assert verify_certificate(cert_text([f"G {stated} 1 1 1 {{ lin 2 0 1/3 2 -2/3 }}"])).ok


def test_stronger_stated_rhs_is_rejected():
    res = verify_certificate(cert_text(["G 3/2 1 1 1 { lin 2 0 1/3 2 -2/3 }"]))
    assert not res.ok and (res.section, res.line, res.rule) == ("DER", 5, "lin")


def test_wrong_multiplier_sign():
    res = verify_certificate(cert_text(["G 4/3 1 1 1 { lin 2 0 1/3 2 2/3 }"]))
    assert not res.ok and res.rule == "sign"


def test_forward_reference_rejected():
    res = verify_certificate(cert_text(["G 4/3 1 1 1 { lin 2 5 1 2 -2/3 }"]))
    assert not res.ok and (res.line, res.rule) == (5, "reference")


def test_completion_without_weak_lines_is_identity():
    cert = parse_certificate(cert_text([LIN]))
    assert write_certificate(complete_certificate(cert)) == write_certificate(cert)


# roughly 1/3 of line 0, repaired with x <= 1 and y >= 0
WEAK = "G 1 1 1 1 { lin 0 } weak 1 0 0.3333333333333333 bounds 2 2 3"


def test_completion_pads_with_bound_lines():
    cert = parse_certificate(cert_text([WEAK]))
    assert verify_certificate(cert).rule == "weak"
    done = complete_certificate(cert)
    assert verify_certificate(done).ok
    refs = dict(done.ders[0].reason.refs)
    assert set(refs) == {0, 2, 3}
    assert refs[0] == F(0.3333333333333333)


def test_completion_fails_without_bound_lines():
    text = cert_text(["G 1 1 1 1 { lin 0 } weak 1 0 0.3333333333333333 bounds 0"])
    with pytest.raises(CompletionError) as err:
        complete_certificate(parse_certificate(text))
    assert err.value.line == 5


def test_completion_rejects_unimplied_row():
    text = cert_text(["G 3/2 1 1 1 { lin 0 } weak 1 0 0.3333333333333333 bounds 2 2 3"])
    with pytest.raises(CompletionError, match="below stated"):
        complete_certificate(parse_certificate(text))


def knapsack() -> RawProblem:
    raw = RawProblem()
    raw.add_var("x1", 0, 1, True)
    raw.add_var("x2", 0, 1, True)
    raw.obj = {0: F(-3), 1: F(-4)}
    raw.add_constraint({0: -2, 1: -3}, GE, -4)
    return raw


@pytest.mark.parametrize("config", ["baseline", "cp", "cp+dpa"])
def test_knapsack_end_to_end(config):
    res = solve(knapsack(), SolveConfig.preset(config, certify=True))
    cert = complete_certificate(res.certificate)
    assert cert.rtp == ("range", -4, -4)
    text = write_certificate(cert)
    assert verify_certificate(text).ok
    assert write_certificate(parse_certificate(text)) == text


def test_builder_needs_raw_problem():
    p = canonicalize(knapsack())
    p.raw = None
    with pytest.raises(ValueError):
        CertificateBuilder(p)


@pytest.mark.parametrize("text, lineno", [
    ("VER 1.0\nVAR 1 x\nINT 0\nOBJ mid 0\n", 4),
    ("VER 1.0\nVAR 1 x\nINT 0\nOBJ min 1 0 1/0\n", 4),
    ("VER 1.0\nVAR 1 x\nINT 0\nOBJ min 0\nCON 1\nG 0 1 0 0.5\n", 6),
])
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(CertificateFormatError) as err:
        parse_certificate(text)
    assert err.value.lineno == lineno


def test_truncated_certificate():
    with pytest.raises(CertificateFormatError):
        parse_certificate("VER 1.0\nVAR 1 x\n")


def test_unparseable_text_is_a_parse_rejection():
    res = verify_certificate("garbage")
    assert not res.ok and res.section == "parse"


@pytest.mark.parametrize("name", ["hand_knapsack.mip", "hand_thirds.mip", "market_00.mip",
                                  "knap_infeas_00.mip", "ratknap_02.mip"])
def test_mutations_are_rejected_where_expected(name):
    res = solve(read_instance(CORPUS / name), SolveConfig.preset("cp+dpa", certify=True))
    cert = complete_certificate(res.certificate)
    assert verify_certificate(cert).ok
    muts = mutations(cert, per_kind=1)
    assert len(muts) >= 10
    for mu in muts:
        out = verify_certificate(write_certificate(mu.cert))
        assert not out.ok, mu.name
        assert (out.section, out.line) == (mu.section, mu.line), (mu.name, str(out))
