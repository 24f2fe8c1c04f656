"""Generate the curated benchmark corpus in the native format.

Families:
  knap_infeas   two-sided knapsack windows with no integer point inside
  market        small market-split equality systems (often infeasible)
  eqchain       chains of linked equalities with integer steps
  ratknap       knapsacks with awkward rational weights
  cover         small set-cover models
  facility      capacitated facility location with mixed variables
  assign        assignment with side constraints (infeasible or tight)

plus a few hand-written models (including one in MPS form).

Usage: python scripts/make_corpus.py [--out corpus] [--seed 7]
"""
from __future__ import annotations

import argparse
import random
from fractions import Fraction
from pathlib import Path

from exactmip.io import write_native
from exactmip.model import EQ, GE, LE, RawProblem


def knap_infeas(rng: random.Random, n: int) -> RawProblem:
    raw = RawProblem(name="knap_infeas")
    w = [rng.randint(20, 60) * 2 for _ in range(n)]
    for j in range(n):
        raw.add_var(f"x{j}", 0, 1, True)
    raw.obj = {j: Fraction(-rng.randint(1, 9)) for j in range(n)}
    total = sum(w)
    target = (total // 2) | 1  # odd, while every weight is even
    raw.add_constraint({j: w[j] for j in range(n)}, GE, target)
    raw.add_constraint({j: w[j] for j in range(n)}, LE, target)
    return raw


def market(rng: random.Random, m: int, n: int) -> RawProblem:
    raw = RawProblem(name="market")
    for j in range(n):
        raw.add_var(f"x{j}", 0, 1, True)
    for i in range(m):
        a = {j: rng.randint(0, 20) for j in range(n)}
        d = sum(a.values()) // 2
        raw.add_constraint(a, EQ, d)
    raw.obj = {j: Fraction(rng.randint(-3, 3)) for j in range(n)}
    raw.obj = {j: c for j, c in raw.obj.items() if c}
    return raw


def eqchain(rng: random.Random, n: int) -> RawProblem:
    raw = RawProblem(name="eqchain")
    for j in range(n):
        raw.add_var(f"x{j}", 0, 10, True)
    for j in range(n - 1):
        step = rng.choice([2, 3])
        raw.add_constraint({j + 1: 1, j: -step}, LE, rng.randint(0, 1))
        raw.add_constraint({j + 1: 2, j: -1}, GE, Fraction(rng.randint(1, 3), 2))
    raw.add_constraint({j: 1 for j in range(n)}, EQ, rng.randint(n + 3, 3 * n))
    raw.obj = {j: Fraction(rng.randint(1, 5)) for j in range(n)}
    return raw


def ratknap(rng: random.Random, n: int) -> RawProblem:
    raw = RawProblem(name="ratknap")
    for j in range(n):
        raw.add_var(f"x{j}", 0, rng.randint(1, 3), True)
    raw.obj_sense = "max"
    raw.obj = {j: Fraction(rng.randint(5, 40), rng.choice([1, 3, 7, 11])) for j in range(n)}
    for _ in range(2):
        w = {j: Fraction(rng.randint(1, 50), rng.choice([3, 7, 13, 97])) for j in range(n)}
        cap = sum(w[j] * raw.ub[j] for j in range(n)) * Fraction(rng.randint(30, 60), 100)
        raw.add_constraint(w, LE, cap)
    return raw


def cover(rng: random.Random, n: int, m: int) -> RawProblem:
    raw = RawProblem(name="cover")
    for j in range(n):
        raw.add_var(f"s{j}", 0, 1, True)
    raw.obj = {j: Fraction(rng.randint(1, 10)) for j in range(n)}
    for i in range(m):
        members = rng.sample(range(n), rng.randint(2, max(2, n // 3)))
        raw.add_constraint({j: 1 for j in members}, GE, 1)
    return raw


def facility(rng: random.Random, nf: int, nc: int) -> RawProblem:
    raw = RawProblem(name="facility")
    y = [raw.add_var(f"open{f}", 0, 1, True) for f in range(nf)]
    x = {}
    for f in range(nf):
        for c in range(nc):
            x[f, c] = raw.add_var(f"ship{f}_{c}", 0, 1, False)
    demand = [rng.randint(1, 9) for _ in range(nc)]
    cap = [rng.randint(8, 20) for _ in range(nf)]
    obj = {y[f]: Fraction(rng.randint(10, 30)) for f in range(nf)}
    for (f, c), j in x.items():
        obj[j] = Fraction(rng.randint(1, 12) * demand[c], 2)
    raw.obj = obj
    for c in range(nc):
        raw.add_constraint({x[f, c]: 1 for f in range(nf)}, EQ, 1)
    for f in range(nf):
        terms = {x[f, c]: demand[c] for c in range(nc)}
        terms[y[f]] = -cap[f]
        raw.add_constraint(terms, LE, 0)
    return raw


def assign(rng: random.Random, n: int, infeasible: bool) -> RawProblem:
    raw = RawProblem(name="assign")
    v = {}
    for i in range(n):
        for j in range(n):
            v[i, j] = raw.add_var(f"a{i}_{j}", 0, 1, True)
    raw.obj = {k: Fraction(rng.randint(1, 20)) for k in v.values()}
    for i in range(n):
        raw.add_constraint({v[i, j]: 1 for j in range(n)}, EQ, 1)
        raw.add_constraint({v[j, i]: 1 for j in range(n)}, EQ, 1)
    # weighted side constraint; tight budget makes it infeasible
    wts = {k: rng.randint(1, 9) for k in v.values()}
    budget = n * 5 if not infeasible else n * 2 - 1
    raw.add_constraint(wts, LE, budget)
    return raw


FAMILIES = [
    ("knap_infeas", lambda rng, k: knap_infeas(rng, 7 + k)),
    ("market", lambda rng, k: market(rng, 2, 8 + k)),
    ("eqchain", lambda rng, k: eqchain(rng, 4 + k)),
    ("ratknap", lambda rng, k: ratknap(rng, 5 + k)),
    ("cover", lambda rng, k: cover(rng, 8 + k, 8 + k)),
    ("facility", lambda rng, k: facility(rng, 2 + k % 2, 3 + k)),
    ("assign", lambda rng, k: assign(rng, 3 + k % 2, k % 2 == 0)),
]


HAND = {
    "hand_knapsack.mip": """# min -3 x1 - 4 x2 subject to a single knapsack row; optimum -4 at (0, 1)
var x1 0 1 int
var x2 0 1 int
min -3 x1 - 4 x2
row cap: -2 x1 - 3 x2 >= -4
""",
    "hand_infeasible.mip": """# two binaries cannot sum to 3
var x 0 1 int
var y 0 1 int
min x + y
row need: x + y >= 3
""",
    "hand_empty.mip": """# no variables, no rows
min 0
""",
    "hand_thirds.mip": """# rational data that is not representable in binary floating point
var x 0 10 int
var y 0 10 int
var z 0 5/3
max 1/3 x + 2/7 y + 1/10 z
row r1: 0.1 x + 1/3 y + z <= 13/6
row r2: 2/3 x - 1/7 y >= 1/11
row r3: x + y + 3 z <= 23/2
""",
    "hand_mixed.mps": """NAME          HANDMIX
ROWS
 N  COST
 G  DEMAND
 L  CAP
 E  LINK
COLUMNS
    MARKER                 'MARKER'                 'INTORG'
    Y         COST         7              CAP          -4
    MARKER                 'MARKER'                 'INTEND'
    X1        COST         1.5            DEMAND       1
    X1        CAP          1              LINK         1
    X2        COST         2.25           DEMAND       1
    X2        LINK         -2
RHS
    RHS       DEMAND       3.5            LINK         0.5
BOUNDS
 UP BND       Y            3
 UP BND       X1           10
 UP BND       X2           10
ENDATA
""",
}


def generate(out: Path, seed: int, per_family: int) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in HAND.items():
        path = out / name
        path.write_text(text)
        paths.append(path)
    for fam, make in FAMILIES:
        for k in range(per_family):
            rng = random.Random(f"{seed}-{fam}-{k}")
            raw = make(rng, k)
            path = out / f"{fam}_{k:02d}.mip"
            path.write_text(f"# family {fam}, instance {k}, seed {seed}\n" + write_native(raw))
            paths.append(path)
    return paths


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="corpus")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--per-family", type=int, default=6)
    args = ap.parse_args()
    paths = generate(Path(args.out), args.seed, args.per_family)
    print(f"wrote {len(paths)} instances to {args.out}")


if __name__ == "__main__":
    main()
