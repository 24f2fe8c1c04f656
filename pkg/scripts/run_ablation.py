"""Run the three solver configurations over the corpus and save the results.

Writes the aggregate table, a per-family breakdown of LP solves and conflict
use, and the per-instance CSV into the output directory.

Usage: python scripts/run_ablation.py [--corpus corpus] [--out results] [--time-limit S]
"""
from __future__ import annotations

import argparse
from collections import Counter, defaultdict
from pathlib import Path

from exactmip.bench import find_instances, run_bench
from exactmip.search import CONFIG_NAMES


def family(instance: str) -> str:
    stem = instance.rsplit(".", 1)[0]
    return stem.rsplit("_", 1)[0] if stem[-1].isdigit() else stem


def family_table(report) -> str:
    acc: dict[str, Counter] = defaultdict(Counter)
    for r in report.records:
        f = acc[family(r.instance)]
        f[f"{r.config}:lp"] += r.lp_solves
        f[f"{r.config}:nodes"] += r.nodes
        if r.config == "cp+dpa":
            f["created"] += r.conflicts_created
            f["used"] += r.conflicts_used
    head = f"{'family':<14}" + "".join(f"{c + ' LPs':>16}" for c in CONFIG_NAMES) + \
        f"{'created':>9}{'used':>7}"
    lines = [head]
    for name in sorted(acc):
        f = acc[name]
        lines.append(f"{name:<14}" + "".join(f"{f[c + ':lp']:>16}" for c in CONFIG_NAMES)
                     + f"{f['created']:>9}{f['used']:>7}")
    return "\n".join(lines)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    root = Path(__file__).resolve().parent.parent
    ap.add_argument("--corpus", default=str(root / "corpus"))
    ap.add_argument("--out", default=str(root / "results"))
    ap.add_argument("--time-limit", type=float)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    report = run_bench(find_instances(args.corpus), CONFIG_NAMES,
                       time_limit=args.time_limit, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    text = report.table() + "\n\n" + family_table(report) + "\n"
    (out / "ablation_table.txt").write_text(text)
    (out / "ablation.csv").write_text(report.to_csv())
    print(text)
    print(f"wrote {out / 'ablation_table.txt'} and {out / 'ablation.csv'}")


if __name__ == "__main__":
    main()
