"""Command-line entry points: solve, complete-cert, check-cert, bench."""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .bench import CSV_COLUMNS, find_instances, run_bench
from .certificate import (
    CertificateFormatError, CompletionError, complete_certificate, read_certificate,
    verify_file, write_certificate,
)
from .io import InstanceError, read_instance
from .search import CONFIG_NAMES, INFEASIBLE, LIMIT, OPTIMAL, UNBOUNDED, SolveConfig, solve

EXIT_OK, EXIT_ERROR, EXIT_LIMIT = 0, 1, 2


def format_value(v) -> str:
    if v is None:
        return "none"
    if v in (float("inf"), float("-inf")):
        return "inf" if v > 0 else "-inf"
    v = Fraction(v)
    if v.denominator == 1:
        return str(v)
    return f"{v} ({float(v):.12g})"


def _stats_block(res) -> list[str]:
    st = res.stats
    return [
        f"  nodes              {st.nodes}",
        f"  lp solves          {st.lp_solves}",
        f"  propagation rounds {st.prop_rounds}",
        f"  bound changes      {st.bound_changes}",
        f"  pruned by prop.    {st.prop_pruned}",
        f"  conflicts created  {st.conflicts_created}",
        f"  conflicts used     {st.conflicts_used}",
        f"  time total         {st.total_time:.3f} s",
        f"  time propagation   {st.prop_time:.3f} s",
        f"  time conflicts     {st.conflict_time:.3f} s",
        f"  time lp            {st.lp_time:.3f} s",
    ]


def cmd_solve(args) -> int:
    try:
        raw = read_instance(args.instance)
    except (OSError, InstanceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    config = SolveConfig(
        enable_propagation=not args.no_propagation,
        enable_dual_proofs=not args.no_conflict,
        node_limit=args.node_limit,
        time_limit=args.time_limit,
        certificate_path=args.certificate,
        seed=args.seed,
    )
    res = solve(raw, config)
    if res.status == OPTIMAL:
        print(f"OPTIMAL value {format_value(res.objective)}")
    elif res.status == LIMIT:
        print(f"LIMIT value {format_value(res.objective)} dual bound {format_value(res.dual_bound)}")
    else:
        print(res.status)
    if res.x is not None and args.print_solution:
        for name, v in zip(raw.names, res.x):
            if v:
                print(f"  {name} = {v}")
    print("stats:")
    print("\n".join(_stats_block(res)))
    if args.certificate and res.status != UNBOUNDED:
        print(f"certificate written to {args.certificate}")
    if res.status in (OPTIMAL, INFEASIBLE, UNBOUNDED):
        return EXIT_OK
    return EXIT_LIMIT


def cmd_complete(args) -> int:
    try:
        cert = complete_certificate(read_certificate(args.input))
    except (OSError, CertificateFormatError, CompletionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    text = write_certificate(cert)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        res = verify_file(args.certificate)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    print(res)
    return EXIT_OK if res.ok else EXIT_ERROR


def cmd_bench(args) -> int:
    configs = args.configs.split(",")
    for c in configs:
        if c not in CONFIG_NAMES:
            print(f"error: unknown config {c!r}; choose from {', '.join(CONFIG_NAMES)}",
                  file=sys.stderr)
            return EXIT_ERROR
    try:
        instances = find_instances(args.path)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    def progress(rec):
        if not args.quiet:
            print(f"{rec.instance:<32} {rec.config:<9} {rec.status:<10} "
                  f"{rec.time_s:8.3f}s {rec.nodes:7d} nodes", file=sys.stderr)

    report = run_bench(instances, configs, args.node_limit, args.time_limit, args.seed, progress)
    print(report.table())
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
        print(f"per-instance results written to {args.csv} ({', '.join(CSV_COLUMNS)})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exactmip", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance exactly")
    s.add_argument("instance")
    s.add_argument("--no-propagation", action="store_true", help="disable bound propagation")
    s.add_argument("--no-conflict", action="store_true", help="disable dual proof analysis")
    s.add_argument("--certificate", metavar="PATH", help="write a certificate file")
    s.add_argument("--time-limit", type=float, metavar="S")
    s.add_argument("--node-limit", type=int, metavar="N")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--print-solution", action="store_true", help="list nonzero solution values")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("complete-cert", help="repair weak derivations in a certificate")
    c.add_argument("input")
    c.add_argument("-o", "--output", metavar="PATH", help="output file (default: stdout)")
    c.set_defaults(func=cmd_complete)

    v = sub.add_parser("check-cert", help="verify a completed certificate")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_check)

    b = sub.add_parser("bench", help="run the ablation configs over a directory of instances")
    b.add_argument("path")
    b.add_argument("--configs", default=",".join(CONFIG_NAMES))
    b.add_argument("--csv", metavar="PATH")
    b.add_argument("--time-limit", type=float, metavar="S")
    b.add_argument("--node-limit", type=int, metavar="N")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-q", "--quiet", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
