"""Ablation benchmarking: per-instance records, shifted geometric means, CSV."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .io import read_instance
from .search import CONFIG_NAMES, INFEASIBLE, OPTIMAL, SolveConfig, solve

CSV_COLUMNS = ("instance", "config", "status", "time_s", "nodes", "prop_time_s",
               "conflict_time_s", "lp_solves", "conflicts_created", "conflicts_used")

LABELS = {"baseline": "Baseline", "cp": "+ CP", "cp+dpa": "+ CP + DPA"}

INSTANCE_SUFFIXES = (".mip", ".lp.txt", ".txt", ".mps")


def shifted_geomean(values: Sequence[float], shift: float) -> float:
    """``(prod(v + s))^(1/n) - s``, evaluated through logarithms to avoid overflow."""
    vals = list(values)
    if not vals:
        raise ValueError("shifted geometric mean of an empty list")
    if shift < 0:
        raise ValueError("shift must be nonnegative")
    if len(vals) == 1:
        return float(vals[0])
    if any(v + shift <= 0 for v in vals):
        if any(v + shift < 0 for v in vals):
            raise ValueError("values must satisfy v + shift >= 0")
        return -float(shift)
    # scale by the largest term so equal inputs come back exactly
    ref = max(vals) + shift
    mean_log = math.fsum(math.log((v + shift) / ref) for v in vals) / len(vals)
    return math.exp(mean_log) * ref - shift


@dataclass
class BenchRecord:
    instance: str
    config: str
    status: str
    time_s: float
    nodes: int
    prop_time_s: float
    conflict_time_s: float
    lp_solves: int
    conflicts_created: int
    conflicts_used: int
    objective: Optional[str] = None
    error: Optional[str] = None

    @property
    def solved(self) -> bool:
        return self.status in (OPTIMAL, INFEASIBLE)


@dataclass
class ConfigSummary:
    config: str
    solved: int
    time: float
    time_rel: Optional[float]
    prop_time: Optional[float]
    conflict_time: Optional[float]
    nodes: float
    nodes_rel: Optional[float]


@dataclass
class BenchReport:
    records: list[BenchRecord] = field(default_factory=list)
    configs: list[str] = field(default_factory=list)

    def instances(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.instance, None)
        return list(seen)

    def common_instances(self) -> list[str]:
        """Instances run under every config and solved by at least one."""
        out = []
        for inst in self.instances():
            recs = {r.config: r for r in self.records if r.instance == inst}
            if all(c in recs for c in self.configs) and any(r.solved for r in recs.values()):
                out.append(inst)
        return out

    def summaries(self) -> list[ConfigSummary]:
        common = set(self.common_instances())
        out = []
        base_time = base_nodes = None
        for k, cfg in enumerate(self.configs):
            recs = [r for r in self.records if r.config == cfg and r.instance in common]
            if not recs:
                out.append(ConfigSummary(cfg, 0, float("nan"), None, None, None, float("nan"), None))
                continue
            t = shifted_geomean([r.time_s for r in recs], 1.0)
            nd = shifted_geomean([r.nodes for r in recs], 100.0)
            if k == 0:
                base_time, base_nodes = t, nd
            prop = shifted_geomean([r.prop_time_s for r in recs], 1.0) \
                if any(r.prop_time_s for r in recs) else None
            conf = shifted_geomean([r.conflict_time_s for r in recs], 1.0) \
                if any(r.conflict_time_s for r in recs) else None
            out.append(ConfigSummary(
                cfg, sum(r.solved for r in recs), t,
                None if k == 0 else _ratio(t, base_time), prop, conf, nd,
                None if k == 0 else _ratio(nd, base_nodes)))
        return out

    def table(self) -> str:
        lines = [f"{'Settings':<12}{'Solved':>7}{'Total':>10}{'(rel)':>8}{'CP':>9}{'DPA':>9}"
                 f"{'Nodes':>11}{'(rel)':>8}"]
        for s in self.summaries():
            lines.append(
                f"{LABELS.get(s.config, s.config):<12}{s.solved:>7}{s.time:>10.2f}"
                f"{_rel(s.time_rel):>8}{_opt(s.prop_time):>9}{_opt(s.conflict_time):>9}"
                f"{s.nodes:>11.1f}{_rel(s.nodes_rel):>8}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in self.records:
            row = asdict(r)
            for key in ("time_s", "prop_time_s", "conflict_time_s"):
                row[key] = f"{row[key]:.6f}"
            w.writerow(row)
        return buf.getvalue()


def _ratio(a: float, b: Optional[float]) -> Optional[float]:
    if b is None or b == 0:
        return None
    return a / b


def _rel(v: Optional[float]) -> str:
    return "---" if v is None else f"({v:.2f})"


def _opt(v: Optional[float]) -> str:
    return "---" if v is None else f"{v:.2f}"


def find_instances(path) -> list[Path]:
    p = Path(path)
    if p.is_file():
        return [p]
    return sorted(q for q in p.iterdir()
                  if q.is_file() and any(q.name.endswith(s) for s in INSTANCE_SUFFIXES))


def run_bench(instances: Iterable, configs: Sequence[str] = CONFIG_NAMES,
              node_limit: Optional[int] = None, time_limit: Optional[float] = None,
              seed: int = 0, progress=None) -> BenchReport:
    """Solve every instance under every config; failures become records, not exceptions."""
    report = BenchReport(configs=list(configs))
    for path in instances:
        path = Path(path)
        name = path.name
        try:
            raw = read_instance(path)
        except Exception as e:  # noqa: BLE001 - recorded per instance
            for cfg in configs:
                report.records.append(BenchRecord(name, cfg, "ERROR", 0.0, 0, 0.0, 0.0, 0, 0, 0,
                                                  error=str(e)))
            continue
        for cfg in configs:
            config = SolveConfig.preset(cfg, node_limit=node_limit, time_limit=time_limit, seed=seed)
            try:
                res = solve(raw, config)
            except Exception as e:  # noqa: BLE001
                rec = BenchRecord(name, cfg, "ERROR", 0.0, 0, 0.0, 0.0, 0, 0, 0, error=repr(e))
            else:
                st = res.stats
                rec = BenchRecord(name, cfg, res.status, st.total_time, st.nodes, st.prop_time,
                                  st.conflict_time, st.lp_solves, st.conflicts_created,
                                  st.conflicts_used,
                                  None if res.objective is None else str(res.objective))
            report.records.append(rec)
            if progress is not None:
                progress(rec)
    return report

