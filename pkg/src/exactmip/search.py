"""Best-first branch and bound with safe propagation and dual-proof conflicts.

Every node is rebuilt from the global box: the node's branching path is
re-applied, then model rows, pool rows and the objective cutoff are
propagated. Nodes that survive are solved exactly as LPs. Infeasible LPs and
LPs whose bound exceeds the incumbent feed dual-proof analysis, whose rows
enter the conflict pool and take part in propagation at later nodes.

With a certificate builder attached, each closed node gets a line that is
absurd or bounds the objective, and sibling lines are merged upwards with
unsplitting until the root line proves the final claim.
"""
from __future__ import annotations

import heapq
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .certificate.emit import CertificateBuilder
from .certificate.format import Certificate
from .conflict import (
    ACCEPTED, BOUND_EXCEEDING, FARKAS, GLOBALLY_INFEASIBLE, ConflictPool, aggregate_safe,
    pool_age_and_evict, pool_insert,
)
from .lp import INFEASIBLE as LP_INFEASIBLE, UNBOUNDED as LP_UNBOUNDED, degrade_duals, solve_lp
from .model import INF, LOWER, UPPER, LocalBounds, Problem, RawProblem, Row, canonicalize
from .propagation import ActivityState, propagate_fixpoint

OPTIMAL, INFEASIBLE, UNBOUNDED, LIMIT = "OPTIMAL", "INFEASIBLE", "UNBOUNDED", "LIMIT"


@dataclass
class SolveConfig:
    enable_propagation: bool = True
    enable_dual_proofs: bool = True
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    certify: bool = False
    certificate_path: Optional[str] = None
    seed: int = 0
    dual_noise: float = 1e-9  # relative perturbation of the LP duals before aggregation
    round_limit: int = 10
    root_round_limit: int = 1000
    pool_capacity: int = 100
    pool_age_limit: int = 20
    limit_denominator: Optional[int] = None
    keep_conflicts: bool = False  # return every pooled conflict row in the result
    name: str = ""

    @classmethod
    def preset(cls, name: str, **kw) -> "SolveConfig":
        flags = {
            "baseline": (False, False),
            "cp": (True, False),
            "cp+dpa": (True, True),
        }
        if name not in flags:
            raise ValueError(f"unknown configuration {name!r}; expected one of {sorted(flags)}")
        prop, dpa = flags[name]
        return cls(enable_propagation=prop, enable_dual_proofs=dpa, name=name, **kw)


CONFIG_NAMES = ("baseline", "cp", "cp+dpa")


@dataclass
class SolveStats:
    nodes: int = 0
    lp_solves: int = 0
    prop_rounds: int = 0
    bound_changes: int = 0
    prop_pruned: int = 0
    conflicts_created: int = 0
    conflicts_used: int = 0
    total_time: float = 0.0
    prop_time: float = 0.0
    conflict_time: float = 0.0
    lp_time: float = 0.0


@dataclass
class SolveResult:
    status: str
    objective: Optional[Fraction] = None  # in the original objective sense
    x: Optional[list[Fraction]] = None
    dual_bound: object = None  # in the original objective sense; may be +-inf
    stats: SolveStats = field(default_factory=SolveStats)
    certificate: Optional[Certificate] = None
    conflicts: list = field(default_factory=list)


@dataclass
class Node:
    id: int
    depth: int
    bound: object
    path: tuple = ()  # ((var, side, value, asm_line), ...)
    parent: Optional["Node"] = None
    which: int = 0  # 0: down child, 1: up child
    asm: Optional[int] = None
    lp_line: Optional[int] = None
    line: Optional[int] = None
    child_lines: list = field(default_factory=lambda: [None, None])


def select_branch_var(x, is_int) -> Optional[int]:
    """Fractional integer variable whose fractional part is closest to 1/2."""
    best, best_dist = None, None
    half = Fraction(1, 2)
    for i, (xi, integral) in enumerate(zip(x, is_int)):
        if not integral or xi.denominator == 1:
            continue
        dist = abs(xi - math.floor(xi) - half)
        if best is None or dist < best_dist:
            best, best_dist = i, dist
    return best


class _Search:
    def __init__(self, problem: Problem, config: SolveConfig):
        self.problem = problem
        self.config = config
        self.stats = SolveStats()
        self.cert = CertificateBuilder(problem) if (config.certify or config.certificate_path) else None
        lb_line = self.cert.lb_line if self.cert else None
        ub_line = self.cert.ub_line if self.cert else None
        self.bounds = LocalBounds.from_problem(problem, lb_line, ub_line)
        self.rows = problem.rows
        self.m = len(self.rows)
        self.prop_rows: dict[int, Row] = {r.id: r for r in self.rows}
        self.state = ActivityState(self.bounds, self.rows) if config.enable_propagation else None
        self.pool = ConflictPool(config.pool_capacity, config.pool_age_limit)
        self.rng = random.Random(config.seed)
        self.incumbent: Optional[Fraction] = None
        self.inc_x: Optional[list[Fraction]] = None
        self.cutoff_line: Optional[int] = None
        self.root_line: Optional[int] = None
        self.unbounded = False
        self.dual_bound: object = -INF
        self.next_id = 0
        self.created: list = []

    # -- tree proof ------------------------------------------------------------

    def close(self, node: Node, line: Optional[int]) -> None:
        if self.cert is None:
            return
        node.line = line
        while node.parent is not None:
            p = node.parent
            p.child_lines[node.which] = (node.line, node.asm)
            if p.child_lines[0] is None or p.child_lines[1] is None:
                return
            (l1, a1), (l2, a2) = p.child_lines
            p.line = self.cert.log_unsplit(l1, a1, l2, a2)
            node = p
        self.root_line = node.line

    # -- pool ------------------------------------------------------------------

    def _pool_row_id(self, conflict) -> int:
        return self.m + 1 + conflict.id

    def _drop_pool_rows(self, rows) -> None:
        for cr in rows:
            rid = self._pool_row_id(cr)
            self.prop_rows.pop(rid, None)
            if self.state is not None and rid in self.state.rows:
                self.state.remove_row(rid)

    def analyze(self, y, mode: str) -> None:
        t0 = time.perf_counter()
        yf = degrade_duals(y, self.config.dual_noise, self.rng.randrange(2**32))
        glb, gub = self.bounds.global_lb, self.bounds.global_ub
        if mode == FARKAS:
            cr = aggregate_safe(yf, self.rows, glb, gub, FARKAS)
        else:
            cr = aggregate_safe(yf, self.rows, glb, gub, BOUND_EXCEEDING,
                                c=self.problem.c, cutoff=self.incumbent)
        if cr is not None:
            evicted: list = []
            status = pool_insert(self.pool, cr, self.problem.n, glb, gub, evicted)
            self._drop_pool_rows(evicted)
            if status in (ACCEPTED, GLOBALLY_INFEASIBLE):
                self.stats.conflicts_created += 1
                if self.config.keep_conflicts:
                    self.created.append(cr)
                if self.cert is not None:
                    cr.cert_line = self.cert.log_weak_conflict(cr, self.rows, self.cutoff_line)
                row = cr.to_row(self._pool_row_id(cr))
                self.prop_rows[row.id] = row
                if self.state is not None:
                    self.state.add_row(row)
        self.stats.conflict_time += time.perf_counter() - t0

    # -- incumbent -------------------------------------------------------------

    def update_incumbent(self, x: list[Fraction], value: Fraction) -> None:
        self.incumbent = value
        self.inc_x = list(x)
        if self.cert is not None:
            self.cutoff_line = self.cert.log_solution(x)
        c = self.problem.c
        if not any(c):
            return
        row = Row(self.m, [(i, -ci) for i, ci in enumerate(c) if ci], -value, origin="cutoff",
                  cert_line=self.cutoff_line, cert_mult=-1)
        if self.state is not None and self.m in self.state.rows:
            self.state.remove_row(self.m)
        self.prop_rows[self.m] = row
        if self.state is not None:
            self.state.add_row(row)

    # -- nodes -----------------------------------------------------------------

    def process_node(self, node: Node) -> list[Node]:
        b = self.bounds
        cert = self.cert
        b.undo_to(0)
        b.push()
        for var, side, value, line in node.path:
            cur = b.lb[var] if side == LOWER else b.ub[var]
            if (side == LOWER and value > cur) or (side == UPPER and value < cur):
                b.apply(var, side, value, line=line, reason="branch")
                if b.lb[var] > b.ub[var]:
                    self.close(node, cert.log_crossing(var, b) if cert else None)
                    return []
        if self.state is not None:
            t0 = time.perf_counter()
            self.state.dirty = set(self.prop_rows)
            limit = self.config.root_round_limit if node.depth == 1 else self.config.round_limit
            res = propagate_fixpoint(self.prop_rows, b, self.state, limit, cert,
                                     self.config.limit_denominator)
            self.stats.prop_time += time.perf_counter() - t0
            self.stats.prop_rounds += res.rounds
            self.stats.bound_changes += len(res.changes)
            used = [rid - self.m - 1 for rid in res.useful_rows if rid > self.m]
            self.stats.conflicts_used += len(used)
            self._useful_pool = used
            if res.infeasible:
                self.stats.prop_pruned += 1
                line = None
                if cert is not None:
                    if res.infeasible_row is not None:
                        line = cert.log_row_infeasible(self.prop_rows[res.infeasible_row], b)
                    else:
                        line = cert.log_crossing(res.crossed_var, b)
                self.close(node, line)
                return []
        t0 = time.perf_counter()
        out = solve_lp(self.rows, self.problem.c, b)
        self.stats.lp_time += time.perf_counter() - t0
        self.stats.lp_solves += 1
        if out.status == LP_INFEASIBLE:
            line = cert.log_farkas(self.rows, out, b) if cert else None
            if self.config.enable_dual_proofs:
                self.analyze(out.y, FARKAS)
            self.close(node, line)
            return []
        if out.status == LP_UNBOUNDED:
            self.unbounded = True
            return []
        z = out.value
        node.lp_line = cert.log_lp_bound(self.rows, out, b) if cert else None
        if self.incumbent is not None and z >= self.incumbent:
            if self.config.enable_dual_proofs and z > self.incumbent:
                self.analyze(out.y, BOUND_EXCEEDING)
            self.close(node, node.lp_line)
            return []
        k = select_branch_var(out.x, self.problem.is_int)
        if k is None:
            self.update_incumbent(out.x, z)
            self.close(node, node.lp_line)
            return []
        down = Fraction(math.floor(out.x[k]))
        children = []
        for which, (side, value) in enumerate(((UPPER, down), (LOWER, down + 1))):
            asm = cert.log_assumption(k, side, value) if cert else None
            self.next_id += 1
            children.append(Node(self.next_id, node.depth + 1, z,
                                 node.path + ((k, side, value, asm),), node, which, asm))
        return children

    def run(self) -> SolveResult:
        cfg = self.config
        problem = self.problem
        start = time.perf_counter()
        cert = self.cert
        if problem.infeasible_var is not None:
            if cert is not None:
                self.root_line = cert.log_crossing(problem.infeasible_var, self.bounds)
                cert.set_infeasible()
            return self._finish(INFEASIBLE, start)
        self.bounds.push()
        heap: list = []
        root = Node(0, 1, -INF)
        heapq.heappush(heap, (root.bound, root.depth, root.id, root))
        limited = False
        while heap:
            if cfg.node_limit is not None and self.stats.nodes >= cfg.node_limit:
                limited = True
                break
            if cfg.time_limit is not None and time.perf_counter() - start > cfg.time_limit:
                limited = True
                break
            _, _, _, node = heapq.heappop(heap)
            if self.incumbent is not None and node.bound >= self.incumbent:
                self.close(node, node.parent.lp_line if node.parent else None)
                continue
            self.stats.nodes += 1
            self._useful_pool = []
            children = self.process_node(node)
            if self.unbounded:
                return self._finish(UNBOUNDED, start)
            evicted: list = []
            pool_age_and_evict(self.pool, self._useful_pool, evicted)
            self._drop_pool_rows(evicted)
            for ch in children:
                heapq.heappush(heap, (ch.bound, ch.depth, ch.id, ch))
        if limited:
            open_bounds = [entry[0] for entry in heap]
            self.dual_bound = min(open_bounds) if open_bounds else INF
            if self.incumbent is not None:
                self.dual_bound = min(self.dual_bound, self.incumbent)
            if cert is not None:
                cert.set_range(-INF, self.incumbent if self.incumbent is not None else INF)
            return self._finish(LIMIT, start)
        if self.incumbent is None:
            if cert is not None:
                cert.set_infeasible()
            return self._finish(INFEASIBLE, start)
        if cert is not None:
            cert.set_range(self.incumbent, self.incumbent)
        return self._finish(OPTIMAL, start)

    def _finish(self, status: str, start: float) -> SolveResult:
        self.bounds.undo_to(0)
        self.stats.total_time = time.perf_counter() - start
        res = SolveResult(status, stats=self.stats, conflicts=self.created)
        if status == OPTIMAL:
            bound = self.incumbent
        elif status == INFEASIBLE:
            bound = INF
        elif status == UNBOUNDED:
            bound = -INF
        else:
            bound = self.dual_bound
        res.dual_bound = bound * self.problem.obj_sign
        if self.incumbent is not None and status in (OPTIMAL, LIMIT):
            res.objective = self.problem.obj_sign * self.incumbent
            res.x = list(self.inc_x)
        if self.cert is not None and status != UNBOUNDED:
            res.certificate = self.cert.certificate()
            if self.config.certificate_path:
                self.cert.write(self.config.certificate_path)
        return res


def solve(problem: Union[Problem, RawProblem], config: Optional[SolveConfig] = None) -> SolveResult:
    if isinstance(problem, RawProblem):
        problem = canonicalize(problem)
    return _Search(problem, config or SolveConfig()).run()
