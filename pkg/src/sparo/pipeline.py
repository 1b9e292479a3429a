"""End-to-end compilation: place, plan, retime, accumulate error.

``Compiler`` memoizes one result per (factories, extra routing rows). A
configuration's plan is the best of its own native plan and the plans
chosen for the configurations one factory or one routing row smaller, all
replayed with the current factory count. The smaller layouts embed into the
larger one tile for tile, so their plans stay valid, and the choice keeps
the error rate and the time totals monotone as resources are added.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import ErrorBreakdown, ErrorModelParams, accumulate, log_survival
from .layout import Layout, build_layout
from .mapping import AnnealParams, QubitMap, place
from .scheduler import FactoryParams, SchedulerParams, SpatialPlan, plan_schedule, retime
from .trace import ScheduleTrace
from .transpile import PbcProgram


@dataclass
class CompileResult:
    n_factories: int
    routing_rows: int
    layout: Layout
    qmap: QubitMap
    plan: SpatialPlan
    trace: ScheduleTrace
    breakdown: ErrorBreakdown
    origin: str = "native"
    monotone: bool = True
    seconds: float = 0.0

    @property
    def p_L(self) -> float:
        return self.breakdown.p_L_total

    @property
    def t_rotation_op(self) -> int:
        return self.trace.t_rotation + self.trace.t_op

    def summary(self) -> dict:
        return {
            "n_factories": self.n_factories,
            "routing_rows": self.routing_rows,
            "total_tiles": self.layout.total_tiles,
            "p_L_total": self.p_L,
            **self.trace.totals(),
            "origin": self.origin,
        }


@dataclass
class Compiler:
    program: PbcProgram
    errors: ErrorModelParams = field(default_factory=ErrorModelParams)
    factory: FactoryParams = field(default_factory=FactoryParams)
    scheduler: SchedulerParams = field(default_factory=SchedulerParams)
    anneal: AnnealParams = field(default_factory=AnnealParams)
    routing_cols: int = 0
    portfolio: bool = True
    qmap: QubitMap | None = None

    def __post_init__(self) -> None:
        self._native: dict[tuple[int, int], SpatialPlan] = {}
        self._chosen: dict[tuple[int, int], CompileResult] = {}
        self._layouts: dict[tuple[int, int], Layout] = {}
        self.map_seconds = 0.0
        if self.qmap is None:
            t0 = time.perf_counter()
            self.qmap = place(self.program, self.layout(1, 0), self.anneal)
            self.map_seconds = time.perf_counter() - t0

    @property
    def n_qubits(self) -> int:
        return self.program.n_qubits

    def layout(self, n_factories: int, routing_rows: int) -> Layout:
        key = (n_factories, routing_rows)
        if key not in self._layouts:
            self._layouts[key] = build_layout(
                self.n_qubits, n_factories, routing_rows, self.routing_cols, self.errors.d
            )
        return self._layouts[key]

    @property
    def minimal(self) -> Layout:
        return self.layout(1, 0)

    def native_plan(self, n_factories: int, routing_rows: int) -> SpatialPlan:
        key = (n_factories, routing_rows)
        if key not in self._native:
            lay = self.layout(n_factories, routing_rows)
            self._native[key] = plan_schedule(
                self.program, lay, self.qmap.slot_of, self.scheduler, self.factory
            )
        return self._native[key]

    def evaluate(self, plan: SpatialPlan, n_factories: int) -> tuple[ScheduleTrace, ErrorBreakdown]:
        trace = retime(plan, n_factories, self.factory)
        return trace, accumulate(trace, self.errors)

    def at(self, n_factories: int, routing_rows: int = 0) -> CompileResult:
        key = (n_factories, routing_rows)
        if key in self._chosen:
            return self._chosen[key]
        t0 = time.perf_counter()
        lay = self.layout(n_factories, routing_rows)
        candidates = [("native", self.native_plan(n_factories, routing_rows))]
        preds: list[tuple[str, CompileResult]] = []
        if self.portfolio:
            if n_factories > 1:
                preds.append(("factory", self.at(n_factories - 1, routing_rows)))
            if routing_rows > 0:
                preds.append(("routing", self.at(n_factories, routing_rows - 1)))
        for axis, pr in preds:
            candidates.append((f"from F={pr.n_factories},R={pr.routing_rows}", pr.plan))

        scored = []
        for i, (origin, plan) in enumerate(candidates):
            trace, bd = self.evaluate(plan, n_factories)
            ok = True
            for axis, pr in preds:
                ok &= bd.p_L_total <= pr.p_L
                if axis == "factory":
                    ok &= trace.t_wait <= pr.trace.t_wait
                else:
                    ok &= trace.t_rotation + trace.t_op <= pr.t_rotation_op
            rank = (bd.p_L_total, log_survival(trace, self.errors), trace.makespan, i)
            scored.append((not ok, rank, origin, plan, trace, bd))
        scored.sort(key=lambda s: (s[0], s[1]))
        bad, _, origin, plan, trace, bd = scored[0]
        res = CompileResult(
            n_factories,
            routing_rows,
            lay,
            self.qmap,
            plan,
            trace,
            bd,
            origin=origin,
            monotone=not bad,
            seconds=time.perf_counter() - t0,
        )
        self._chosen[key] = res
        return res


def compile_program(
    program: PbcProgram,
    n_factories: int = 1,
    routing_rows: int = 0,
    errors: ErrorModelParams | None = None,
    factory: FactoryParams | None = None,
    scheduler: SchedulerParams | None = None,
    anneal: AnnealParams | None = None,
    portfolio: bool = True,
) -> CompileResult:
    comp = Compiler(
        program,
        errors or ErrorModelParams(),
        factory or FactoryParams(),
        scheduler or SchedulerParams(),
        anneal or AnnealParams(),
        portfolio=portfolio,
    )
    return comp.at(n_factories, routing_rows)
