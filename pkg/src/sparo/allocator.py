"""Bottleneck analysis and greedy spending of a tile budget.

Each move adds either one magic-state factory (11 tiles) or one routing row
(``layout.routing_unit`` tiles). Gains are measured by recompiling the
candidate configuration; ``fast=True`` estimates them instead.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ErrorBreakdown, p_ppm
from .layout import FACTORY_AREA, LayoutInfeasible
from .pipeline import CompileResult, Compiler
from .routing import LayoutRouter, RoutingInfeasible
from .trace import ScheduleTrace

FACTORY = "Factory"
ROUTING = "RoutingRow"
NO_GAIN = -math.inf


def quantify(trace: ScheduleTrace, breakdown: ErrorBreakdown) -> dict:
    """Time and error per category plus the dominant bottleneck."""
    rec = {
        "T_waitT": trace.t_wait,
        "T_rotation": trace.t_rotation,
        "T_op": trace.t_op,
        "E_waitT": breakdown.E_waitT_total,
        "E_rotation": breakdown.E_rotation_total,
        "E_op": breakdown.E_op_total,
    }
    cats = [
        ("WaitT", rec["E_waitT"], rec["T_waitT"], 0),
        ("Rotation", rec["E_rotation"], rec["T_rotation"], 1),
        ("Op", rec["E_op"], rec["T_op"], 2),
    ]
    if all(e == 0 for _, e, _, _ in cats):
        rec["dominant"] = "none"
    else:
        rec["dominant"] = max(cats, key=lambda c: (c[1], c[2], -c[3]))[0]
    return rec


@dataclass
class Move:
    choice: str
    delta_p_L: float
    area_cost: int
    p_L: float
    n_factories: int
    routing_rows: int

    def to_json(self) -> dict:
        return {
            "choice": self.choice,
            "delta_p_L": self.delta_p_L,
            "area_cost": self.area_cost,
            "p_L_total": self.p_L,
            "n_factories": self.n_factories,
            "routing_rows": self.routing_rows,
        }


@dataclass
class AllocationState:
    n_qubits: int
    budget_total: int
    n_factories: int = 1
    routing_rows: int = 0
    budget_spent: int = 0
    trajectory: list[Move] = field(default_factory=list)

    @property
    def remaining(self) -> int:
        return self.budget_total - self.budget_spent

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_factories": self.n_factories,
            "routing_rows": self.routing_rows,
            "budget_total": self.budget_total,
            "budget_spent": self.budget_spent,
            "budget_unspent": self.remaining,
            "trajectory": [m.to_json() for m in self.trajectory],
        }


def _try(comp: Compiler, f: int, r: int) -> CompileResult | None:
    try:
        return comp.at(f, r)
    except (LayoutInfeasible, RoutingInfeasible):
        return None


def routing_unit(comp: Compiler) -> int:
    return comp.minimal.routing_unit


def marginal_gain(state: AllocationState, comp: Compiler) -> dict:
    """Error reduction per tile of one more factory and one more routing row."""
    cur = comp.at(state.n_factories, state.routing_rows).p_L
    out = {}
    for name, area, f, r in (
        ("gain_factory", FACTORY_AREA, state.n_factories + 1, state.routing_rows),
        ("gain_routing", routing_unit(comp), state.n_factories, state.routing_rows + 1),
    ):
        if area > state.remaining:
            out[name] = NO_GAIN
            continue
        res = _try(comp, f, r)
        out[name] = NO_GAIN if res is None else (cur - res.p_L) / area
    return out


def fast_gain(state: AllocationState, comp: Compiler, sample: float = 0.1, seed: int = 0) -> dict:
    """Estimated gains without recompiling.

    A factory scales the current WaitT error by N_F / (N_F + 1). A routing row
    is scored by re-routing a sample of the PPMs on the larger layout and
    extrapolating the change in their error.
    """
    base = comp.at(state.n_factories, state.routing_rows)
    out = {}
    if FACTORY_AREA > state.remaining or state.n_factories + 1 > len(comp.minimal.band_rows):
        out["gain_factory"] = NO_GAIN
    else:
        f = state.n_factories
        out["gain_factory"] = base.breakdown.E_waitT_total / (f + 1) / FACTORY_AREA
    unit = routing_unit(comp)
    if unit > state.remaining:
        out["gain_routing"] = NO_GAIN
        return out
    ops = [o for s in base.trace.steps for o in s.ops if o.terminals]
    if not ops:
        out["gain_routing"] = 0.0
        return out
    rng = np.random.default_rng(seed)
    k = min(len(ops), max(1, int(round(sample * len(ops)))))
    picks = rng.choice(len(ops), size=k, replace=False)
    router = LayoutRouter(comp.layout(state.n_factories, state.routing_rows + 1))
    saved = 0.0
    for i in picks:
        o = ops[int(i)]
        try:
            ell = min(o.ell, router.route(list(o.terminals)).length)
        except RoutingInfeasible:
            continue
        saved += p_ppm(comp.errors, o.ell, o.is_y) - p_ppm(comp.errors, ell, o.is_y)
    out["gain_routing"] = saved * len(ops) / k / unit
    return out


def allocate(
    comp: Compiler, budget: int, fast: bool = False
) -> tuple[AllocationState, CompileResult]:
    if budget < 0:
        raise ValueError("budget must be non-negative")
    state = AllocationState(comp.n_qubits, budget)
    current = comp.at(1, 0)
    while True:
        gains = fast_gain(state, comp) if fast else marginal_gain(state, comp)
        gf, gr = gains["gain_factory"], gains["gain_routing"]
        if max(gf, gr) <= 0:
            break
        if gf >= gr:
            choice, area, f, r = FACTORY, FACTORY_AREA, state.n_factories + 1, state.routing_rows
        else:
            choice, area, f, r = ROUTING, routing_unit(comp), state.n_factories, state.routing_rows + 1
        res = _try(comp, f, r)
        if res is None or res.p_L >= current.p_L:
            # only reachable with estimated gains; greedy never accepts a worse move
            break
        state.trajectory.append(Move(choice, current.p_L - res.p_L, area, res.p_L, f, r))
        state.n_factories, state.routing_rows = f, r
        state.budget_spent += area
        current = res
    return state, current


def single_axis(comp: Compiler, budget: int, axis: str) -> CompileResult:
    """Spend the whole budget on one axis (as far as the layout allows)."""
    if axis == FACTORY:
        f = 1 + budget // FACTORY_AREA
        while f > 1:
            res = _try(comp, f, 0)
            if res is not None:
                return res
            f -= 1
        return comp.at(1, 0)
    return comp.at(1, budget // routing_unit(comp))


def enumerate_best(comp: Compiler, budget: int) -> CompileResult:
    """Exhaustive optimum over every affordable (factories, rows) pair."""
    unit = routing_unit(comp)
    best = comp.at(1, 0)
    for df in range(budget // FACTORY_AREA + 1):
        for dr in range((budget - df * FACTORY_AREA) // unit + 1):
            res = _try(comp, 1 + df, dr)
            if res is not None and res.p_L < best.p_L:
                best = res
    return best


@dataclass
class SweepResult:
    factory_pcts: list[float]
    routing_pcts: list[float]
    grid: list[list[float | None]]  # [i_factory][j_routing] relative p_L
    configs: list[list[tuple[int, int] | None]]
    baseline_p_L: float
    minimal_tiles: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["extra_factory_pct", "extra_routing_pct", "relative_error"])
        for i, fp in enumerate(self.factory_pcts):
            for j, rp in enumerate(self.routing_pcts):
                v = self.grid[i][j]
                w.writerow([f"{fp:g}", f"{rp:g}", "" if v is None else repr(v)])
        return buf.getvalue()


def sweep(comp: Compiler, max_extra_pct: float, step: float, jobs: int = 1) -> SweepResult:
    """Relative p_L over a grid of extra factory / routing area (percent of minimal)."""
    if max_extra_pct <= 0 or step <= 0:
        raise ValueError("max_extra_pct and step must be positive")
    n = int(round(max_extra_pct / step))
    pcts = [round(k * step, 10) for k in range(n + 1)]
    minimal_tiles = comp.minimal.total_tiles
    unit = routing_unit(comp)

    def cfg(pf: float, pr: float) -> tuple[int, int]:
        df = int(math.floor(pf / 100 * minimal_tiles / FACTORY_AREA + 1e-9))
        dr = int(math.floor(pr / 100 * minimal_tiles / unit + 1e-9))
        return 1 + df, dr

    configs = [[cfg(pf, pr) for pr in pcts] for pf in pcts]
    base = comp.at(1, 0).p_L
    if jobs > 1:
        # plans below each point are shared, so warm the memo along the axes first
        with ThreadPoolExecutor(jobs) as pool:
            list(pool.map(lambda c: _try(comp, *c), sorted({c for row in configs for c in row})))
    grid: list[list[float | None]] = []
    for i, row in enumerate(configs):
        vals = []
        for c in row:
            res = _try(comp, *c)
            if res is None:
                vals.append(None)
            elif base > 0:
                vals.append(res.p_L / base)
            else:
                vals.append(1.0)
        grid.append(vals)
    feasible = [[c if grid[i][j] is not None else None for j, c in enumerate(row)] for i, row in enumerate(configs)]
    return SweepResult(pcts, pcts, grid, feasible, base, minimal_tiles)
