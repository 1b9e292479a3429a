"""Discrete-time scheduling of a PBC program on a layout.

Scheduling happens in two passes. ``plan`` decides the spatial side: the
order of operations, patch rotations, ancilla trees, factory ports and
which operations share a time step. ``retime`` then replays that plan
against the magic-state supply and inserts WaitT stalls. Keeping the passes
apart lets a plan built for fewer factories be replayed with more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .layout import Coord, Layout
from .pauli import PauliString
from .routing import AncillaPath, LayoutRouter, RoutingInfeasible
from .trace import (
    CAT_MEASURE,
    CAT_OP,
    CAT_ROTATION,
    CAT_WAIT,
    PPM,
    ROTATION,
    TERMINAL,
    Y_GADGET,
    OpRecord,
    ScheduleTrace,
    Step,
)
from .transpile import PbcProgram

EXACT_COLOR_MAX = 10
EXACT_ORDER_MAX = 8


@dataclass(frozen=True)
class FactoryParams:
    cycles_per_state: int = 11
    success_prob: float = 1.0
    output_error: float = 0.0

    def __post_init__(self) -> None:
        if self.cycles_per_state < 1:
            raise ValueError("cycles_per_state must be >= 1")
        if not 0.0 < self.success_prob <= 1.0:
            raise ValueError("success_prob must lie in (0, 1]")
        if not 0.0 <= self.output_error <= 1.0:
            raise ValueError("output_error must lie in [0, 1]")


class FactoryState:
    """Identical factories producing from t = 0 into one unbounded buffer.

    Factory output ``j`` (1-based) is consumable from step
    ``ceil(j * cycles / success_prob) - 1``; a low success probability
    stretches the interval to its expected value.
    """

    def __init__(self, n_factories: int, params: FactoryParams = FactoryParams()) -> None:
        if n_factories < 1:
            raise ValueError("need at least one factory")
        self.n_factories = n_factories
        self.params = params
        self.consumed = 0

    def nth_ready(self, j: int) -> int:
        interval = self.params.cycles_per_state / self.params.success_prob
        return math.ceil(j * interval - 1e-9) - 1

    def ready_time(self, k: int) -> int:
        """Earliest step at which ``k`` states in total have been produced."""
        if k <= 0:
            return 0
        return self.nth_ready(math.ceil(k / self.n_factories))

    def produced_by(self, t: int) -> int:
        interval = self.params.cycles_per_state / self.params.success_prob
        per = math.floor((t + 1) / interval + 1e-9)
        return per * self.n_factories

    def available(self, t: int) -> int:
        return self.produced_by(t) - self.consumed

    def consume(self, k: int, t: int) -> None:
        if self.available(t) < k:
            raise ValueError(f"only {self.available(t)} states available at t={t}, need {k}")
        self.consumed += k


@dataclass(frozen=True)
class SchedulerParams:
    rotation_steps: int = 2
    y_extra_steps: int = 1
    move_tiles: int = 2
    slack: int = 2
    detour: int = 2  # extra tiles a reroute may spend to share a step


# ---------------------------------------------------------------- conflicts


@dataclass(frozen=True)
class RoutedOp:
    index: int  # position in the segment
    op: PauliString
    qubits: frozenset
    path: AncillaPath
    magic: bool
    port: Coord | None
    is_y: bool
    source: int

    @property
    def nodes(self) -> frozenset:
        return self.path.nodes


def build_conflict_graph(ops: list[RoutedOp]) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in ops]
    for i, a in enumerate(ops):
        for j in range(i + 1, len(ops)):
            b = ops[j]
            clash = (
                bool(a.qubits & b.qubits)
                or bool(a.nodes & b.nodes)
                or (a.port is not None and a.port == b.port)
            )
            if clash:
                adj[i].add(j)
                adj[j].add(i)
    return adj


def _greedy_colors(adj: list[set[int]]) -> list[int]:
    order = sorted(range(len(adj)), key=lambda v: (-len(adj[v]), v))
    color = [-1] * len(adj)
    for v in order:
        used = {color[u] for u in adj[v] if color[u] >= 0}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    return color


def _k_colorable(adj: list[set[int]], k: int) -> list[int] | None:
    n = len(adj)
    order = sorted(range(n), key=lambda v: (-len(adj[v]), v))
    color = [-1] * n

    def go(i: int) -> bool:
        if i == n:
            return True
        v = order[i]
        used = {color[u] for u in adj[v] if color[u] >= 0}
        top = max(color) + 1  # symmetry: never open more than one new color
        for c in range(min(k, top + 1)):
            if c not in used:
                color[v] = c
                if go(i + 1):
                    return True
                color[v] = -1
        return False

    return list(color) if go(0) else None


def color_layer(adj: list[set[int]]) -> list[int]:
    """Step index per node: exact minimum on small graphs, largest-degree-first above."""
    if not adj:
        return []
    greedy = _greedy_colors(adj)
    if len(adj) > EXACT_COLOR_MAX:
        return greedy
    best = max(greedy) + 1
    for k in range(1, best):
        found = _k_colorable(adj, k)
        if found is not None:
            return found
    return greedy


# ------------------------------------------------------------- orientation


def orientation_demands(op: PauliString, router: LayoutRouter, slot_of) -> dict[int, str]:
    """Orientation each qubit must have for ``op`` (qubits that can expose both are omitted)."""
    out = {}
    for q in op.qubits():
        letter = op.letter(q)
        if letter == "Y":
            continue
        slot = slot_of(q)
        if router.has_group(slot, "SN") and router.has_group(slot, "WE"):
            continue
        # only the north/south pair touches routing: that pair must show the letter
        out[q] = letter if router.has_group(slot, "SN") else ("X" if letter == "Z" else "Z")
    return out


def count_flips(order: list[int], demands: list[dict[int, str]], orientation: dict[int, str]) -> int:
    cur = dict(orientation)
    flips = 0
    for i in order:
        for q, o in demands[i].items():
            if cur.get(q, "Z") != o:
                flips += 1
                cur[q] = o
    return flips


def _exact_order(demands: list[dict[int, str]], orientation: dict[int, str]) -> list[int]:
    k = len(demands)
    qubits = sorted({q for d in demands for q in d})
    start = tuple(orientation.get(q, "Z") for q in qubits)
    pos = {q: i for i, q in enumerate(qubits)}
    # state -> (cost, order)
    frontier: dict[tuple[int, tuple], tuple[int, tuple[int, ...]]] = {(0, start): (0, ())}
    for _ in range(k):
        nxt: dict[tuple[int, tuple], tuple[int, tuple[int, ...]]] = {}
        for (mask, orient), (cost, order) in frontier.items():
            for i in range(k):
                if mask >> i & 1:
                    continue
                o = list(orient)
                c = cost
                for q, want in demands[i].items():
                    if o[pos[q]] != want:
                        o[pos[q]] = want
                        c += 1
                key = (mask | 1 << i, tuple(o))
                cand = (c, order + (i,))
                if key not in nxt or cand < nxt[key]:
                    nxt[key] = cand
        frontier = nxt
    return list(min(frontier.values())[1])


def _greedy_order(demands: list[dict[int, str]], orientation: dict[int, str]) -> list[int]:
    cur = dict(orientation)
    left = list(range(len(demands)))
    out = []
    while left:
        best = min(left, key=lambda i: (sum(cur.get(q, "Z") != o for q, o in demands[i].items()), i))
        left.remove(best)
        out.append(best)
        cur.update(demands[best])
    return out


def order_for_rotations(
    demands: list[dict[int, str]], orientation: dict[int, str]
) -> tuple[list[int], int]:
    """Order commuting ops to minimise patch rotations; never worse than the given order."""
    identity = list(range(len(demands)))
    base = count_flips(identity, demands, orientation)
    if base == 0:
        return identity, 0
    if len(demands) <= EXACT_ORDER_MAX:
        order = _exact_order(demands, orientation)
    else:
        order = _greedy_order(demands, orientation)
    flips = count_flips(order, demands, orientation)
    if flips < base:
        return order, flips
    return identity, base


def split_segments(
    order: list[int], demands: list[dict[int, str]]
) -> list[tuple[list[int], dict[int, str]]]:
    """Cut the ordered ops wherever a qubit's required orientation changes."""
    segments: list[tuple[list[int], dict[int, str]]] = []
    cur: list[int] = []
    req: dict[int, str] = {}
    for i in order:
        if any(req.get(q, o) != o for q, o in demands[i].items()):
            segments.append((cur, req))
            cur, req = [], {}
        cur.append(i)
        req.update(demands[i])
    if cur:
        segments.append((cur, req))
    return segments


# -------------------------------------------------------------- planning


@dataclass
class PlanStep:
    category: str
    duration: int
    ops: tuple[OpRecord, ...]

    @property
    def magic(self) -> int:
        return sum(o.magic for o in self.ops)


@dataclass
class SpatialPlan:
    n_qubits: int
    steps: list[PlanStep] = field(default_factory=list)
    rotations: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def t_rotation_op(self) -> int:
        return sum(s.duration for s in self.steps if s.category in (CAT_OP, CAT_ROTATION))


@dataclass(frozen=True)
class _Pending:
    op: PauliString
    magic: bool
    source: int


class Planner:
    def __init__(
        self,
        layout: Layout,
        slot_of: tuple[int, ...],
        params: SchedulerParams = SchedulerParams(),
        factory: FactoryParams = FactoryParams(),
    ) -> None:
        self.layout = layout
        self.slot_index = slot_of
        self.params = params
        self.factory = factory
        self.router = LayoutRouter(layout)
        self.all_ids = set(range(len(self.router.graph)))

    def slot(self, q: int) -> Coord:
        return self.layout.slots[self.slot_index[q]]

    # ----------------------------------------------------------- routing

    def ports_by_distance(self, op: PauliString) -> list[Coord]:
        slots = [self.slot(q) for q in op.qubits()]

        def dist(p: Coord) -> int:
            return min(abs(p[0] - s[0]) + abs(p[1] - s[1]) for s in slots)

        return sorted(self.layout.ports, key=lambda p: (dist(p), p))

    def _route(self, pend: _Pending, orientation, port, avoid: frozenset | None = None) -> AncillaPath:
        terms = self.router.terminals(pend.op, self.slot, orientation, port)
        allowed = None
        if avoid:
            idx = self.router.graph.index
            allowed = self.all_ids - {idx[c] for c in avoid}
        try:
            return self.router.route(terms, allowed, self.params.slack)
        except RoutingInfeasible as exc:
            if avoid:
                raise
            raise RoutingInfeasible(f"cannot route {pend.op} (source {pend.source}): {exc}") from exc

    def _record(self, r: RoutedOp, terminal: bool) -> OpRecord:
        kind = TERMINAL if terminal else (Y_GADGET if r.is_y else PPM)
        return OpRecord(
            kind=kind,
            qubits=tuple(sorted(r.qubits)),
            ell=r.path.length,
            tiles=frozenset(n for n in r.path.nodes if len(n) == 2),
            magic=r.magic,
            is_y=r.is_y,
            port=r.port,
            source=r.source,
            extra_error=self.factory.output_error if r.magic else 0.0,
            terminals=tuple(r.path.terminals),
        )

    # ------------------------------------------------------ step packing

    def _by_coloring(self, pending: list[_Pending], orientation) -> list[list[RoutedOp]]:
        routed = []
        for i, pend in enumerate(pending):
            port = self.ports_by_distance(pend.op)[0] if pend.magic else None
            routed.append(self._routed(i, pend, orientation, port))
        colors = color_layer(build_conflict_graph(routed))
        groups: dict[int, list[RoutedOp]] = {}
        for r, c in zip(routed, colors):
            groups.setdefault(c, []).append(r)
        return [groups[c] for c in sorted(groups)]

    def _routed(self, i, pend, orientation, port, path=None) -> RoutedOp:
        if path is None:
            path = self._route(pend, orientation, port)
        return RoutedOp(
            index=i,
            op=pend.op,
            qubits=frozenset(pend.op.qubits()),
            path=path,
            magic=pend.magic,
            port=port,
            is_y=any(pend.op.letter(q) == "Y" for q in pend.op.qubits()),
            source=pend.source,
        )

    def _first_fit(self, pending: list[_Pending], orientation) -> list[list[RoutedOp]]:
        steps: list[list[RoutedOp]] = []
        used: list[tuple[set, set, set]] = []  # qubits, nodes, ports
        shortest: dict[tuple[int, Coord | None], AncillaPath] = {}
        for i, pend in enumerate(pending):
            qs = set(pend.op.qubits())
            ports = self.ports_by_distance(pend.op) if pend.magic else [None]
            placed = False
            for s, (uq, un, up) in enumerate(used):
                if uq & qs:
                    continue
                for port in ports:
                    if port in up:
                        continue
                    key = (i, port)
                    if key not in shortest:
                        shortest[key] = self._route(pend, orientation, port)
                    base = shortest[key]
                    path = None
                    if not (base.nodes & un):
                        path = base
                    else:
                        try:
                            alt = self._route(pend, orientation, port, frozenset(un))
                        except RoutingInfeasible:
                            alt = None
                        if alt is not None and alt.length <= base.length + self.params.detour:
                            path = alt
                    if path is not None:
                        r = self._routed(i, pend, orientation, port, path)
                        steps[s].append(r)
                        uq |= qs
                        un |= path.nodes
                        if port is not None:
                            up.add(port)
                        placed = True
                        break
                if placed:
                    break
            if not placed:
                port = ports[0]
                key = (i, port)
                if key not in shortest:
                    shortest[key] = self._route(pend, orientation, port)
                r = self._routed(i, pend, orientation, port, shortest[key])
                steps.append([r])
                used.append((set(qs), set(r.nodes), {port} if port else set()))
        return steps

    @staticmethod
    def _score(steps: list[list[RoutedOp]]) -> tuple[int, int]:
        return len(steps), sum(r.path.length for s in steps for r in s)

    def pack(self, pending: list[_Pending], orientation) -> list[list[RoutedOp]]:
        colored = self._by_coloring(pending, orientation)
        if len(colored) <= 1:
            return colored
        fitted = self._first_fit(pending, orientation)
        return fitted if self._score(fitted) < self._score(colored) else colored

    # ------------------------------------------------------------ phases

    def _phase(
        self, pending: list[_Pending], orientation: dict[int, str], plan: SpatialPlan, terminal: bool
    ) -> None:
        slot = self.slot
        demands = [orientation_demands(p.op, self.router, slot) for p in pending]
        order, _ = order_for_rotations(demands, orientation)
        for seg, req in split_segments(order, demands):
            flips = sorted(q for q, o in req.items() if orientation.get(q, "Z") != o)
            if flips:
                rot_ops = tuple(
                    OpRecord(
                        kind=ROTATION,
                        qubits=(q,),
                        tiles=frozenset({self.layout.rotation_tile(slot(q))}),
                        move_tiles=self.params.move_tiles,
                    )
                    for q in flips
                )
                plan.steps.append(PlanStep(CAT_ROTATION, self.params.rotation_steps, rot_ops))
                plan.rotations += len(flips)
                for q in flips:
                    orientation[q] = req[q]
            seg_pending = [pending[i] for i in seg]
            for group in self.pack(seg_pending, orientation):
                group = sorted(group, key=lambda r: r.index)
                records = tuple(self._record(r, terminal) for r in group)
                dur = 1 + (self.params.y_extra_steps if any(r.is_y for r in group) else 0)
                plan.steps.append(PlanStep(CAT_MEASURE if terminal else CAT_OP, dur, records))

    def plan(self, program: PbcProgram) -> SpatialPlan:
        plan = SpatialPlan(program.n_qubits)
        orientation = {q: "Z" for q in range(program.n_qubits)}
        for layer in program.layers:
            pending = [_Pending(program.rotations[i].operator.unsigned(), True, i) for i in layer]
            self._phase(pending, orientation, plan, terminal=False)
        meas = [_Pending(m.unsigned(), False, i) for i, m in enumerate(program.measurements)]
        if meas:
            self._phase(meas, orientation, plan, terminal=True)
        return plan


def plan_schedule(
    program: PbcProgram,
    layout: Layout,
    slot_of: tuple[int, ...],
    params: SchedulerParams = SchedulerParams(),
    factory: FactoryParams = FactoryParams(),
) -> SpatialPlan:
    if len(slot_of) != program.n_qubits:
        raise ValueError("qubit map does not match the program")
    if program.n_qubits > len(layout.slots):
        raise ValueError("layout has fewer slots than the program has qubits")
    plan = Planner(layout, slot_of, params, factory).plan(program)
    plan.meta["n_ports"] = layout.n_factories
    return plan


def retime(plan: SpatialPlan, n_factories: int, factory: FactoryParams = FactoryParams()) -> ScheduleTrace:
    """Replay a spatial plan against the magic-state supply, inserting WaitT stalls."""
    used_ports = {o.port for s in plan.steps for o in s.ops if o.port is not None}
    if len(used_ports) > n_factories:
        raise ValueError("plan uses more factory ports than factories available")
    supply = FactoryState(n_factories, factory)
    n = plan.n_qubits
    steps: list[Step] = []
    t = 0
    for ps in plan.steps:
        k = ps.magic
        if k:
            ready = supply.ready_time(supply.consumed + k)
            if ready > t:
                steps.append(Step(t, ready - t, CAT_WAIT, (), n))
                t = ready
            supply.consume(k, t)
        busy = sum(len(o.qubits) for o in ps.ops)
        steps.append(Step(t, ps.duration, ps.category, ps.ops, n - busy))
        t += ps.duration
    return ScheduleTrace(n, steps, {"rotations": plan.rotations, "n_factories": n_factories})


def schedule(
    program: PbcProgram,
    layout: Layout,
    slot_of: tuple[int, ...],
    factory: FactoryParams = FactoryParams(),
    params: SchedulerParams = SchedulerParams(),
) -> ScheduleTrace:
    plan = plan_schedule(program, layout, slot_of, params, factory)
    return retime(plan, layout.n_factories, factory)
