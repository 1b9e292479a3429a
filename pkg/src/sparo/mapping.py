"""Qubit placement: greedy seeding near factory ports, then annealed swaps.

A map is stored as ``slot_of[q]`` = index into ``layout.slots``. Slot
indices are stable across layouts built for the same qubit count, so a map
computed on the minimal layout can be reused when factories or routing rows
are added.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .layout import Layout, LayoutInfeasible
from .routing import GridGraph
from .transpile import PbcProgram


@dataclass(frozen=True)
class InteractionProfile:
    n_qubits: int
    participation: np.ndarray  # pi/8 appearances per qubit
    cooccurrence: np.ndarray  # symmetric, zero diagonal
    weights: tuple[int, ...] = ()  # operator weight of each pi/8 rotation

    def to_json(self) -> dict:
        return {
            "participation": self.participation.tolist(),
            "cooccurrence_pairs": int(np.count_nonzero(np.triu(self.cooccurrence))),
        }


def _incidence(n: int, masks: list[int]) -> np.ndarray:
    b = np.zeros((len(masks), n), dtype=np.int64)
    for i, m in enumerate(masks):
        q = 0
        while m:
            if m & 1:
                b[i, q] = 1
            m >>= 1
            q += 1
    return b


def profile(p: PbcProgram) -> InteractionProfile:
    n = p.n_qubits
    rot = _incidence(n, [r.operator.x | r.operator.z for r in p.rotations])
    meas = _incidence(n, [m.x | m.z for m in p.measurements])
    both = np.vstack([rot, meas]) if len(meas) else rot
    co = both.T @ both
    np.fill_diagonal(co, 0)
    return InteractionProfile(n, rot.sum(axis=0), co, tuple(int(w) for w in rot.sum(axis=1)))


@dataclass(frozen=True)
class QubitMap:
    slot_of: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.slot_of) != list(range(len(self.slot_of))):
            raise ValueError("qubit map must be a bijection onto the first n slots")

    @classmethod
    def identity(cls, n: int) -> QubitMap:
        return cls(tuple(range(n)))

    def coord(self, layout: Layout, q: int):
        return layout.slots[self.slot_of[q]]

    def to_json(self, layout: Layout | None = None) -> list:
        if layout is None:
            return list(self.slot_of)
        return [list(layout.slots[s]) for s in self.slot_of]


def port_distances(layout: Layout) -> np.ndarray:
    """Routing-graph hop count from each slot to its nearest factory port."""
    g = GridGraph.from_layout(layout)
    sources = [g.index[layout.anchor(p)] for p in layout.ports]
    dist, _, _ = g.bfs(sources)
    out = np.empty(len(layout.slots), dtype=np.int64)
    for i, s in enumerate(layout.slots):
        near = [dist[g.index[c]] for c in layout.routing_sides(s).values()]
        near = [d for d in near if d >= 0]
        if not near:
            raise LayoutInfeasible(f"slot {s} cannot reach a factory port")
        out[i] = min(near) + 1
    return out


def greedy_init(prof: InteractionProfile, layout: Layout) -> QubitMap:
    n = prof.n_qubits
    if len(layout.slots) < n:
        raise LayoutInfeasible(f"{n} qubits need {n} slots, layout has {len(layout.slots)}")
    pd = port_distances(layout)
    qubits = sorted(range(n), key=lambda q: (-int(prof.participation[q]), q))
    slots = sorted(range(n), key=lambda i: (int(pd[i]), layout.slots[i]))
    slot_of = [0] * n
    for q, s in zip(qubits, slots):
        slot_of[q] = s
    return QubitMap(tuple(slot_of))


@dataclass(frozen=True)
class AnnealParams:
    iters: int | None = None  # None -> 2000 * n
    t0: float | None = None  # None -> mean positive delta over 100 probes
    cooling: float = 0.995
    seed: int = 0
    lam: float = 1.0


def _slot_geometry(layout: Layout, n: int) -> tuple[np.ndarray, np.ndarray]:
    pos = np.array(layout.slots[:n], dtype=np.int64).reshape(n, 2)
    dist = np.abs(pos[:, None, :] - pos[None, :, :]).sum(axis=2)
    return dist, port_distances(layout)[:n]


def map_cost(m: QubitMap, prof: InteractionProfile, layout: Layout, lam: float = 1.0) -> float:
    n = prof.n_qubits
    dist, pd = _slot_geometry(layout, n)
    s = np.asarray(m.slot_of, dtype=np.int64)
    pair = 0.5 * float((prof.cooccurrence * dist[np.ix_(s, s)]).sum())
    return pair + lam * float((prof.participation * pd[s]).sum())


def anneal(
    m0: QubitMap, prof: InteractionProfile, layout: Layout, params: AnnealParams = AnnealParams()
) -> QubitMap:
    """Metropolis swap search with geometric cooling; returns the best map seen."""
    n = prof.n_qubits
    if n < 2:
        return m0
    dist, pd = _slot_geometry(layout, n)
    co = prof.cooccurrence.astype(np.float64)
    part = prof.participation.astype(np.float64)
    lam = params.lam
    slot = np.asarray(m0.slot_of, dtype=np.int64)
    # qubit-space distance matrix for the current placement
    qd = dist[np.ix_(slot, slot)].astype(np.float64)
    rng = np.random.default_rng(params.seed)

    def delta(a: int, b: int) -> float:
        d = float((co[a] - co[b]) @ (qd[b] - qd[a])) + 2.0 * co[a, b] * qd[a, b]
        return d + lam * (part[a] - part[b]) * float(pd[slot[b]] - pd[slot[a]])

    iters = params.iters if params.iters is not None else 2000 * n
    t = params.t0
    if t is None:
        probes = rng.integers(0, n, size=(100, 2))
        ups = [delta(a, b) for a, b in probes if a != b]
        ups = [d for d in ups if d > 0]
        t = float(np.mean(ups)) if ups else 1.0
    pairs = rng.integers(0, n, size=(iters, 2))
    uniforms = rng.random(iters)

    cost = 0.0
    best_cost, best_slot = 0.0, slot.copy()
    for k in range(iters):
        a, b = int(pairs[k, 0]), int(pairs[k, 1])
        if a != b:
            d = delta(a, b)
            if d <= 0 or (t > 1e-12 and uniforms[k] < math.exp(-d / t)):
                slot[[a, b]] = slot[[b, a]]
                qd[[a, b]] = qd[[b, a]]
                qd[:, [a, b]] = qd[:, [b, a]]
                cost += d
                if cost < best_cost - 1e-9:
                    best_cost, best_slot = cost, slot.copy()
        t *= params.cooling
    return QubitMap(tuple(int(s) for s in best_slot))


def place(p: PbcProgram, layout: Layout, params: AnnealParams = AnnealParams()) -> QubitMap:
    prof = profile(p)
    return anneal(greedy_init(prof, layout), prof, layout, params)
