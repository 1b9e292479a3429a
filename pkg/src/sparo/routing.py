"""Ancilla routing for Pauli product measurements.

Trees are measured in routing tiles. Up to three terminals the tree is
exactly optimal; beyond that a Mehlhorn-style Voronoi MST gives the usual
factor-2 bound.

Nodes that are not routing tiles (factory ports, the Y ancilla and one
virtual node per data-qubit boundary pair) are *terminal-only*: a tree may
end at them but never pass through them, and they are not counted in the
ancilla length.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable

from .layout import Coord, Layout, LayoutInfeasible
from .pauli import PauliString

DEFAULT_SLACK = 2
# above this many terminals the pairwise pruning costs more than it saves
PRUNE_MAX_TERMINALS = 8
EXACT_MAX_TERMINALS = 3

Node = Hashable


class RoutingInfeasible(LayoutInfeasible):
    pass


class GridGraph:
    """Undirected graph on grid keys with integer node ids.

    Keys are ``(row, col)`` tiles or ``(row, col, tag)`` virtual nodes; the
    first two entries are used for Manhattan pruning.
    """

    def __init__(
        self,
        coords: Iterable[Node],
        edges: Iterable[tuple[Node, Node]] | None = None,
        terminal_only: Iterable[Node] = (),
    ):
        extra = set(terminal_only)
        self.coords: list = sorted(set(coords) | extra)
        self.index = {c: i for i, c in enumerate(self.coords)}
        self.adj: list[list[int]] = [[] for _ in self.coords]
        self.blocked = [c in extra for c in self.coords]
        if edges is None:
            for c, i in self.index.items():
                for nb in ((c[0] + 1, c[1]), (c[0], c[1] + 1)):
                    j = self.index.get(nb)
                    if j is not None:
                        self.adj[i].append(j)
                        self.adj[j].append(i)
        else:
            for a, b in edges:
                i, j = self.index[a], self.index[b]
                self.adj[i].append(j)
                self.adj[j].append(i)
        for nbrs in self.adj:
            nbrs.sort()

    @classmethod
    def from_layout(cls, layout: Layout) -> GridGraph:
        """Routing tiles only (no terminal-only nodes)."""
        return cls(layout.routing_coords)

    def __len__(self) -> int:
        return len(self.coords)

    def bfs(self, sources: Iterable[int], allowed: set[int] | None = None):
        """Multi-source BFS; returns (dist, parent, owner) lists (-1 when unreached).

        Terminal-only nodes are reached but only expanded when they are sources.
        """
        n = len(self.coords)
        dist = [-1] * n
        parent = [-1] * n
        owner = [-1] * n
        blocked = self.blocked
        q: deque[int] = deque()
        for s in sources:
            if dist[s] == -1:
                dist[s] = 0
                owner[s] = s
                q.append(s)
        while q:
            u = q.popleft()
            du = dist[u] + 1
            for v in self.adj[u]:
                if dist[v] == -1 and (allowed is None or v in allowed):
                    dist[v] = du
                    parent[v] = u
                    owner[v] = owner[u]
                    if not blocked[v]:
                        q.append(v)
        return dist, parent, owner

    def connected(self, nodes: set[int]) -> bool:
        if not nodes:
            return True
        start = next(iter(nodes))
        dist, _, _ = self.bfs([start], nodes)
        return all(dist[v] >= 0 for v in nodes)


@dataclass(frozen=True)
class AncillaPath:
    tiles: frozenset  # routing tiles only
    terminals: tuple
    nodes: frozenset = frozenset()  # tiles plus terminal-only nodes

    @property
    def length(self) -> int:
        return len(self.tiles)


def _manhattan(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def prune_candidates(graph: GridGraph, terminals: Iterable[Node], slack: int) -> set[int]:
    """Keep nodes whose Manhattan detour between some terminal pair is within ``slack``."""
    if slack < 0:
        raise ValueError("slack must be non-negative")
    ts = sorted(set(terminals))
    keep = {graph.index[t] for t in ts}
    if len(ts) == 1:
        return keep
    pairs = [(s, t, _manhattan(s, t)) for i, s in enumerate(ts) for t in ts[i + 1 :]]
    for v, c in enumerate(graph.coords):
        if v in keep:
            continue
        for s, t, st in pairs:
            if _manhattan(s, c) + _manhattan(c, t) - st <= slack:
                keep.add(v)
                break
    return keep


def _walk(parent: list[int], v: int) -> list[int]:
    out = [v]
    while parent[v] != -1:
        v = parent[v]
        out.append(v)
    return out


def _prune_leaves(graph: GridGraph, nodes: set[int], terms: set[int]) -> set[int]:
    """Spanning tree of ``nodes`` with non-terminal leaves stripped."""
    root = min(terms)
    dist, parent, _ = graph.bfs([root], nodes)
    children: dict[int, int] = {v: 0 for v in nodes}
    for v in nodes:
        if parent[v] != -1:
            children[parent[v]] += 1
    leaves = deque(v for v in nodes if children[v] == 0 and v not in terms)
    kept = set(nodes)
    while leaves:
        v = leaves.popleft()
        kept.discard(v)
        p = parent[v]
        if p != -1:
            children[p] -= 1
            if children[p] == 0 and p not in terms:
                leaves.append(p)
    return kept


def _as_path(graph: GridGraph, nodes: set[int], ts: tuple) -> AncillaPath:
    keys = frozenset(graph.coords[v] for v in nodes)
    tiles = frozenset(graph.coords[v] for v in nodes if not graph.blocked[v])
    return AncillaPath(tiles, ts, keys)


def steiner_tree(
    graph: GridGraph, terminals: Iterable[Node], allowed: set[int] | None = None
) -> AncillaPath:
    ts = tuple(sorted(set(terminals)))
    if not ts:
        raise ValueError("need at least one terminal")
    ids = [graph.index[t] for t in ts]
    if allowed is not None:
        allowed = set(allowed) | set(ids)

    if len(ids) == 1:
        nodes = set(ids)
        if graph.blocked[ids[0]]:
            # a lone port or boundary still needs one ancilla tile next to it
            nbrs = [v for v in graph.adj[ids[0]] if allowed is None or v in allowed]
            if not nbrs:
                raise RoutingInfeasible(f"{ts[0]} has no usable routing neighbour")
            nodes.add(nbrs[0])
    elif len(ids) <= EXACT_MAX_TERMINALS:
        nodes = _exact_small(graph, ids, allowed)
    else:
        nodes = _mehlhorn(graph, ids, allowed)
    return _as_path(graph, nodes, ts)


def _exact_small(graph: GridGraph, ids: list[int], allowed: set[int] | None) -> set[int]:
    runs = [graph.bfs([t], allowed) for t in ids]
    if len(ids) == 2:
        dist, parent, _ = runs[0]
        if dist[ids[1]] < 0:
            raise RoutingInfeasible("terminals are disconnected")
        return set(_walk(parent, ids[1]))
    best, centre = None, -1
    candidates = range(len(graph)) if allowed is None else sorted(allowed)
    terms = set(ids)
    blocked = graph.blocked
    for v in candidates:
        if blocked[v] and v not in terms:
            continue
        ds = [r[0][v] for r in runs]
        if min(ds) < 0:
            continue
        total = sum(ds)
        if best is None or total < best:
            best, centre = total, v
    if best is None:
        raise RoutingInfeasible("terminals are disconnected")
    nodes: set[int] = set()
    for dist, parent, _ in runs:
        nodes.update(_walk(parent, centre))
    return nodes


def _mehlhorn(graph: GridGraph, ids: list[int], allowed: set[int] | None) -> set[int]:
    dist, parent, owner = graph.bfs(ids, allowed)
    if any(dist[t] < 0 for t in ids):
        raise RoutingInfeasible("terminals are disconnected")
    blocked = graph.blocked
    bridges: dict[tuple[int, int], tuple[int, int, int]] = {}
    for u in range(len(graph)):
        du = dist[u]
        if du < 0 or (blocked[u] and du > 0):
            continue
        ou = owner[u]
        for v in graph.adj[u]:
            dv = dist[v]
            if v <= u or dv < 0 or (blocked[v] and dv > 0) or ou == owner[v]:
                continue
            a, b = (ou, owner[v]) if ou < owner[v] else (owner[v], ou)
            w = du + dv + 1
            cur = bridges.get((a, b))
            if cur is None or (w, u, v) < cur:
                bridges[(a, b)] = (w, u, v)

    # Kruskal on the terminal graph
    root = {t: t for t in ids}

    def find(x: int) -> int:
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    nodes: set[int] = set(ids)
    joined = 1
    for (a, b), (w, u, v) in sorted(bridges.items(), key=lambda kv: (kv[1], kv[0])):
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        root[ra] = rb
        nodes.update(_walk(parent, u))
        nodes.update(_walk(parent, v))
        joined += 1
        if joined == len(ids):
            break
    if joined < len(ids):
        raise RoutingInfeasible("terminals are disconnected")
    return _prune_leaves(graph, nodes, set(ids))


def route(
    graph: GridGraph,
    terminals: Iterable[Node],
    slack: int = DEFAULT_SLACK,
    allowed: set[int] | None = None,
) -> AncillaPath:
    """Prune, then solve; doubles the slack whenever pruning disconnects the terminals.

    Up to three terminals the exact solver runs on the whole graph, since
    pruning could cut off a shortest detour.
    """
    ts = sorted(set(terminals))
    if len(ts) > PRUNE_MAX_TERMINALS or len(ts) <= EXACT_MAX_TERMINALS:
        return steiner_tree(graph, ts, allowed)
    limit = 2 * max((c[0] + c[1] for c in graph.coords), default=0) + 2
    s = slack
    while True:
        keep = prune_candidates(graph, ts, s)
        if allowed is not None:
            keep &= allowed
        try:
            return steiner_tree(graph, ts, keep)
        except RoutingInfeasible:
            if s > limit:
                return steiner_tree(graph, ts, allowed)
            s = max(1, s * 2)


# ---------------------------------------------------------------- layouts


def boundary_node(slot: Coord, group: str) -> tuple:
    return (slot[0], slot[1], group)


class LayoutRouter:
    """Routing graph of a layout plus terminal construction for PPMs."""

    def __init__(self, layout: Layout) -> None:
        self.layout = layout
        tiles = set(layout.routing_coords)
        edges = []
        for c in tiles:
            for nb in ((c[0] + 1, c[1]), (c[0], c[1] + 1)):
                if nb in tiles:
                    edges.append((c, nb))
        extra = []
        for p in (*layout.ports, layout.y_tiles[0]):
            extra.append(p)
            edges.append((p, layout.anchor(p)))
        sides = {}
        for slot in layout.slots:
            rs = layout.routing_sides(slot)
            if not rs:
                raise LayoutInfeasible(f"compute tile {slot} has no adjacent routing tile")
            sides[slot] = rs
            for group in ("SN", "WE"):
                touching = [rs[s] for s in group if s in rs]
                if touching:
                    node = boundary_node(slot, group)
                    extra.append(node)
                    edges += [(node, t) for t in touching]
        self.sides = sides
        self.graph = GridGraph(tiles, edges, extra)
        self.y_node = layout.y_tiles[0]

    def group_for(self, slot: Coord, letter: str, orientation: str) -> str:
        return "SN" if letter in ("Y", orientation) else "WE"

    def has_group(self, slot: Coord, group: str) -> bool:
        return boundary_node(slot, group) in self.graph.index

    def needs_rotation(self, slot: Coord, letter: str, orientation: str) -> bool:
        return not self.has_group(slot, self.group_for(slot, letter, orientation))

    def terminals(
        self,
        op: PauliString,
        slot_of_qubit,
        orientation,
        port: Coord | None = None,
    ) -> list:
        """Terminal nodes for measuring ``op`` (plus a magic port when given)."""
        out = []
        has_y = False
        for q in op.qubits():
            letter = op.letter(q)
            slot = slot_of_qubit(q)
            group = self.group_for(slot, letter, orientation[q])
            node = boundary_node(slot, group)
            if node not in self.graph.index:
                raise RoutingInfeasible(
                    f"qubit {q} at {slot} cannot expose {letter} with orientation {orientation[q]}"
                )
            out.append(node)
            has_y |= letter == "Y"
        if has_y:
            out.append(self.y_node)
        if port is not None:
            out.append(port)
        return out

    def route(self, terminals, allowed: set[int] | None = None, slack: int = DEFAULT_SLACK) -> AncillaPath:
        return route(self.graph, terminals, slack, allowed)
