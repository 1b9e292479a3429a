"""Tile-grid layouts: compute slots, routing bands, factories, Y ancillas.

Geometry, top to bottom::

    row 0           Y ancilla (second tile)
    compute row 0   Y | C C C C . | port body...
    band 0          R R R R R     (spine column + W routing tiles)
    compute row 1   R C C C C
    band 1          R R R R R
    ...

The leftmost routing column (the "spine") runs through every compute row
after the first so that all bands form one connected routing region.
Extra routing rows are stacked under the bottom band and extra routing
columns are added left of the spine. Both keep every existing tile where it
was (up to a uniform shift), so a larger layout always contains the smaller
one's routing graph. Factory ``k`` attaches to the right end of band ``k``:
an 11-tile block of 10 body tiles and one port.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

FACTORY_AREA = 11
Y_ANCILLA_TILES = 2

Coord = tuple[int, int]


class LayoutInfeasible(ValueError):
    pass


class TileKind(str, enum.Enum):
    COMPUTE = "Compute"
    ROUTING = "Routing"
    FACTORY_BODY = "FactoryBody"
    FACTORY_PORT = "FactoryPort"
    Y_ANCILLA = "YAncilla"
    UNUSED = "Unused"


class Access(str, enum.Enum):
    DIRECT = "direct"
    NEEDS_ROTATION = "needs_rotation"
    NEEDS_Y_GADGET = "needs_y_gadget"


_SIDES = {"N": (-1, 0), "S": (1, 0), "W": (0, -1), "E": (0, 1)}


def compute_width(n_qubits: int) -> int:
    if n_qubits == 1:
        return 1
    w = math.ceil(math.sqrt(n_qubits))
    return w + (w % 2)


def band_extras(n_bands: int, extra_rows: int) -> list[int]:
    # interleaving rows between compute rows would lengthen every path that
    # crosses them, so all extra rows go under the last compute row
    extras = [0] * n_bands
    extras[-1] = extra_rows
    return extras


@dataclass(frozen=True, eq=False)
class Layout:
    n_qubits: int
    n_factories: int
    extra_routing_rows: int
    extra_routing_cols: int
    width: int
    n_rows: int
    n_cols: int
    tiles: dict[Coord, TileKind]
    slots: tuple[Coord, ...]
    ports: tuple[Coord, ...]
    y_tiles: tuple[Coord, ...]
    band_rows: tuple[tuple[int, ...], ...]
    distance: int = 9
    meta: dict = field(default_factory=dict)

    # ------------------------------------------------------------------ sizes

    def count(self, kind: TileKind) -> int:
        return sum(1 for k in self.tiles.values() if k is kind)

    @cached_property
    def tile_totals(self) -> dict[str, int]:
        return {
            "compute": self.count(TileKind.COMPUTE),
            "routing": self.count(TileKind.ROUTING),
            "factory": self.count(TileKind.FACTORY_BODY) + self.count(TileKind.FACTORY_PORT),
            "y_ancilla": self.count(TileKind.Y_ANCILLA),
        }

    @property
    def total_tiles(self) -> int:
        return sum(self.tile_totals.values())

    @property
    def routing_unit(self) -> int:
        """Tiles added by one extra routing row (spine columns included)."""
        return self.width + 1 + self.extra_routing_cols

    def physical_qubits(self, distance: int | None = None) -> int:
        d = self.distance if distance is None else distance
        return self.total_tiles * (2 * d * d - 1)

    # --------------------------------------------------------------- geometry

    def kind(self, c: Coord) -> TileKind:
        return self.tiles.get(c, TileKind.UNUSED)

    def neighbor(self, c: Coord, side: str) -> Coord:
        dr, dc = _SIDES[side]
        return (c[0] + dr, c[1] + dc)

    def routing_sides(self, slot: Coord) -> dict[str, Coord]:
        out = {}
        for side in "SNWE":
            nb = self.neighbor(slot, side)
            if self.kind(nb) is TileKind.ROUTING:
                out[side] = nb
        return out

    def boundary_access(self, slot: Coord, pauli: str, orientation: str = "Z") -> Access:
        """How ``pauli`` on ``slot`` reaches routing given the tile orientation.

        ``orientation`` names the boundary type facing north/south; the other
        type faces east/west.
        """
        if self.kind(slot) is not TileKind.COMPUTE:
            raise ValueError(f"{slot} is not a compute tile")
        sides = self.routing_sides(slot)
        if not sides:
            raise LayoutInfeasible(f"compute tile {slot} has no adjacent routing tile")
        if pauli == "Y":
            return Access.NEEDS_Y_GADGET
        facing = {"N": orientation, "S": orientation}
        other = "X" if orientation == "Z" else "Z"
        facing.update(E=other, W=other)
        if any(facing[s] == pauli for s in sides):
            return Access.DIRECT
        return Access.NEEDS_ROTATION

    def data_terminal(self, slot: Coord, pauli: str, orientation: str = "Z") -> Coord:
        """Routing tile touching the boundary that exposes ``pauli``."""
        sides = self.routing_sides(slot)
        if pauli == "Y":
            order = "SNWE"
        elif pauli == orientation:
            order = "SN"
        else:
            order = "WE"
        for s in order:
            if s in sides:
                return sides[s]
        raise LayoutInfeasible(f"no routing tile exposes {pauli} on {slot} ({orientation})")

    def exposing_tiles(self, slot: Coord, pauli: str, orientation: str = "Z") -> tuple[Coord, ...]:
        """All routing tiles touching a boundary of ``slot`` that exposes ``pauli``.

        Y is read through the north/south pair together with the Y ancilla.
        """
        sides = self.routing_sides(slot)
        order = "SN" if pauli in ("Y", orientation) else "WE"
        return tuple(sides[s] for s in order if s in sides)

    def rotation_tile(self, slot: Coord) -> Coord:
        sides = self.routing_sides(slot)
        for s in "SNWE":
            if s in sides:
                return sides[s]
        raise LayoutInfeasible(f"compute tile {slot} cannot rotate: no routing neighbour")

    def anchor(self, c: Coord) -> Coord:
        """Routing tile a terminal-only node (port or Y ancilla) attaches to."""
        for side in "WSNE":
            nb = self.neighbor(c, side)
            if self.kind(nb) is TileKind.ROUTING:
                return nb
        raise LayoutInfeasible(f"{c} is not adjacent to routing")

    @cached_property
    def routing_coords(self) -> tuple[Coord, ...]:
        return tuple(sorted(c for c, k in self.tiles.items() if k is TileKind.ROUTING))

    def routing_graph(self) -> nx.Graph:
        g = nx.Graph()
        for c in self.routing_coords:
            g.add_node(c, kind=TileKind.ROUTING.value, terminal_only=False)
        for c in self.routing_coords:
            for side in "SE":
                nb = self.neighbor(c, side)
                if nb in g:
                    g.add_edge(c, nb)
        for c in (*self.ports, self.y_tiles[0]):
            g.add_node(c, kind=self.kind(c).value, terminal_only=True)
            g.add_edge(c, self.anchor(c))
        return g

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_factories": self.n_factories,
            "extra_routing_rows": self.extra_routing_rows,
            "extra_routing_cols": self.extra_routing_cols,
            "grid": {"rows": self.n_rows, "cols": self.n_cols, "compute_width": self.width},
            "distance": self.distance,
            "totals": {**self.tile_totals, "total": self.total_tiles},
            "physical_qubits": self.physical_qubits(),
            "tiles": [
                {"row": r, "col": c, "kind": k.value} for (r, c), k in sorted(self.tiles.items())
            ],
        }

    def summary(self) -> dict:
        return {
            "n_factories": self.n_factories,
            "extra_routing_rows": self.extra_routing_rows,
            "extra_routing_cols": self.extra_routing_cols,
            "total_tiles": self.total_tiles,
            "routing_unit": self.routing_unit,
            "physical_qubits": self.physical_qubits(),
        }


def build_layout(
    n_qubits: int,
    n_factories: int = 1,
    extra_routing_rows: int = 0,
    extra_routing_cols: int = 0,
    distance: int = 9,
) -> Layout:
    if n_qubits < 1:
        raise ValueError("need at least one logical qubit")
    if n_factories < 1:
        raise ValueError("need at least one factory")
    if extra_routing_rows < 0 or extra_routing_cols < 0:
        raise ValueError("extra routing must be non-negative")

    w = compute_width(n_qubits)
    m = math.ceil(n_qubits / w)
    if n_factories > m:
        raise LayoutInfeasible(
            f"{n_factories} factories exceed the {m} attachment points of this layout"
        )
    extras = band_extras(m, extra_routing_rows)
    spine = extra_routing_cols
    first_compute_col = spine + 1
    port_col = spine + w + 1

    tiles: dict[Coord, TileKind] = {}
    slots: list[Coord] = []
    band_rows: list[tuple[int, ...]] = []
    compute_rows: list[int] = []

    row = 1
    for k in range(m):
        compute_rows.append(row)
        for j in range(w):
            if len(slots) < n_qubits:
                slots.append((row, first_compute_col + j))
                tiles[slots[-1]] = TileKind.COMPUTE
        if k > 0:
            for c in range(spine + 1):
                tiles[(row, c)] = TileKind.ROUTING
        row += 1
        rows_k = tuple(range(row, row + 1 + extras[k]))
        for r in rows_k:
            for c in range(spine + w + 1):
                tiles[(r, c)] = TileKind.ROUTING
        band_rows.append(rows_k)
        row += len(rows_k)

    # column 0..spine-1 in the first compute row are empty; the Y pair sits on the spine
    y_tiles = ((compute_rows[0], spine), (compute_rows[0] - 1, spine))
    for c in y_tiles:
        tiles[c] = TileKind.Y_ANCILLA

    ports = []
    for f in range(n_factories):
        top = band_rows[f][0]
        port = (top, port_col)
        tiles[port] = TileKind.FACTORY_PORT
        ports.append(port)
        for r in (compute_rows[f], top):
            for c in range(port_col + 1, port_col + 6):
                tiles[(r, c)] = TileKind.FACTORY_BODY

    n_cols = port_col + 6
    return Layout(
        n_qubits=n_qubits,
        n_factories=n_factories,
        extra_routing_rows=extra_routing_rows,
        extra_routing_cols=extra_routing_cols,
        width=w,
        n_rows=row,
        n_cols=n_cols,
        tiles=tiles,
        slots=tuple(slots),
        ports=tuple(ports),
        y_tiles=y_tiles,
        band_rows=tuple(band_rows),
        distance=distance,
        meta={"compute_rows": tuple(compute_rows)},
    )


def minimal_layout(n_qubits: int, distance: int = 9) -> Layout:
    return build_layout(n_qubits, 1, 0, 0, distance)


def intermediate_layout(n_qubits: int, distance: int = 9) -> Layout:
    """Static layout with ~30% more tiles than the minimal one.

    The surplus buys whole routing rows first; a second factory is added only
    when at least 11 tiles are left over.
    """
    base = minimal_layout(n_qubits, distance)
    target = math.ceil(1.3 * base.total_tiles)
    extra = target - base.total_tiles
    rows, rem = divmod(extra, base.routing_unit)
    factories = 1
    if rem >= FACTORY_AREA and len(base.band_rows) > 1:
        factories = 2
    return build_layout(n_qubits, factories, rows, 0, distance)
