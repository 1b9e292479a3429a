import math

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparo.layout import (
    FACTORY_AREA,
    Access,
    LayoutInfeasible,
    TileKind,
    build_layout,
    compute_width,
    intermediate_layout,
    minimal_layout,
)


def expected_total(n, f, r, c):
    """Independent tile-count formula for the constructor."""
    w = compute_width(n)
    m = math.ceil(n / w)
    routing = (w + 1 + c) * (m + r) + (m - 1) * (c + 1)
    return n + routing + FACTORY_AREA * f + 2


def test_compute_width():
    assert [compute_width(n) for n in (1, 2, 4, 5, 9, 16, 17, 433)] == [1, 2, 2, 4, 4, 4, 6, 22]


def test_minimal_counts():
    assert minimal_layout(4).total_tiles == 24
    assert minimal_layout(1).total_tiles == 16
    assert build_layout(4, 1, 1, 0).total_tiles == 24 + 3
    lay = minimal_layout(4)
    assert lay.routing_unit == 3
    assert lay.count(TileKind.Y_ANCILLA) == 2
    assert lay.count(TileKind.FACTORY_BODY) + lay.count(TileKind.FACTORY_PORT) == 11


@given(st.integers(1, 80), st.integers(1, 4), st.integers(0, 4), st.integers(0, 2))
def test_tile_formula_and_invariants(n, f, r, c):
    try:
        lay = build_layout(n, f, r, c)
    except LayoutInfeasible:
        assert f > math.ceil(n / compute_width(n))
        return
    assert lay.total_tiles == expected_total(n, f, r, c)
    t = lay.tile_totals
    assert lay.total_tiles == t["compute"] + t["routing"] + FACTORY_AREA * f + t["y_ancilla"]
    assert build_layout(n, f, r + 1, c).total_tiles == lay.total_tiles + lay.routing_unit
    assert len(lay.slots) == n
    for s in lay.slots:
        assert lay.routing_sides(s)
    for p in lay.ports:
        assert lay.kind(lay.anchor(p)) is TileKind.ROUTING
    g = lay.routing_graph()
    assert nx.is_connected(g)


@given(st.integers(1, 60), st.integers(0, 3))
def test_larger_layouts_are_supersets(n, r):
    small = build_layout(n, 1, r, 0)
    big = build_layout(n, 1, r + 1, 0)
    for coord, kind in small.tiles.items():
        assert big.kind(coord) is kind
    assert big.slots == small.slots


def test_routing_graph_shapes():
    lay = build_layout(1, 1, 1, 0)
    g = lay.routing_graph()
    routing = [c for c in g if not g.nodes[c]["terminal_only"]]
    sub = g.subgraph(routing)
    # two stacked routing rows of width 2
    assert nx.is_isomorphic(sub, nx.grid_2d_graph(2, 2))
    lay = minimal_layout(1)
    sub = lay.routing_graph().subgraph(lay.routing_coords)
    assert nx.is_isomorphic(sub, nx.path_graph(2))


def test_boundary_access():
    lay = minimal_layout(4)
    slot = lay.slots[1]
    assert lay.boundary_access(slot, "Z") is Access.DIRECT
    assert lay.boundary_access(slot, "X") is Access.NEEDS_ROTATION
    assert lay.boundary_access(slot, "X", orientation="X") is Access.DIRECT
    assert lay.boundary_access(slot, "Y") is Access.NEEDS_Y_GADGET
    with pytest.raises(ValueError):
        lay.boundary_access(lay.ports[0], "Z")


def test_factory_capacity():
    with pytest.raises(LayoutInfeasible):
        build_layout(4, 3)
    assert build_layout(4, 2).n_factories == 2


@pytest.mark.parametrize("n", [8, 9, 16, 25, 56, 100, 115, 118, 200, 433, 512])
def test_intermediate_ratio(n):
    ratio = intermediate_layout(n).total_tiles / minimal_layout(n).total_tiles
    assert 1.25 <= ratio <= 1.35


def test_physical_qubits():
    lay = minimal_layout(4)
    assert lay.physical_qubits(9) == lay.total_tiles * (2 * 81 - 1)
    assert 100 * (2 * 81 - 1) == 16_100


def test_json():
    data = minimal_layout(4).to_json()
    assert data["totals"]["total"] == 24
    assert len(data["tiles"]) == 24
    assert {t["kind"] for t in data["tiles"]} == {"Compute", "Routing", "FactoryBody", "FactoryPort", "YAncilla"}
