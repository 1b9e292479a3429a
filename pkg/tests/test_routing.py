import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparo.layout import build_layout, minimal_layout
from sparo.pauli import PauliString
from sparo.routing import (
    GridGraph,
    LayoutRouter,
    RoutingInfeasible,
    boundary_node,
    prune_candidates,
    route,
    steiner_tree,
)

from oracles import random_grid_instance, steiner_brute_force


def test_path_and_corner():
    g = GridGraph([(0, c) for c in range(5)])
    assert route(g, [(0, 0), (0, 4)]).length == 5
    g = GridGraph([(r, c) for r in range(3) for c in range(3)])
    assert route(g, [(0, 0), (2, 2), (0, 2)]).length == 5


def test_single_terminal():
    g = GridGraph([(0, 0), (0, 1)])
    assert route(g, [(0, 0)]).length == 1


def test_disconnected():
    g = GridGraph([(0, 0), (0, 2)])
    with pytest.raises(RoutingInfeasible):
        route(g, [(0, 0), (0, 2)])
    with pytest.raises(RoutingInfeasible):
        route(GridGraph([(0, 0), (0, 2), (2, 0)]), [(0, 0), (0, 2), (2, 0)])


def test_against_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(120):
        cells, ts, opt = random_grid_instance(rng)
        got = route(GridGraph(cells), ts)
        assert got.length >= opt
        assert got.length <= 2 * opt
        if len(ts) <= 3:
            assert got.length == opt
        sub = nx.Graph()
        sub.add_nodes_from(got.tiles)
        for a in got.tiles:
            for b in got.tiles:
                if abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1:
                    sub.add_edge(a, b)
        assert nx.is_connected(sub)
        assert set(ts) <= got.tiles


def test_exact_despite_detour_outside_envelope():
    # a U-shaped corridor: the only path leaves the terminals' bounding box by 3 rows
    cells = [(0, 0), (0, 2)] + [(r, 0) for r in range(1, 5)] + [(r, 2) for r in range(1, 5)] + [(4, 1)]
    ts = [(0, 0), (0, 2)]
    assert route(GridGraph(cells), ts, slack=0).length == steiner_brute_force(cells, ts)


def test_blocked_nodes_are_not_expanded():
    # two ports adjacent to each other must not be used as a shortcut
    coords = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 2)]
    edges = [((0, 0), (0, 1)), ((0, 1), (0, 2)), ((1, 0), (0, 0)), ((1, 2), (0, 2))]
    g = GridGraph(coords, edges, terminal_only=[(1, 0), (1, 2)])
    p = steiner_tree(g, [(1, 0), (1, 2)])
    assert p.length == 3
    assert (1, 0) in p.nodes and (1, 0) not in p.tiles


@given(st.integers(0, 4))
def test_prune_keeps_terminals(slack):
    g = GridGraph([(r, c) for r in range(5) for c in range(5)])
    keep = prune_candidates(g, [(0, 0), (4, 4), (2, 0), (0, 3)], slack)
    for t in [(0, 0), (4, 4), (2, 0), (0, 3)]:
        assert g.index[t] in keep


@given(st.integers(4, 30), st.integers(0, 2), st.data())
def test_extra_rows_never_lengthen(n, r, data):
    small = LayoutRouter(build_layout(n, 1, r, 0))
    big = LayoutRouter(build_layout(n, 1, r + 1, 0))
    slots = small.layout.slots
    k = data.draw(st.integers(1, min(4, len(slots))))
    picks = data.draw(st.lists(st.sampled_from(range(len(slots))), min_size=k, max_size=k, unique=True))
    terms = [boundary_node(slots[i], "SN") for i in picks]
    terms.append(small.layout.ports[0])
    a = small.route(terms)
    b = big.route(terms)
    if len(terms) <= 3:
        assert b.length <= a.length


def test_router_terminals_and_y():
    lay = minimal_layout(4)
    router = LayoutRouter(lay)
    slot_of = dict(enumerate(lay.slots)).__getitem__
    op = PauliString.from_letters({0: "Z", 1: "Y"}, 4)
    terms = router.terminals(op, slot_of, {q: "Z" for q in range(4)}, port=lay.ports[0])
    assert router.y_node in terms and lay.ports[0] in terms
    path = router.route(terms)
    assert path.length >= 1
    # ports and the Y node never count as ancilla tiles
    assert lay.ports[0] not in path.tiles and router.y_node not in path.tiles


def test_router_rejects_unexposable_letter():
    lay = minimal_layout(4)
    router = LayoutRouter(lay)
    slot_of = dict(enumerate(lay.slots)).__getitem__
    # qubit 1 sits away from the spine: only its north/south pair touches routing
    q = next(i for i, s in enumerate(lay.slots) if not router.has_group(s, "WE"))
    op = PauliString.single(4, q, "X")
    with pytest.raises(RoutingInfeasible):
        router.terminals(op, slot_of, {i: "Z" for i in range(4)})
    assert router.needs_rotation(lay.slots[q], "X", "Z")
    assert not router.needs_rotation(lay.slots[q], "X", "X")
