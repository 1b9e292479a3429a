import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparo.benchmarks import random_program
from sparo.layout import minimal_layout
from sparo.mapping import (
    AnnealParams,
    InteractionProfile,
    QubitMap,
    anneal,
    greedy_init,
    map_cost,
    place,
    port_distances,
    profile,
)
from sparo.pauli import PauliRotation, PauliString
from sparo.transpile import PbcProgram, layerize


def brute_cost(prof, layout, lam=1.0):
    n = prof.n_qubits
    return min(map_cost(QubitMap(p), prof, layout, lam) for p in itertools.permutations(range(n)))


def hot_pair_program(n, a, b, reps=20):
    rots = [PauliRotation(PauliString.from_letters({a: "Z", b: "Z"}, n), 1)] * reps
    return layerize(PbcProgram(n, rots, [], [], ()))


def test_profile_counts():
    p = hot_pair_program(4, 0, 3, reps=5)
    prof = profile(p)
    assert prof.participation.tolist() == [5, 0, 0, 5]
    assert prof.cooccurrence[0, 3] == 5 and prof.cooccurrence[3, 0] == 5
    assert prof.weights == (2,) * 5


def test_qubit_map_must_be_bijection():
    with pytest.raises(ValueError):
        QubitMap((0, 0))


def test_hot_pair_ends_adjacent():
    lay = minimal_layout(4)
    prof = profile(hot_pair_program(4, 0, 3))
    worst = QubitMap((0, 1, 2, 3))
    m = anneal(worst, prof, lay, AnnealParams(seed=3))
    a, b = lay.slots[m.slot_of[0]], lay.slots[m.slot_of[3]]
    assert abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1
    assert map_cost(m, prof, lay) == pytest.approx(brute_cost(prof, lay))


def test_zero_profile_cost_zero():
    prof = InteractionProfile(4, np.zeros(4, dtype=np.int64), np.zeros((4, 4), dtype=np.int64))
    lay = minimal_layout(4)
    m = anneal(greedy_init(prof, lay), prof, lay)
    assert map_cost(m, prof, lay) == 0


@given(st.integers(2, 6), st.integers(0, 10_000))
def test_never_worse_than_input(n, seed):
    rng = np.random.default_rng(seed)
    prof = profile(random_program(n, 12, rng))
    lay = minimal_layout(n)
    m0 = QubitMap(tuple(int(i) for i in rng.permutation(n)))
    m = anneal(m0, prof, lay, AnnealParams(iters=300, seed=seed))
    assert map_cost(m, prof, lay) <= map_cost(m0, prof, lay) + 1e-9


def test_within_five_percent_of_permutation_optimum():
    rng = np.random.default_rng(11)
    for trial in range(30):
        n = int(rng.integers(2, 7))
        prof = profile(random_program(n, int(rng.integers(3, 20)), rng))
        lay = minimal_layout(n)
        m = anneal(greedy_init(prof, lay), prof, lay, AnnealParams(seed=trial))
        got = map_cost(m, prof, lay)
        opt = brute_cost(prof, lay)
        assert got <= 1.05 * opt + 1e-9


def test_deterministic():
    rng = np.random.default_rng(2)
    p = random_program(9, 40, rng)
    lay = minimal_layout(9)
    assert place(p, lay, AnnealParams(seed=5)) == place(p, lay, AnnealParams(seed=5))


def test_port_distance_is_positive_and_smallest_near_port():
    lay = minimal_layout(9)
    pd = port_distances(lay)
    assert pd.min() >= 1
    port = lay.ports[0]
    nearest = lay.slots[int(np.argmin(pd))]
    far = lay.slots[int(np.argmax(pd))]
    def manhattan(s):
        return abs(s[0] - port[0]) + abs(s[1] - port[1])
    assert manhattan(nearest) <= manhattan(far)
