import io
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collabloc.rigidity import (
    GroundedGraph,
    RigidityDomainError,
    c2_connectivity_gap,
    device_localizable,
    device_localizable_rangediff,
    device_localizable_ranging,
    device_localizable_via_graph,
    independent_edge_count,
    is_redundantly_rigid,
    is_rigid,
    is_three_connected,
    is_triconnected_degree,
    laman_rigid_bruteforce,
    laman_rigid_exhaustive,
    network_localizable,
    read_edge_list,
    two_device_graph,
    write_edge_list,
)
from oracles import laman_by_definition

FIG_A = two_device_graph({0, 1}, {1, 2})
FIG_B = two_device_graph({0, 1}, {2, 3})


def random_graph(rng, max_n=7, min_n=2):
    n = int(rng.integers(min_n, max_n + 1))
    b = int(rng.integers(0, n + 1))
    p = rng.uniform(0.2, 0.9)
    cand = [e for e in itertools.combinations(range(n), 2) if not (e[0] < b and e[1] < b)]
    return GroundedGraph.build(b, n - b, [e for e in cand if rng.random() < p])


@st.composite
def graphs(draw, max_n=7):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_graph(np.random.default_rng(seed), max_n)


def test_triangle_of_anchors():
    g = GroundedGraph.build(3, 0)
    assert is_rigid(g)


def test_lone_device_with_three_anchors():
    g = GroundedGraph.build(3, 1, [(0, 3), (1, 3), (2, 3)])
    assert is_rigid(g)
    assert is_triconnected_degree(g)
    assert is_redundantly_rigid(g)
    assert network_localizable(g)


def test_lone_device_with_one_anchor():
    g = GroundedGraph.build(3, 1, [(0, 3)])
    assert not is_rigid(g)


def test_lone_device_with_two_anchors_flips():
    g = GroundedGraph.build(3, 1, [(0, 3), (1, 3)])
    assert is_rigid(g)
    assert not is_triconnected_degree(g)
    assert not network_localizable(g)


def test_chain_is_not_redundantly_rigid():
    g = GroundedGraph.build(3, 2, [(0, 3), (1, 3), (3, 4), (2, 4)])
    assert not is_redundantly_rigid(g)


def test_anchor_only_graph_meets_degree_condition():
    assert is_triconnected_degree(GroundedGraph.build(4, 0))


@pytest.mark.parametrize("g", [FIG_A, FIG_B], ids=["three_unique", "four_unique"])
def test_smallest_collaborative_scenarios(g):
    assert is_rigid(g)
    assert is_triconnected_degree(g)
    assert is_redundantly_rigid(g)
    assert network_localizable(g)


def test_too_few_anchors_is_a_domain_error():
    with pytest.raises(RigidityDomainError):
        network_localizable(GroundedGraph.build(2, 1, [(0, 2), (1, 2)]))


def test_graph_validation():
    with pytest.raises(ValueError):
        GroundedGraph(3, 0, frozenset({(0, 1), (0, 2)}))
    with pytest.raises(ValueError):
        GroundedGraph(1, 1, frozenset({(1, 1)}))
    with pytest.raises(ValueError):
        GroundedGraph(1, 1, frozenset({(0, 5)}))
    with pytest.raises(ValueError):
        FIG_A.without((0, 1))


def test_edge_list_round_trip():
    text = write_edge_list(FIG_B)
    assert read_edge_list(text) == FIG_B
    buf = io.StringIO()
    write_edge_list(FIG_A, buf)
    assert read_edge_list(io.StringIO(buf.getvalue())) == FIG_A
    sparse = read_edge_list("# comment\n3 1\n0 3  # u hears 0\n1 3\n2 3\n")
    assert sparse == GroundedGraph.build(3, 1, [(0, 3), (1, 3), (2, 3)])
    for bad in ["", "3\n", "3 1\n0 1 2\n"]:
        with pytest.raises(ValueError):
            read_edge_list(bad)


def test_pebble_game_against_edge_subset_enumeration():
    rng = np.random.default_rng(12)
    checked = 0
    while checked < 400:
        g = random_graph(rng, max_n=6)
        assert is_rigid(g) == laman_by_definition(g.n, sorted(g.edges)), write_edge_list(g)
        checked += 1


def test_library_oracles_agree_with_pebble_game():
    rng = np.random.default_rng(13)
    for _ in range(3000):
        g = random_graph(rng)
        assert is_rigid(g) == laman_rigid_bruteforce(g)
    for _ in range(200):
        g = random_graph(rng, max_n=6)
        assert is_rigid(g) == laman_rigid_exhaustive(g)


def test_exhaustive_refuses_large_graphs():
    g = GroundedGraph.build(0, 8, itertools.combinations(range(8), 2))
    with pytest.raises(ValueError):
        laman_rigid_exhaustive(g, limit=1000)


@given(graphs())
def test_independent_edges_bounded(g):
    k = independent_edge_count(g)
    assert k <= min(len(g.edges), max(2 * g.n - 3, 0) if g.n >= 2 else 0)


@given(graphs(), st.data())
def test_adding_an_edge_is_monotone(g, data):
    missing = [e for e in itertools.combinations(range(g.n), 2) if e not in g.edges]
    if not missing:
        return
    h = g.with_edge(data.draw(st.sampled_from(missing)))
    for pred in (is_rigid, is_triconnected_degree, is_redundantly_rigid, is_three_connected):
        assert pred(h) or not pred(g)


def test_degree_condition_can_miss_three_connectivity():
    # two K4s glued at a cut pair: every degree >= 3 but removing 2 vertices disconnects
    edges = [e for e in itertools.combinations(range(4), 2)]
    edges += [e for e in itertools.combinations([2, 3, 4, 5], 2)]
    edges += [(4, 6), (5, 6), (2, 6)]
    g = GroundedGraph.build(0, 7, edges)
    assert is_triconnected_degree(g)
    assert not is_three_connected(g)
    assert c2_connectivity_gap(g)
    assert not c2_connectivity_gap(GroundedGraph.build(4, 0))


@pytest.mark.parametrize("args, expected", [
    ((3, 0, 3, False), True),
    ((2, 2, 2, True), False),
    ((2, 5, 6, True), True),
    ((2, 5, 6, False), False),
    ((1, 5, 6, True), False),
])
def test_ranging_conditions(args, expected):
    assert device_localizable_ranging(*args) is expected


@pytest.mark.parametrize("args, expected", [
    ((4, 0, 4, False), True),
    ((3, 3, 3, True), False),
    ((3, 3, 4, True), True),
])
def test_rangediff_conditions(args, expected):
    assert device_localizable_rangediff(*args) is expected


def test_unique_count_precondition():
    with pytest.raises(ValueError):
        device_localizable_ranging(2, 2, 5, True)


def test_vectorized_predicate():
    n_u = np.array([3, 2, 2, 1])
    n_v = np.array([0, 2, 3, 4])
    uc = np.array([3, 3, 3, 4])
    assert device_localizable(n_u, n_v, uc, True, 2).tolist() == [True, True, True, False]


def _random_scenario(rng):
    n_u, n_v = (int(x) for x in rng.integers(0, 7, 2))
    shared = int(rng.integers(0, min(n_u, n_v) + 1))
    a_u = set(range(n_u))
    a_v = set(range(n_u - shared, n_u - shared + n_v))
    return a_u, a_v, bool(rng.random() < 0.8)


def test_counting_conditions_agree_with_rigidity():
    rng = np.random.default_rng(5)
    mismatches = 0
    for _ in range(10_000):
        a_u, a_v, link = _random_scenario(rng)
        by_count = device_localizable_ranging(len(a_u), len(a_v), len(a_u | a_v), link)
        mismatches += by_count != device_localizable_via_graph(a_u, a_v, link)
    assert mismatches == 0
