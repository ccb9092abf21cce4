import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from eulerimpure.graphcore import (Graph, GraphError, GraphParseError, canonical_form, complete_graph,
                                   cycle_graph, disjoint_union, from_edge_list, from_graph6, graph_classes,
                                   non_edges, parse_graph, quad_plate, quad_plate_triangles,
                                   remove_edge_structure, to_edge_list, to_graph6)

from oracles import brute_isomorphic, reference_graph6


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, chosen)


def test_graph_normalizes_edges():
    g = Graph(3, [(2, 0), (1, 2)])
    assert g.edges == ((0, 2), (1, 2))
    assert g == Graph(3, [(1, 2), (0, 2)])
    assert hash(g) == hash(Graph(3, [(0, 2), (1, 2)]))


@pytest.mark.parametrize("edges, msg", [([(0, 0)], "loop"), ([(0, 3)], "outside"),
                                        ([(0, 1), (1, 0)], "duplicate")])
def test_graph_rejects_bad_edges(edges, msg):
    with pytest.raises(GraphError, match=msg):
        Graph(3, edges)


def test_complete_and_cycle():
    k8 = complete_graph(8)
    assert k8.m == 28 and k8.is_complete()
    assert cycle_graph(5).degree_sequence() == (2,) * 5
    assert non_edges(k8) == ()


def test_k8_minus_c5():
    g = remove_edge_structure(complete_graph(8), "C5", [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    assert g.m == 23
    with pytest.raises(GraphError, match="pattern"):
        remove_edge_structure(complete_graph(8), "C5", [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
    with pytest.raises(GraphError, match="unknown pattern"):
        remove_edge_structure(complete_graph(8), "C6", [])


def test_k7_minus_e_is_unique_up_to_isomorphism():
    forms = {canonical_form(complete_graph(7).remove_edges([e])) for e in complete_graph(7).edges}
    assert len(forms) == 1


@pytest.mark.parametrize("k, triangles", [(0, 4), (1, 6), (3, 10)])
def test_quad_plate(k, triangles):
    p = quad_plate(k)
    assert p.n == 5 + k and p.m == 8 + 3 * k
    assert len(quad_plate_triangles(k)) == triangles
    assert nx.node_connectivity(nx.Graph(list(p.edges))) >= 3
    assert nx.check_planarity(nx.Graph(list(p.edges)))[0]


def test_graph6_known_values():
    assert to_graph6(complete_graph(4)) == "C~"
    assert from_graph6("C~") == complete_graph(4)
    assert from_graph6(">>graph6<<C~") == complete_graph(4)


@given(graphs(max_n=12))
def test_graph6_matches_reference_encoder(g):
    assert to_graph6(g) == reference_graph6(g.n, g.edges)
    assert from_graph6(to_graph6(g)) == g


@given(graphs(max_n=12))
def test_edge_list_round_trip(g):
    assert from_edge_list(to_edge_list(g)) == g
    assert parse_graph(to_edge_list(g)) == g


@pytest.mark.parametrize("text, pos", [("4; 0-1 1-1", 7), ("4; 0-1 0-9", 7), ("4; 0-1 1-0", 7),
                                       ("4; 0-1 x", 7), ("x; 0-1", 0)])
def test_edge_list_errors_carry_position(text, pos):
    with pytest.raises(GraphParseError) as exc:
        from_edge_list(text)
    assert exc.value.position == pos


@pytest.mark.parametrize("text", ["", "C", "C~~", "C\x10"])
def test_graph6_errors(text):
    with pytest.raises(GraphParseError):
        from_graph6(text)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=6), st.randoms(use_true_random=False))
def test_canonical_form_is_relabelling_invariant(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    assert canonical_form(g.relabel(perm)) == canonical_form(g)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=6), graphs(max_n=6))
def test_canonical_form_agrees_with_brute_force_isomorphism(g, h):
    if g.n != h.n:
        h = Graph(g.n, [e for e in h.edges if max(e) < g.n])
    same = canonical_form(g) == canonical_form(h)
    assert same == brute_isomorphic(g.n, g.edges, h.edges)


def test_canonical_form_on_regular_graphs():
    # Petersen graph in two labellings, and a non-isomorphic 3-regular 10-vertex graph
    pet = nx.petersen_graph()
    g1 = Graph(10, list(pet.edges))
    perm = list(range(10))
    random.Random(3).shuffle(perm)
    assert canonical_form(g1) == canonical_form(g1.relabel(perm))
    prism = nx.circular_ladder_graph(5)
    assert canonical_form(Graph(10, list(prism.edges))) != canonical_form(g1)


@pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 2), (4, 6), (5, 21), (6, 112), (7, 853)])
def test_connected_class_counts(n, count):
    # number of connected graphs on n unlabelled vertices
    total = sum(len(graph_classes(n, m, connected=True)) for m in range(n * (n - 1) // 2 + 1))
    assert total == count


def test_components_and_union():
    g = disjoint_union(complete_graph(3), cycle_graph(4))
    assert g.n == 7 and sorted(map(len, g.components())) == [3, 4]
    assert not g.is_connected()
    assert g.induced([3, 4, 5, 6]) == cycle_graph(4)
