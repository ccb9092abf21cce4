import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from eulerimpure.certify import certificate_for, verify_certificate
from eulerimpure.embedding import SurfaceSpec, face_size_multiset, surface_of
from eulerimpure.genus_search import (SearchBudget, SearchError, all_embeddings_satisfy, embeds_on,
                                      enumerate_embeddings, euler_lower_bound, min_euler_genus,
                                      min_euler_genus_of_components, min_nonorientable_genus,
                                      min_orientable_genus)
from eulerimpure.graphcore import Graph, complete_graph, cycle_graph, disjoint_union, from_graph6

from oracles import brute_faces, brute_orientable_genus

S0, S1, S2 = SurfaceSpec(True, 0), SurfaceSpec(True, 1), SurfaceSpec(True, 2)
N1, N2 = SurfaceSpec(False, 1), SurfaceSpec(False, 2)


def k33():
    return Graph(6, [(a, b) for a in range(3) for b in range(3, 6)])


@pytest.mark.parametrize("g, genus", [(complete_graph(4), 0), (complete_graph(5), 1), (k33(), 1),
                                      (cycle_graph(6), 0), (complete_graph(6), 1)])
def test_orientable_genus_small(g, genus):
    res = min_orientable_genus(g)
    assert res.exact and res.genus == genus
    assert surface_of(res.witness) == SurfaceSpec(True, genus)


@pytest.mark.parametrize("g, genus", [(complete_graph(4), 1), (complete_graph(5), 1), (k33(), 1),
                                      (complete_graph(6), 1)])
def test_nonorientable_genus_small(g, genus):
    res = min_nonorientable_genus(g)
    assert res.genus == genus
    assert res.witness is not None and verify_certificate(certificate_for(res.witness))


def test_euler_genus_and_lower_bound():
    assert min_euler_genus(complete_graph(5)).genus == 1
    assert min_euler_genus(complete_graph(4)).genus == 0
    assert euler_lower_bound(complete_graph(7)) == 2
    assert euler_lower_bound(complete_graph(8)) == 4


def test_k5_not_planar_and_k6_on_projective_plane():
    out = embeds_on(complete_graph(5), S0)
    assert out.decision == "not-embeddable" and out.proof is not None
    out = embeds_on(complete_graph(6), N1)
    assert out.embeddable and face_size_multiset(out.witness) == {3: 10}


def test_embeddability_is_monotone_in_the_surface():
    g = complete_graph(6)
    for s, t in [(N1, N2), (S1, N2), (S1, S2), (N2, S2)]:
        if embeds_on(g, s).embeddable:
            assert embeds_on(g, t).embeddable


def test_nonorientable_target_accepts_planar_graph():
    out = embeds_on(cycle_graph(4), N1)
    assert out.embeddable
    assert N1.admits(surface_of(out.witness))


def test_input_checks():
    with pytest.raises(SearchError, match="disconnected"):
        embeds_on(disjoint_union(complete_graph(3), complete_graph(3)), S0)
    assert embeds_on(Graph(1, []), S0).embeddable


def test_budget_exhaustion_reports_unknown():
    out = embeds_on(complete_graph(8), S1, SearchBudget(max_nodes=1))
    assert out.decision in ("unknown", "not-embeddable")
    out = embeds_on(complete_graph(7), N2, SearchBudget(max_nodes=1))
    assert out.decision == "unknown" and out.proof is None
    res = min_orientable_genus(complete_graph(7), SearchBudget(max_nodes=1))
    assert not res.exact


def test_component_additivity():
    g = disjoint_union(complete_graph(5), complete_graph(5))
    assert min_euler_genus_of_components(g) == 2


def test_enumerate_k4_planar_is_unique():
    seen = []
    res = enumerate_embeddings(complete_graph(4), S0, lambda e: seen.append(e))
    assert res.complete and res.count == 1 and len(seen) == 1


def test_enumerate_k5_torus_faces():
    res = enumerate_embeddings(complete_graph(5), S1,
                               lambda e: len(e.faces) != 5)
    assert res.complete and res.count > 0


def test_all_embeddings_satisfy():
    holds = all_embeddings_satisfy(complete_graph(7), S1, lambda e: set(face_size_multiset(e)) == {3})
    assert holds.status == "holds" and holds.checked >= 1
    bad = all_embeddings_satisfy(complete_graph(4), S1, lambda e: 4 in face_size_multiset(e))
    assert bad.status == "counterexample"
    assert 4 not in face_size_multiset(bad.counterexample)
    unknown = all_embeddings_satisfy(complete_graph(7), S1, lambda e: True, SearchBudget(max_nodes=1))
    assert unknown.status == "unknown"


def test_search_is_deterministic():
    a = embeds_on(complete_graph(7), S1).witness
    b = embeds_on(complete_graph(7), S1).witness
    assert a == b


def test_enumeration_count_is_stable():
    g = complete_graph(7).remove_edges([(0, 1)])
    counts = {enumerate_embeddings(g, S1, lambda e: None).count for _ in range(2)}
    assert counts == {180}


def _count_brute(n, edges, genus):
    # labelled rotation systems on the target surface, divided by the mirror pairing
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    choices = [[(a[0],) + p for p in itertools.permutations(a[1:])] if a else [()] for a in adj]
    target = 2 - 2 * genus - n + len(edges)
    hits = 0
    for rot in itertools.product(*choices):
        if brute_faces(n, edges, rot) == target:
            hits += 1
    return hits


def test_enumeration_matches_brute_force_on_k4():
    # K4: 16 labelled rotations; 2 planar (one mirror pair) and 14 toroidal (7 pairs)
    g = complete_graph(4)
    for genus in (0, 1):
        brute = _count_brute(4, g.edges, genus)
        ours = enumerate_embeddings(g, SurfaceSpec(True, genus), lambda e: None).count
        assert ours * 2 == brute


@st.composite
def connected_graphs(draw, max_n=6):
    n = draw(st.integers(2, max_n))
    tree = [(draw(st.integers(0, i - 1)), i) for i in range(1, n)]
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))
    edges = {tuple(sorted(e)) for e in tree + [e for e in extra if e[0] != e[1]]}
    return Graph(n, sorted(edges))


@settings(max_examples=40, deadline=None)
@given(connected_graphs())
def test_genus_matches_networkx_planarity(g):
    planar = nx.check_planarity(nx.Graph(list(g.edges)))[0]
    assert (min_orientable_genus(g).genus == 0) == planar


@settings(max_examples=25, deadline=None)
@given(connected_graphs(max_n=5))
def test_genus_matches_brute_force(g):
    assert min_orientable_genus(g).genus == brute_orientable_genus(g.n, g.edges)


@settings(max_examples=25, deadline=None)
@given(connected_graphs(max_n=6))
def test_euler_genus_sandwich(g):
    eg = min_euler_genus(g).genus
    og = min_orientable_genus(g).genus
    ng = min_nonorientable_genus(g).genus
    assert eg == min(2 * og, ng)
    assert ng <= 2 * og + 1


def test_parallel_witness_equals_serial():
    g = complete_graph(7)
    serial = embeds_on(g, S1, SearchBudget(workers=1))
    parallel = embeds_on(g, S1, SearchBudget(workers=2, split_depth=2))
    assert parallel.witness == serial.witness
    no = embeds_on(g, N2, SearchBudget(workers=2, split_depth=2))
    assert no.decision == "not-embeddable"
