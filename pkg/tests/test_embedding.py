import random

import pytest
from hypothesis import given, settings, strategies as st

from eulerimpure.embedding import (EmbeddingError, RotationEmbedding, SurfaceSpec, delete_edge,
                                   ensure_4face, euler_genus, face_size_multiset, faces_incident_to,
                                   flip_edge, insert_edge, is_orientable, k4_quad_faces, mirror,
                                   normalize_signatures, reflect_vertex, relabel_embedding, surface_of,
                                   triangulation_edge_target)
from eulerimpure.genus_search import embeds_on
from eulerimpure.graphcore import Graph, complete_graph, cycle_graph


def planar_k4():
    return RotationEmbedding(complete_graph(4), [(1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)])


def test_planar_k4():
    emb = planar_k4()
    assert face_size_multiset(emb) == {3: 4}
    assert euler_genus(emb) == 0
    assert surface_of(emb) == SurfaceSpec(True, 0)


def test_k4_sorted_rotation_is_toroidal():
    emb = RotationEmbedding(complete_graph(4), [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)])
    assert face_size_multiset(emb) == {4: 1, 8: 1}
    assert surface_of(emb) == SurfaceSpec(True, 1)


def test_single_edge_and_twisted_triangle():
    k2 = RotationEmbedding(complete_graph(2), [(1,), (0,)])
    assert face_size_multiset(k2) == {2: 1} and euler_genus(k2) == 0
    tri = RotationEmbedding(cycle_graph(3), [(1, 2), (0, 2), (0, 1)], [(0, 1)])
    assert face_size_multiset(tri) == {6: 1}
    assert surface_of(tri) == SurfaceSpec(False, 1)


def test_rotation_must_be_a_permutation():
    with pytest.raises(EmbeddingError, match="permutation"):
        RotationEmbedding(complete_graph(3), [(1,), (0, 2), (0, 1)])
    with pytest.raises(EmbeddingError, match="non-edges"):
        RotationEmbedding(Graph(3, [(0, 1), (1, 2)]), [(1,), (0, 2), (1,)], [(0, 2)])


@pytest.mark.parametrize("text, eg", [("S0", 0), ("S2", 4), ("N1", 1), ("N3", 3)])
def test_surface_parse(text, eg):
    s = SurfaceSpec.parse(text)
    assert s.euler_genus == eg and s.name == text


@pytest.mark.parametrize("text", ["N0", "T1", "S-1", ""])
def test_surface_parse_rejects(text):
    with pytest.raises((ValueError, EmbeddingError)):
        SurfaceSpec.parse(text)


def test_surface_admits():
    n2 = SurfaceSpec(False, 2)
    assert n2.admits(SurfaceSpec(True, 0)) and n2.admits(SurfaceSpec(False, 1))
    assert not n2.admits(SurfaceSpec(True, 1))
    assert not SurfaceSpec(True, 1).admits(SurfaceSpec(False, 1))


def test_triangulation_target():
    assert triangulation_edge_target(7, 2) == 21
    assert triangulation_edge_target(8, 2) == 24
    with pytest.raises(ValueError):
        triangulation_edge_target(2, 0)


def random_embedding(g, rnd, signed):
    rot = []
    for v in range(g.n):
        nb = list(g.adjacency[v])
        rnd.shuffle(nb)
        rot.append(nb)
    neg = [e for e in g.edges if signed and rnd.random() < 0.3]
    return RotationEmbedding(g, rot, neg)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 7), st.booleans(), st.randoms(use_true_random=False), st.integers(0, 6))
def test_switching_and_mirror_preserve_surface(n, signed, rnd, v):
    emb = random_embedding(complete_graph(n), rnd, signed)
    s = surface_of(emb)
    fs = face_size_multiset(emb)
    v %= n
    for other in (reflect_vertex(emb, v), mirror(emb), normalize_signatures(emb)):
        assert surface_of(other) == s
        assert face_size_multiset(other) == fs
    perm = list(range(n))
    rnd.shuffle(perm)
    assert face_size_multiset(relabel_embedding(emb, perm)) == fs


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 7), st.booleans(), st.randoms(use_true_random=False))
def test_faces_cover_each_edge_side_once(n, signed, rnd):
    emb = random_embedding(complete_graph(n), rnd, signed)
    assert sum(len(f) for f in emb.faces) == 2 * emb.graph.m
    if not emb.negative:
        assert is_orientable(emb)


def _valid_flips(emb):
    out = []
    faces = emb.faces
    for u, v in emb.graph.edges:
        inc = faces_incident_to(emb, u, v)
        if len(inc) != 2:
            continue
        for fi, f in enumerate(faces):
            if fi in inc:
                continue
            cu = [i for i, x in enumerate(f.vertices) if x == u]
            cv = [i for i, x in enumerate(f.vertices) if x == v]
            for i in cu:
                for j in cv:
                    out.append(((u, v), fi, i, j))
    return out


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_flips_preserve_invariants(rnd):
    g = complete_graph(6).remove_edges([(0, 1), (2, 3)])
    emb = random_embedding(g, rnd, rnd.random() < 0.5)
    flips = _valid_flips(emb)
    if not flips:
        return
    uv, fi, i, j = rnd.choice(flips)
    new = flip_edge(emb, uv, fi, i, j)
    assert new.graph == emb.graph
    assert len(new.faces) == len(emb.faces)
    assert euler_genus(new) == euler_genus(emb)
    assert is_orientable(new) == is_orientable(emb)


def test_flip_rejections():
    emb = embeds_on(complete_graph(7), SurfaceSpec(True, 1)).witness
    f0 = emb.faces[0]
    u, v = f0.vertices[0], f0.vertices[1]
    with pytest.raises(EmbeddingError, match="incident"):
        flip_edge(emb, (u, v), 0, 0, 1)
    with pytest.raises(EmbeddingError, match="no face"):
        flip_edge(emb, (u, v), 99, 0, 1)
    with pytest.raises(EmbeddingError, match="not in graph"):
        flip_edge(delete_edge(emb, u, v), (u, v), 0, 0, 1)


def test_insert_and_delete_round_trip():
    emb = embeds_on(complete_graph(7), SurfaceSpec(True, 1)).witness
    u, v = emb.graph.edges[0]
    smaller = delete_edge(emb, u, v)
    assert face_size_multiset(smaller) == {3: 12, 4: 1}
    quad = next(f for f in smaller.faces if len(f) == 4)
    i, j = quad.vertices.index(u), quad.vertices.index(v)
    back = insert_edge(smaller, quad, i, j)
    assert face_size_multiset(back) == {3: 14}


def test_ensure_4face_behaviour():
    k7 = embeds_on(complete_graph(7), SurfaceSpec(True, 1)).witness
    with pytest.raises(EmbeddingError, match="triangulation"):
        ensure_4face(k7)
    k8 = embeds_on(complete_graph(8), SurfaceSpec(True, 2)).witness
    assert ensure_4face(k8) is k8
    tri = RotationEmbedding(cycle_graph(3), [(1, 2), (0, 2), (0, 1)], [(0, 1)])
    with pytest.raises(EmbeddingError, match="precondition"):
        ensure_4face(tri)


def test_k4_quads_on_k8():
    k8 = embeds_on(complete_graph(8), SurfaceSpec(True, 2)).witness
    assert len(k4_quad_faces(k8)) == 2
