"""Gadgets for gluing embedded graphs along faces.

Pieces:

* ``DistinguishedGraph``: a graph with an oriented cycle marked on it.
* ``CylindricalGraph``: a planar graph split into two induced boundary
  cycles; ``make_Tk`` builds the standard one on ``2k`` vertices.
* ``t_join`` / ``t_join_embedding``: connect two distinguished graphs through
  a cylinder, at graph level and at embedding level.
* Hanging ladders ``H_n``, plates ``P`` with an outer 4-face and ``H_n(P)``.
* ``fg`` / ``fg_embedding``: the genus-``g`` family built by joining copies of
  K8 (and one K7-e for odd ``g``) into the quadrilaterals of a hanging ladder.

All embedding-level gluings here work on orientable embeddings with every
signature +1.  Two faces are glued by identifying their boundaries with
opposite traversal directions; at each identified vertex the other side's
rotation segment is spliced into the face corner.  Euler genus adds.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

from .certify import (CertificateError, EmbeddingCertificate, certificate_for, read_certificate,
                      verify_certificate, write_certificate)
from .embedding import (EmbeddingError, RotationEmbedding, SurfaceSpec, euler_genus, is_orientable,
                        mirror, normalize_signatures, relabel_embedding)
from .genus_search import DEFAULT_BUDGET, SearchBudget, embeds_on
from .graphcore import Edge, Graph, GraphError, complete_graph, norm_edge, quad_plate, quad_plate_stacking

ENV_FIXTURE_DIR = "EULERIMPURE_FIXTURE_DIR"


class ConstructionError(ValueError):
    pass


def _check_cycle(g: Graph, cycle: Sequence[int]) -> None:
    if len(cycle) < 3:
        raise ConstructionError("a cycle needs at least 3 vertices")
    if len(set(cycle)) != len(cycle):
        raise ConstructionError(f"cycle {list(cycle)} repeats a vertex")
    k = len(cycle)
    for i in range(k):
        u, v = cycle[i], cycle[(i + 1) % k]
        if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
            raise ConstructionError(f"cycle step {u}-{v} is not an edge")


def _cycle_edges(cycle: Sequence[int]) -> set[Edge]:
    k = len(cycle)
    return {norm_edge(cycle[i], cycle[(i + 1) % k]) for i in range(k)}


@dataclass(frozen=True)
class DistinguishedGraph:
    graph: Graph
    cycle: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cycle", tuple(self.cycle))
        _check_cycle(self.graph, self.cycle)

    def reversed(self) -> "DistinguishedGraph":
        return DistinguishedGraph(self.graph, self.cycle[::-1])


@dataclass(frozen=True)
class CylindricalGraph:
    """Planar graph whose vertices split into two induced boundary cycles.

    ``embedding`` is an optional planar rotation in which both boundaries
    are faces.  Planarity itself is checked by :meth:`verify_planar`.
    """

    graph: Graph
    t1: tuple[int, ...]
    t2: tuple[int, ...]
    embedding: Optional[RotationEmbedding] = None

    def __post_init__(self):
        g = self.graph
        object.__setattr__(self, "t1", tuple(self.t1))
        object.__setattr__(self, "t2", tuple(self.t2))
        _check_cycle(g, self.t1)
        _check_cycle(g, self.t2)
        v1, v2 = set(self.t1), set(self.t2)
        if v1 & v2 or v1 | v2 != set(range(g.n)):
            raise ConstructionError("boundary cycles must partition the vertex set")
        for side, cyc in ((v1, self.t1), (v2, self.t2)):
            inner = {e for e in g.edges if e[0] in side and e[1] in side}
            if inner != _cycle_edges(cyc):
                raise ConstructionError("boundary cycle is not induced")
        if min(g.degree_sequence()) < 3:
            raise ConstructionError("cylindrical graphs have minimum degree 3")

    @property
    def k(self) -> int:
        return len(self.t1)

    def cross_edges(self) -> list[Edge]:
        bound = _cycle_edges(self.t1) | _cycle_edges(self.t2)
        return [e for e in self.graph.edges if e not in bound]

    def planar_embedding(self, budget: SearchBudget = DEFAULT_BUDGET) -> RotationEmbedding:
        if self.embedding is not None:
            return self.embedding
        out = embeds_on(self.graph, SurfaceSpec(True, 0), budget)
        if not out.embeddable:
            raise ConstructionError("cylindrical graph is not planar")
        return out.witness

    def verify_planar(self, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
        """Planar, with both boundaries facial."""
        emb = self.planar_embedding(budget)
        if euler_genus(emb) != 0:
            return False
        try:
            find_face(emb, self.t1)
            find_face(emb, self.t2)
        except ConstructionError:
            return False
        return True


# --------------------------------------------------------------------------
# Face lookup and gluing

def find_face(emb: RotationEmbedding, cycle: Sequence[int]) -> tuple[int, int]:
    """Index of the face bounded by ``cycle``, with +1 if the traced walk reads it forwards.

    Faces are traced from either side, so the sign says nothing about the
    rotation; use :func:`_corner_direction` for that.
    """
    cyc = list(cycle)
    k = len(cyc)
    for idx, f in enumerate(emb.faces):
        vs = list(f.vertices)
        if len(vs) != k:
            continue
        for i in range(k):
            rolled = vs[i:] + vs[:i]
            if rolled == cyc:
                return idx, 1
            if rolled == cyc[::-1]:
                return idx, -1
    raise ConstructionError(f"{cyc} is not a facial cycle")


def _corners_ok(emb: RotationEmbedding, cyc: Sequence[int], d: int) -> bool:
    """Every ``cyc[i+d]`` directly follows ``cyc[i-d]`` in the rotation at ``cyc[i]``."""
    k = len(cyc)
    return all(emb.succ(cyc[i], cyc[(i - d) % k]) == cyc[(i + d) % k] for i in range(k))


def _corner_direction(emb: RotationEmbedding, cyc: Sequence[int]) -> int:
    """+1 if ``cyc`` bounds a face read forward through successor corners, -1 if backward."""
    if _corners_ok(emb, cyc, 1):
        return 1
    if _corners_ok(emb, cyc, -1):
        return -1
    raise ConstructionError(f"{list(cyc)} is not a facial cycle")


def _positive(emb: RotationEmbedding) -> RotationEmbedding:
    if not is_orientable(emb):
        raise ConstructionError("face gluing needs orientable embeddings")
    out = normalize_signatures(emb)
    assert not out.negative
    return out


def glue_along_face(a: RotationEmbedding, cyc_a: Sequence[int], b: RotationEmbedding,
                    cyc_b: Sequence[int], b_map: Sequence[int], n_out: int) -> RotationEmbedding:
    """Identify facial cycle ``cyc_b`` of ``b`` with facial cycle ``cyc_a`` of ``a``.

    ``b_map[v]`` is the result label of ``b``'s vertex ``v``; it must send
    ``cyc_b[i]`` to ``cyc_a[i]`` and everything else to labels ``>= a.graph.n``.
    ``b`` is mirrored when needed so that the two faces are traced in
    opposite directions.  Both faces disappear and Euler genus adds.
    """
    a, b = _positive(a), _positive(b)
    k = len(cyc_a)
    if len(cyc_b) != k:
        raise ConstructionError("glued cycles differ in length")
    if any(b_map[cyc_b[i]] != cyc_a[i] for i in range(k)):
        raise ConstructionError("vertex map does not match the cycles")
    on_b = set(cyc_b)
    a_edges = a.graph.edge_set
    for u, v in b.graph.edges:
        if u in on_b and v in on_b and norm_edge(u, v) not in _cycle_edges(cyc_b) \
                and norm_edge(b_map[u], b_map[v]) in a_edges:
            raise ConstructionError("both pieces have the same chord of the glued cycle")
    dir_a = _corner_direction(a, cyc_a)
    if not _corners_ok(b, cyc_b, -dir_a):
        b = mirror(b)
        if not _corners_ok(b, cyc_b, -dir_a):
            raise ConstructionError(f"{list(cyc_b)} is not a facial cycle")
    rot: list[list[int]] = [list(r) for r in a.rotation] + [[] for _ in range(n_out - a.graph.n)]
    for v in range(b.graph.n):
        if v not in on_b:
            rot[b_map[v]] = [b_map[w] for w in b.rotation[v]]
    for i in range(k):
        x, xb = cyc_a[i], cyc_b[i]
        # the face sits in the corner p -> q at x; b's matching corner runs qb -> pb
        p, q = cyc_a[(i - dir_a) % k], cyc_a[(i + dir_a) % k]
        pb, qb = cyc_b[(i - dir_a) % k], cyc_b[(i + dir_a) % k]
        rb = list(b.rotation[xb])
        j = rb.index(pb)
        seg = []
        for step in range(1, len(rb)):
            w = rb[(j + step) % len(rb)]
            if w == qb:
                break
            seg.append(b_map[w])
        r = rot[x]
        pos = r.index(p)
        rot[x] = r[:pos + 1] + seg + r[pos + 1:]
    edges = set(a.graph.edges)
    for u, v in b.graph.edges:
        edges.add(norm_edge(b_map[u], b_map[v]))
    out = RotationEmbedding(Graph(n_out, edges), rot)
    if euler_genus(out) != euler_genus(a) + euler_genus(b):
        raise EmbeddingError("gluing broke Euler genus additivity")
    return out


# --------------------------------------------------------------------------
# Cylinders and joins

def make_Tk(k: int) -> CylindricalGraph:
    """``a_i = i``, ``b_i = k + i``; cross edges ``a_i b_i`` and ``a_i b_{i-1}``."""
    if k < 3:
        raise ConstructionError("T_k needs k >= 3")
    a = list(range(k))
    b = [k + i for i in range(k)]
    edges = []
    for i in range(k):
        edges += [(a[i], a[(i + 1) % k]), (b[i], b[(i + 1) % k]), (a[i], b[i]), (a[i], b[i - 1])]
    g = Graph(2 * k, edges)
    rot = [()] * (2 * k)
    for i in range(k):
        rot[a[i]] = (a[i - 1], b[i - 1], b[i], a[(i + 1) % k])
        rot[b[i]] = (b[(i + 1) % k], a[(i + 1) % k], a[i], b[i - 1])
    return CylindricalGraph(g, tuple(a), tuple(b), RotationEmbedding(g, rot))


@dataclass(frozen=True)
class JoinedGraph:
    """Result of a join; ``H``'s vertex ``v`` became ``v + offset``."""

    graph: Graph
    offset: int
    t_map: tuple[int, ...]


def _t_map(gc_cycle, hd_cycle, t: CylindricalGraph, offset: int) -> list[int]:
    if len(gc_cycle) != t.k or len(hd_cycle) != len(t.t2):
        raise ConstructionError("cycle lengths do not match the cylinder boundaries")
    tm = [0] * t.graph.n
    for i, v in enumerate(t.t1):
        tm[v] = gc_cycle[i]
    for j, v in enumerate(t.t2):
        tm[v] = hd_cycle[j] + offset
    return tm


def t_join(gc: DistinguishedGraph, hd: DistinguishedGraph, t: CylindricalGraph) -> JoinedGraph:
    """Disjoint union of the two graphs plus the cylinder's cross edges.

    Boundary ``t.t1[i]`` is matched with ``gc.cycle[i]`` and ``t.t2[j]`` with
    ``hd.cycle[j]``; ``hd``'s vertices are shifted by ``gc.graph.n``.
    """
    off = gc.graph.n
    tm = _t_map(gc.cycle, hd.cycle, t, off)
    edges = list(gc.graph.edges) + [(u + off, v + off) for u, v in hd.graph.edges]
    edges += [(tm[u], tm[v]) for u, v in t.cross_edges()]
    return JoinedGraph(Graph(off + hd.graph.n, edges), off, tuple(tm))


def t_join_embedding(emb_g: RotationEmbedding, c: Sequence[int], emb_h: RotationEmbedding,
                     d: Sequence[int], t: CylindricalGraph) -> RotationEmbedding:
    """Embedding of ``t_join`` on Euler genus ``eg(emb_g) + eg(emb_h)``.

    ``c`` and ``d`` must be facial cycles with distinct vertices.  The
    cylinder is glued into ``c``'s face first, then ``emb_h`` (mirrored if
    needed) is glued onto the cylinder's far boundary.  Labels follow
    :func:`t_join`.
    """
    nG, nH, k = emb_g.graph.n, emb_h.graph.n, t.k
    c, d = tuple(c), tuple(d)
    _check_cycle(emb_g.graph, c)
    _check_cycle(emb_h.graph, d)
    find_face(emb_g, c)
    find_face(emb_h, d)
    if len(c) != k or len(d) != len(t.t2):
        raise ConstructionError("cycle lengths do not match the cylinder boundaries")
    t_emb = t.planar_embedding()
    # stage 1: cylinder into G; far boundary gets temporary labels nG..nG+k-1
    tm = [0] * t.graph.n
    for i, v in enumerate(t.t1):
        tm[v] = c[i]
    for j, v in enumerate(t.t2):
        tm[v] = nG + j
    stage = glue_along_face(emb_g, c, t_emb, t.t1, tm, nG + k)
    # stage 2: H onto the far boundary
    rest = [v for v in range(nH) if v not in set(d)]
    hm = [0] * nH
    for j, v in enumerate(d):
        hm[v] = nG + j
    for idx, v in enumerate(rest):
        hm[v] = nG + k + idx
    far = tuple(nG + j for j in range(k))
    joined = glue_along_face(stage, far, emb_h, d, hm, nG + nH)
    perm = list(range(nG)) + [nG + d[j] for j in range(k)] + [nG + v for v in rest]
    return relabel_embedding(joined, perm)


# --------------------------------------------------------------------------
# Ladders and plates

@dataclass(frozen=True)
class PlanarPiece:
    """A planar embedding with designated 4-faces ``quads`` (each a vertex cycle)."""

    graph: Graph
    embedding: RotationEmbedding
    quads: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if euler_genus(self.embedding) != 0:
            raise ConstructionError("piece is not planar")
        for q in self.quads:
            if len(q) != 4:
                raise ConstructionError("designated faces must have length 4")
            find_face(self.embedding, q)


def ladder(n: int) -> Graph:
    """Rails ``x_i = i`` and ``y_i = n + 1 + i`` for ``i = 0..n``, rungs ``x_i y_i``."""
    if n < 1:
        raise ConstructionError("ladder needs n >= 1")
    x = list(range(n + 1))
    y = [n + 1 + i for i in range(n + 1)]
    edges = [(x[i], x[i + 1]) for i in range(n)] + [(y[i], y[i + 1]) for i in range(n)]
    edges += [(x[i], y[i]) for i in range(n + 1)]
    return Graph(2 * n + 2, edges)


def hanging_ladder(n: int) -> PlanarPiece:
    """Ladder plus a dominating hub ``2n + 2``.

    Quads ``X_i = (x_{i-1}, y_{i-1}, y_i, x_i)`` for ``i = 1..n``.
    """
    lad = ladder(n)
    h = 2 * n + 2
    x = list(range(n + 1))
    y = [n + 1 + i for i in range(n + 1)]
    g = Graph(h + 1, list(lad.edges) + [(v, h) for v in range(h)])
    rot: list[tuple[int, ...]] = [()] * (h + 1)
    # x rail along the bottom, y rail on top, hub outside
    for i in range(n + 1):
        xs = ([x[i + 1]] if i < n else []) + [y[i]] + ([x[i - 1]] if i > 0 else []) + [h]
        ys = ([y[i + 1]] if i < n else []) + [h] + ([y[i - 1]] if i > 0 else []) + [x[i]]
        rot[x[i]] = tuple(xs)
        rot[y[i]] = tuple(ys)
    # hub sees the outer cycle x_0..x_n, y_n..y_0 in reverse
    rot[h] = tuple(reversed(x + y[::-1]))
    emb = RotationEmbedding(g, rot)
    quads = tuple((x[i - 1], y[i - 1], y[i], x[i]) for i in range(1, n + 1))
    return PlanarPiece(g, emb, quads)


def _c4_planar() -> RotationEmbedding:
    return RotationEmbedding(Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]), [(1, 3), (0, 2), (1, 3), (0, 2)])


def stack_vertex(emb: RotationEmbedding, face: Sequence[int]) -> RotationEmbedding:
    """Add a new vertex inside the face bounded by ``face``, joined to all its vertices."""
    emb = _positive(emb)
    walk = list(face) if _corner_direction(emb, face) == 1 else list(face)[::-1]
    s = emb.graph.n
    k = len(walk)
    rot = [list(r) for r in emb.rotation] + [[]]
    for i in range(k):
        v, prev = walk[i], walk[i - 1]
        r = rot[v]
        pos = r.index(prev)
        rot[v] = r[:pos + 1] + [s] + r[pos + 1:]
    rot[s] = walk[::-1]
    g = Graph(s + 1, list(emb.graph.edges) + [(v, s) for v in walk])
    return RotationEmbedding(g, rot)


def plate(depth: int) -> PlanarPiece:
    """Planar embedding of ``quad_plate(depth)`` with outer quad ``(0, 1, 2, 3)``."""
    if depth < 0:
        raise ConstructionError("depth must be >= 0")
    emb = stack_vertex(_c4_planar(), (0, 1, 2, 3))
    for s, host in quad_plate_stacking(depth):
        tri = _face_with_vertices(emb, set(host))
        emb = stack_vertex(emb, tri)
        assert emb.graph.n == s + 1
    assert emb.graph == quad_plate(depth)
    return PlanarPiece(emb.graph, emb, ((0, 1, 2, 3),))


def _face_with_vertices(emb: RotationEmbedding, vs: set[int]) -> tuple[int, ...]:
    for f in emb.faces:
        if len(f) == len(vs) and set(f.vertices) == vs:
            return f.vertices
    raise ConstructionError(f"no face on vertices {sorted(vs)}")


def gap_plate(gaps: int) -> PlanarPiece:
    """3-connected plate with outer quad ``(0, 1, 2, 3)`` and ``gaps`` interior 4-faces.

    Nested squares joined by spokes; every band quadrilateral gets a diagonal
    except the first ``gaps``; a hub fills the innermost square.  Any
    gluing that keeps the interior faces adds exactly ``gaps`` to the
    triangulation deficit.
    """
    if gaps < 0:
        raise ConstructionError("gaps must be >= 0")
    layers = max(1, -(-gaps // 4))
    sq = [[4 * r + i for i in range(4)] for r in range(layers + 1)]
    hub = 4 * (layers + 1)
    emb = _c4_planar()
    left = gaps
    for r in range(layers):
        outer = sq[r]
        g_edges = set(emb.graph.edges)
        inner = sq[r + 1]
        g_edges |= {norm_edge(inner[i], inner[(i + 1) % 4]) for i in range(4)}
        g_edges |= {norm_edge(outer[i], inner[i]) for i in range(4)}
        for i in range(4):
            if left > 0:
                left -= 1
            else:
                g_edges.add(norm_edge(outer[i], inner[(i + 1) % 4]))
        emb = _nested_rotation(r + 1, g_edges)
    emb = stack_vertex(emb, tuple(sq[layers]))
    assert emb.graph.n == hub + 1
    return PlanarPiece(emb.graph, emb, ((0, 1, 2, 3),))


def _nested_rotation(depth: int, edges: set[Edge]) -> RotationEmbedding:
    """Rotation for squares ``0..depth`` drawn concentrically, by angle around each vertex."""
    n = 4 * (depth + 1)
    pos = {}
    for r in range(depth + 1):
        rad = 1.0 / (r + 1)
        for i in range(4):
            ang = math.pi / 4 - i * math.pi / 2
            pos[4 * r + i] = (rad * math.cos(ang), rad * math.sin(ang))
    g = Graph(n, edges)
    rot = []
    for v in range(n):
        vx, vy = pos[v]
        rot.append(sorted(g.neighbors(v), key=lambda w: math.atan2(pos[w][1] - vy, pos[w][0] - vx)))
    return RotationEmbedding(g, rot)


def hn_of_p(n: int, p: PlanarPiece) -> PlanarPiece:
    """Glue ``p``'s first designated quad onto ``X_n`` of ``H_n``.

    ``p``'s quad vertices map to ``(x_{n-1}, y_{n-1}, y_n, x_n)``; its other
    vertices follow ``H_n``'s in increasing order.  Quads ``X_1..X_{n-1}``
    remain designated.
    """
    if not p.quads:
        raise ConstructionError("plate needs a designated 4-face")
    outer = p.quads[0]
    if len(outer) != 4:
        raise ConstructionError("plate's designated face is not a 4-face")
    hl = hanging_ladder(n)
    xn = hl.quads[-1]
    nh = hl.graph.n
    others = [v for v in range(p.graph.n) if v not in set(outer)]
    pm = [0] * p.graph.n
    for i, v in enumerate(outer):
        pm[v] = xn[i]
    for idx, v in enumerate(others):
        pm[v] = nh + idx
    emb = glue_along_face(hl.embedding, xn, p.embedding, outer, pm, nh + len(others))
    return PlanarPiece(emb.graph, emb, hl.quads[:-1])


# --------------------------------------------------------------------------
# Fixtures: K8 on the double torus, K7-e on the torus

K8_C4 = (0, 1, 2, 3)
K7E_MISSING = (0, 1)
K7E_Y = (0, 2, 1, 3)


def fixture_dir() -> Optional[Path]:
    d = os.environ.get(ENV_FIXTURE_DIR)
    return Path(d) if d else None


def _relabel_face_first(emb: RotationEmbedding, face: Sequence[int], fixed: dict[int, int]) -> RotationEmbedding:
    """Relabel so ``face[i]`` gets label ``fixed[face[i]]``; other vertices keep relative order."""
    n = emb.graph.n
    perm = [-1] * n
    for v, new in fixed.items():
        perm[v] = new
    free_new = [x for x in range(n) if x not in set(fixed.values())]
    free_old = [v for v in range(n) if perm[v] < 0]
    for v, new in zip(free_old, free_new):
        perm[v] = new
    return relabel_embedding(emb, perm)


def _load_or_build(name: str, build, cache_dir: Optional[Path]) -> EmbeddingCertificate:
    path = cache_dir / f"{name}.cert.json" if cache_dir else None
    if path is not None and path.exists():
        try:
            cert = read_certificate(path)
            if verify_certificate(cert):
                return cert
        except CertificateError:
            pass
    cert = build()
    if path is not None:
        write_certificate(cert, path)
    return cert


def _build_k8(budget: SearchBudget) -> EmbeddingCertificate:
    out = embeds_on(complete_graph(8), SurfaceSpec(True, 2), budget)
    if not out.embeddable:
        raise ConstructionError(f"K8 double-torus search ended {out.decision}")
    emb = out.witness
    quad = next(f.vertices for f in emb.faces if len(f) == 4)
    emb = _relabel_face_first(emb, quad, {v: i for i, v in enumerate(quad)})
    find_face(emb, K8_C4)
    return certificate_for(emb, facial_cycles=[K8_C4], provenance={
        "recipe": "face search for K8 on S2, first 4-face relabelled to 0,1,2,3",
        "search_nodes": out.nodes})


def _build_k7e(budget: SearchBudget) -> EmbeddingCertificate:
    g = complete_graph(7).remove_edges([K7E_MISSING])
    out = embeds_on(g, SurfaceSpec(True, 1), budget)
    if not out.embeddable:
        raise ConstructionError(f"K7-e torus search ended {out.decision}")
    emb = out.witness
    quad = next(f.vertices for f in emb.faces if len(f) == 4)
    i = quad.index(0)
    walk = quad[i:] + quad[:i]
    if walk[2] != 1:
        raise ConstructionError("the 4-face does not hold both ends of the missing edge")
    emb = _relabel_face_first(emb, walk, {0: 0, walk[1]: 2, 1: 1, walk[3]: 3})
    find_face(emb, K7E_Y)
    return certificate_for(emb, facial_cycles=[K7E_Y], provenance={
        "recipe": "face search for K7-e (missing 0-1) on S1, 4-face relabelled to 0,2,1,3",
        "search_nodes": out.nodes})


@lru_cache(maxsize=None)
def _memo_fixture(name: str, cache_key: Optional[str]) -> EmbeddingCertificate:
    build = {"k8_c4": _build_k8, "k7e_y": _build_k7e}[name]
    return _load_or_build(name, lambda: build(DEFAULT_BUDGET), Path(cache_key) if cache_key else None)


def _fixture(name: str, budget: Optional[SearchBudget], cache_dir: Optional[Path]):
    cache_dir = cache_dir if cache_dir is not None else fixture_dir()
    if budget is None:
        cert = _memo_fixture(name, str(cache_dir) if cache_dir else None)
    else:
        build = {"k8_c4": _build_k8, "k7e_y": _build_k7e}[name]
        cert = _load_or_build(name, lambda: build(budget), cache_dir)
    emb = cert.embedding()
    return DistinguishedGraph(emb.graph, cert.facial_cycles[0]), emb


def k8_c4_fixture(budget: Optional[SearchBudget] = None, cache_dir: Optional[Path] = None):
    """K8 on the double torus with ``(0, 1, 2, 3)`` facial."""
    return _fixture("k8_c4", budget, cache_dir)


def k7e_y_fixture(budget: Optional[SearchBudget] = None, cache_dir: Optional[Path] = None):
    """K7 minus edge 0-1 on the torus with ``(0, 2, 1, 3)`` facial."""
    return _fixture("k7e_y", budget, cache_dir)


def fixture_certificate(name: str, cache_dir: Optional[Path] = None) -> EmbeddingCertificate:
    cache_dir = cache_dir if cache_dir is not None else fixture_dir()
    return _memo_fixture(name, str(cache_dir) if cache_dir else None)


# --------------------------------------------------------------------------
# The genus-g family

@dataclass
class _Step:
    kind: str
    cycle: tuple[int, ...]
    offset: int


@dataclass
class FamilyBuild:
    embedding: RotationEmbedding
    steps: list[_Step] = field(default_factory=list)
    base_vertices: int = 0


def _check_genus(g: int) -> None:
    if g < 2:
        raise ConstructionError("the family is defined for g >= 2")


def _build_family(g: int, p: PlanarPiece, cache_dir: Optional[Path] = None) -> FamilyBuild:
    _check_genus(g)
    m = -(-g // 2)
    base = hn_of_p(m + 1, p)
    quads = hanging_ladder(m + 1).quads
    t4 = make_Tk(4)
    emb = base.embedding
    steps = []
    k8 = k8_c4_fixture(cache_dir=cache_dir)
    for i in range(1, g // 2 + 1):
        cyc = quads[i - 1]
        steps.append(_Step("K8", cyc, emb.graph.n))
        emb = t_join_embedding(emb, cyc, k8[1], k8[0].cycle, t4)
    if g % 2:
        k7e = k7e_y_fixture(cache_dir=cache_dir)
        cyc = quads[m - 1]
        steps.append(_Step("K7-e", cyc, emb.graph.n))
        emb = t_join_embedding(emb, cyc, k7e[1], k7e[0].cycle, t4)
    return FamilyBuild(emb, steps, base.graph.n)


def fg(g: int, p: PlanarPiece) -> Graph:
    """Graph of the genus-``g`` family over plate ``p``, built with graph-level joins."""
    _check_genus(g)
    m = -(-g // 2)
    base = hn_of_p(m + 1, p)
    quads = hanging_ladder(m + 1).quads
    t4 = make_Tk(4)
    cur = base.graph
    k8 = DistinguishedGraph(complete_graph(8), K8_C4)
    for i in range(1, g // 2 + 1):
        cur = t_join(DistinguishedGraph(cur, quads[i - 1]), k8, t4).graph
    if g % 2:
        k7e = DistinguishedGraph(complete_graph(7).remove_edges([K7E_MISSING]), K7E_Y)
        cur = t_join(DistinguishedGraph(cur, quads[m - 1]), k7e, t4).graph
    return cur


def fg_embedding(g: int, p: PlanarPiece, cache_dir: Optional[Path] = None,
                 plate_name: str = "custom") -> EmbeddingCertificate:
    """Certificate for an orientable embedding of ``fg(g, p)`` of Euler genus ``2g``."""
    fam = _build_family(g, p, cache_dir)
    emb = fam.embedding
    if emb.graph != fg(g, p):
        raise ConstructionError("embedding-level and graph-level constructions disagree")
    prov = {
        "recipe": f"genus-{g} family over plate {plate_name}",
        "base": f"H_{-(-g // 2) + 1}(P) on vertices 0..{fam.base_vertices - 1}",
        "joins": [{"piece": s.kind, "cycle": list(s.cycle), "offset": s.offset} for s in fam.steps],
    }
    assumptions = [
        "only the existence of this embedding is certified; minimality of its genus is not",
        "a genus lower bound for the joined graph needs each glued 4-cycle of a K8 or K7-e piece to "
        "bound a face whenever its vertices share a face, in every minimum-genus embedding; unchecked",
    ]
    return certificate_for(emb, provenance=prov, assumptions=assumptions)
