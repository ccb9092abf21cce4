"""Rotation systems with edge signatures, face tracing and edge flips.

A :class:`RotationEmbedding` stores, for every vertex, the cyclic order of its
neighbours, plus the set of edges whose signature is ``-1``.  Since graphs
are simple a neighbour identifies the incident edge.

Face tracing follows the usual rule for signed rotation systems: walking
along an edge flips the current local orientation when the edge is negative,
and at each vertex the next edge is the rotation successor of the arrival
edge (orientation ``+1``) or its predecessor (orientation ``-1``).
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .graphcore import Edge, Graph, GraphError, norm_edge


class EmbeddingError(ValueError):
    """Invalid embedding data or a violated operation precondition."""


@dataclass(frozen=True)
class SurfaceSpec:
    orientable: bool
    genus: int

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if not self.orientable and self.genus < 1:
            raise ValueError("nonorientable genus must be >= 1")

    @property
    def euler_genus(self) -> int:
        return 2 * self.genus if self.orientable else self.genus

    @property
    def name(self) -> str:
        return f"{'S' if self.orientable else 'N'}{self.genus}"

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str) -> "SurfaceSpec":
        """``S<g>`` (orientable genus g) or ``N<k>`` (nonorientable genus k)."""
        t = text.strip()
        if len(t) < 2 or t[0].upper() not in "SN" or not t[1:].isdigit():
            raise ValueError(f"surface must look like S1 or N2, got {text!r}")
        return cls(t[0].upper() == "S", int(t[1:]))

    def admits(self, other: "SurfaceSpec") -> bool:
        """True when a graph embedded on ``other`` also embeds on ``self``."""
        if self.orientable:
            return other.orientable and other.genus <= self.genus
        if other.orientable:
            return other.euler_genus < self.genus
        return other.genus <= self.genus


SPHERE = SurfaceSpec(True, 0)
TORUS = SurfaceSpec(True, 1)
PROJECTIVE_PLANE = SurfaceSpec(False, 1)
KLEIN_BOTTLE = SurfaceSpec(False, 2)


@dataclass(frozen=True)
class FaceWalk:
    """One facial boundary walk.

    ``vertices[i]`` is left towards ``vertices[i + 1]`` (cyclically) and
    ``orientations[i]`` is the local orientation the walk has at
    ``vertices[i]``: the next neighbour is the rotation successor of the
    previous one when it is ``+1`` and the predecessor when it is ``-1``.
    """

    vertices: tuple[int, ...]
    orientations: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def darts(self) -> tuple[tuple[int, int], ...]:
        vs = self.vertices
        return tuple((vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(norm_edge(u, v) for u, v in self.darts)

    def corner(self, i: int) -> tuple[int, int, int]:
        """``(previous, vertex, next)`` at position ``i``."""
        k = len(self.vertices)
        return self.vertices[(i - 1) % k], self.vertices[i % k], self.vertices[(i + 1) % k]


def _rot_start(seq: Sequence[int]) -> tuple[int, ...]:
    if not seq:
        return ()
    k = seq.index(min(seq))
    return tuple(seq[k:]) + tuple(seq[:k])


@dataclass(frozen=True)
class RotationEmbedding:
    graph: Graph
    rotation: tuple[tuple[int, ...], ...]
    negative: frozenset[Edge]

    def __init__(self, graph: Graph, rotation: Sequence[Sequence[int]],
                 negative: Iterable[Sequence[int]] = ()):
        if len(rotation) != graph.n:
            raise EmbeddingError(f"rotation has {len(rotation)} entries for {graph.n} vertices")
        rot = []
        for v, seq in enumerate(rotation):
            seq = tuple(int(w) for w in seq)
            if sorted(seq) != list(graph.adjacency[v]):
                raise EmbeddingError(f"rotation at vertex {v} is not a permutation of its incident edges")
            rot.append(_rot_start(seq))
        neg = frozenset(norm_edge(int(e[0]), int(e[1])) for e in negative)
        stray = neg - graph.edge_set
        if stray:
            raise EmbeddingError(f"signature given for non-edges {sorted(stray)}")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "rotation", tuple(rot))
        object.__setattr__(self, "negative", neg)

    def __repr__(self) -> str:
        return f"RotationEmbedding(n={self.graph.n}, m={self.graph.m}, negative={len(self.negative)})"

    @cached_property
    def _pos(self) -> tuple[dict[int, int], ...]:
        return tuple({w: i for i, w in enumerate(seq)} for seq in self.rotation)

    def sig(self, u: int, v: int) -> int:
        return -1 if norm_edge(u, v) in self.negative else 1

    def succ(self, v: int, w: int) -> int:
        seq = self.rotation[v]
        return seq[(self._pos[v][w] + 1) % len(seq)]

    def pred(self, v: int, w: int) -> int:
        seq = self.rotation[v]
        return seq[(self._pos[v][w] - 1) % len(seq)]

    def turn(self, v: int, w: int, o: int) -> int:
        return self.succ(v, w) if o == 1 else self.pred(v, w)

    @cached_property
    def faces(self) -> tuple[FaceWalk, ...]:
        return _trace(self)


def signature_map(emb: RotationEmbedding) -> dict[Edge, int]:
    return {e: (-1 if e in emb.negative else 1) for e in emb.graph.edges}


# --------------------------------------------------------------------------
# Face tracing and surface classification

def _side(emb: RotationEmbedding, u: int, v: int, o: int) -> tuple[int, int, int]:
    # Departing u towards v with orientation o; the reverse traversal of the
    # same side departs v with orientation -o*sig(uv).
    if u < v:
        return (u, v, o)
    return (v, u, -o * emb.sig(u, v))


def _trace(emb: RotationEmbedding) -> tuple[FaceWalk, ...]:
    g = emb.graph
    used: set[tuple[int, int, int]] = set()
    faces = []
    for (a, b) in g.edges:
        for o0 in (1, -1):
            if (a, b, o0) in used:
                continue
            verts, ors = [], []
            u, v, o = a, b, o0
            while True:
                side = _side(emb, u, v, o)
                if side in used:
                    raise EmbeddingError("face tracing revisited an edge side")
                used.add(side)
                verts.append(u)
                ors.append(o)
                o = o * emb.sig(u, v)
                w = emb.turn(v, u, o)
                u, v = v, w
                if (u, v, o) == (a, b, o0):
                    break
            faces.append(FaceWalk(tuple(verts), tuple(ors)))
    return tuple(faces)


def trace_faces(emb: RotationEmbedding) -> tuple[FaceWalk, ...]:
    """All facial walks, in a deterministic order; their lengths sum to ``2|E|``."""
    return emb.faces


def face_size_multiset(emb: RotationEmbedding) -> dict[int, int]:
    return dict(sorted(Counter(len(f) for f in emb.faces).items()))


def _require_connected(emb: RotationEmbedding) -> None:
    if emb.graph.n == 0:
        raise EmbeddingError("empty graph has no embedding")
    if not emb.graph.is_connected():
        raise EmbeddingError("graph is disconnected; classify each component separately")


def euler_genus(emb: RotationEmbedding) -> int:
    _require_connected(emb)
    g = emb.graph
    nf = len(emb.faces) if g.m else 1
    eg = 2 - g.n + g.m - nf
    if eg < 0:
        raise EmbeddingError(f"negative Euler genus {eg}; embedding data is inconsistent")
    return eg


def _switching(emb: RotationEmbedding) -> list[int]:
    """Vertex signs making BFS-forest edges positive (roots get +1)."""
    g = emb.graph
    s = [0] * g.n
    for root in range(g.n):
        if s[root]:
            continue
        s[root] = 1
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in g.adjacency[v]:
                if not s[w]:
                    s[w] = s[v] * emb.sig(v, w)
                    queue.append(w)
    return s


def is_orientable(emb: RotationEmbedding) -> bool:
    """True iff vertex reflections can make every signature positive."""
    s = _switching(emb)
    return all(s[u] * s[v] == emb.sig(u, v) for u, v in emb.graph.edges)


def surface_of(emb: RotationEmbedding) -> SurfaceSpec:
    eg = euler_genus(emb)
    if is_orientable(emb):
        if eg % 2:
            raise EmbeddingError(f"orientable embedding with odd Euler genus {eg}")
        return SurfaceSpec(True, eg // 2)
    return SurfaceSpec(False, eg)


def reflect_vertex(emb: RotationEmbedding, v: int) -> RotationEmbedding:
    """Reverse the rotation at ``v`` and negate the signatures of its edges."""
    rot = list(emb.rotation)
    rot[v] = tuple(reversed(rot[v]))
    neg = set(emb.negative)
    for w in emb.graph.adjacency[v]:
        neg ^= {norm_edge(v, w)}
    return RotationEmbedding(emb.graph, rot, neg)


def mirror(emb: RotationEmbedding) -> RotationEmbedding:
    """Reverse every rotation; signatures are unchanged."""
    return RotationEmbedding(emb.graph, [tuple(reversed(r)) for r in emb.rotation], emb.negative)


def normalize_signatures(emb: RotationEmbedding) -> RotationEmbedding:
    """Equivalent embedding whose BFS-forest edges are all positive.

    Orientable embeddings come out with no negative edges at all.
    """
    s = _switching(emb)
    rot = [tuple(r) if s[v] == 1 else tuple(reversed(r)) for v, r in enumerate(emb.rotation)]
    neg = [e for e in emb.graph.edges if emb.sig(*e) * s[e[0]] * s[e[1]] == -1]
    return RotationEmbedding(emb.graph, rot, neg)


def relabel_embedding(emb: RotationEmbedding, perm: Sequence[int]) -> RotationEmbedding:
    """Rename vertex ``v`` to ``perm[v]``."""
    g = emb.graph.relabel(perm)
    rot = [()] * g.n
    for v, seq in enumerate(emb.rotation):
        rot[perm[v]] = tuple(perm[w] for w in seq)
    return RotationEmbedding(g, rot, [(perm[u], perm[v]) for u, v in emb.negative])


def validate(emb: RotationEmbedding) -> None:
    """Re-run the structural checks done at construction plus face conservation."""
    RotationEmbedding(emb.graph, emb.rotation, emb.negative)
    total = sum(len(f) for f in emb.faces)
    if total != 2 * emb.graph.m:
        raise EmbeddingError(f"faces cover {total} edge sides, expected {2 * emb.graph.m}")


# --------------------------------------------------------------------------
# Counting helpers

def triangulation_edge_target(n: int, eg: int) -> int:
    """Edge count of a triangulation with ``n`` vertices and Euler genus ``eg``."""
    if n < 3:
        raise ValueError("triangulation target needs n >= 3")
    return 3 * (n - 2 + eg)


def quad_faces_inducing_K4(emb: RotationEmbedding) -> int:
    return len(k4_quad_faces(emb))


def k4_quad_faces(emb: RotationEmbedding) -> list[int]:
    """Indices of 4-faces on four distinct vertices that induce ``K4``."""
    g = emb.graph
    out = []
    for i, f in enumerate(emb.faces):
        vs = f.vertices
        if len(vs) != 4 or len(set(vs)) != 4:
            continue
        if all(g.has_edge(a, b) for k, a in enumerate(vs) for b in vs[k + 1:]):
            out.append(i)
    return out


def consecutive_vertices_distinct(emb: RotationEmbedding, face: FaceWalk) -> bool:
    vs = face.vertices
    k = len(vs)
    return all(len({vs[i], vs[(i + 1) % k], vs[(i + 2) % k]}) == 3 for i in range(k))


# --------------------------------------------------------------------------
# Edge insertion, deletion and flips

def _insert_at_corner(rot: list[list[int]], face: FaceWalk, i: int, new: int) -> None:
    prev, v, nxt = face.corner(i)
    seq = rot[v]
    anchor = prev if face.orientations[i] == 1 else nxt
    seq.insert(seq.index(anchor) + 1, new)


def insert_edge(emb: RotationEmbedding, face: FaceWalk, i: int, j: int) -> RotationEmbedding:
    """Add the chord ``face[i] face[j]`` inside ``face``.

    The new edge gets the signature that keeps it inside the face's disk,
    i.e. the product of the face's local orientations at the two corners.
    """
    u, v = face.vertices[i], face.vertices[j]
    if u == v:
        raise EmbeddingError("chord endpoints coincide")
    if emb.graph.has_edge(u, v):
        raise EmbeddingError(f"edge {u}-{v} already present")
    rot = [list(r) for r in emb.rotation]
    _insert_at_corner(rot, face, i, v)
    _insert_at_corner(rot, face, j, u)
    neg = set(emb.negative)
    if face.orientations[i] * face.orientations[j] == -1:
        neg.add(norm_edge(u, v))
    return RotationEmbedding(emb.graph.add_edges([(u, v)]), rot, neg)


def delete_edge(emb: RotationEmbedding, u: int, v: int) -> RotationEmbedding:
    e = norm_edge(u, v)
    if e not in emb.graph.edge_set:
        raise EmbeddingError(f"edge {u}-{v} not in graph")
    rot = [list(r) for r in emb.rotation]
    rot[u].remove(v)
    rot[v].remove(u)
    return RotationEmbedding(emb.graph.remove_edges([e]), rot, emb.negative - {e})


def faces_incident_to(emb: RotationEmbedding, u: int, v: int) -> list[int]:
    e = norm_edge(u, v)
    return [i for i, f in enumerate(emb.faces) if e in f.edges]


def flip_edge(emb: RotationEmbedding, uv: Sequence[int], target_face: int,
              corner_u: int, corner_v: int) -> RotationEmbedding:
    """Re-embed edge ``uv`` across face number ``target_face`` of ``emb``.

    ``corner_u``/``corner_v`` are positions on that face walk holding ``u``
    and ``v``.  The face must not carry ``uv`` and the two sides of ``uv``
    must lie on different faces, so the surface and face count are kept.
    """
    u, v = int(uv[0]), int(uv[1])
    if not emb.graph.has_edge(u, v):
        raise EmbeddingError(f"edge {u}-{v} not in graph")
    faces = emb.faces
    if not 0 <= target_face < len(faces):
        raise EmbeddingError(f"no face number {target_face}")
    face = faces[target_face]
    k = len(face)
    if not (0 <= corner_u < k and 0 <= corner_v < k):
        raise EmbeddingError("corner index outside the face walk")
    if face.vertices[corner_u] != u or face.vertices[corner_v] != v:
        raise EmbeddingError("corner indices do not reference u and v on the face")
    incident = faces_incident_to(emb, u, v)
    if target_face in incident:
        raise EmbeddingError("target face is incident to the flipped edge")
    if len(incident) != 2:
        raise EmbeddingError("both sides of the edge lie on one face")
    reduced = delete_edge(emb, u, v)
    # Face walks of emb not touching uv survive deletion unchanged.
    return insert_edge(reduced, face, corner_u, corner_v)


def ensure_4face(emb: RotationEmbedding) -> RotationEmbedding:
    """Return an embedding of the same graph and surface having a 4-face.

    Flips the chord ``ux`` across a face of size >= 5 carrying four
    consecutive distinct vertices ``u, v, w, x``; the least such (face,
    position) pair that admits the flip is used.  When no such chord exists,
    any edge is lifted out and re-inserted so that it cuts off a 4-face.
    """
    sizes = [len(f) for f in emb.faces]
    if 4 in sizes:
        return emb
    if max(sizes, default=0) < 4:
        raise EmbeddingError("already a triangulation: no face of size >= 4")
    saw_candidate = False
    for fi, f in enumerate(emb.faces):
        k = len(f)
        if k < 5:
            continue
        vs = f.vertices
        for i in range(k):
            quad = [vs[(i + t) % k] for t in range(4)]
            if len(set(quad)) != 4:
                continue
            saw_candidate = True
            u, x = quad[0], quad[3]
            if not emb.graph.has_edge(u, x):
                continue
            try:
                out = flip_edge(emb, (u, x), fi, i, (i + 3) % k)
            except EmbeddingError:
                continue
            return out
    if not saw_candidate:
        raise EmbeddingError("no face has four consecutive distinct vertices; "
                             "precondition violated (graph would be K3 on a single face)")
    out = _reinsert_for_4face(emb)
    if out is None:
        raise EmbeddingError("no flippable chord across a large face; graph is not edge-maximal")
    return out


def _reinsert_for_4face(emb: RotationEmbedding) -> Optional[RotationEmbedding]:
    # any edge may go: lift it out, then put it back three steps apart on a face
    surf = surface_of(emb)
    nfaces = len(emb.faces)
    for a, b in emb.graph.edges:
        if len(faces_incident_to(emb, a, b)) != 2:
            continue
        reduced = delete_edge(emb, a, b)
        for f in reduced.faces:
            k = len(f)
            if k < 5:
                continue
            vs = f.vertices
            for i in range(k):
                if vs[i] != a:
                    continue
                for j in ((i + 3) % k, (i - 3) % k):
                    if vs[j] != b:
                        continue
                    out = insert_edge(reduced, f, i, j)
                    if len(out.faces) == nfaces and surface_of(out) == surf:
                        return out
    return None


def embedding_from_rotation_map(graph: Graph, rotation: Mapping[int, Sequence[int]],
                                negative: Iterable[Sequence[int]] = ()) -> RotationEmbedding:
    return RotationEmbedding(graph, [rotation[v] for v in range(graph.n)], negative)


__all__ = [
    "EmbeddingError", "FaceWalk", "GraphError", "RotationEmbedding", "SurfaceSpec",
    "SPHERE", "TORUS", "PROJECTIVE_PLANE", "KLEIN_BOTTLE",
    "consecutive_vertices_distinct", "delete_edge", "ensure_4face", "euler_genus",
    "face_size_multiset", "faces_incident_to", "flip_edge", "insert_edge",
    "is_orientable", "k4_quad_faces", "mirror", "normalize_signatures",
    "quad_faces_inducing_K4", "reflect_vertex", "relabel_embedding", "signature_map",
    "surface_of", "trace_faces", "triangulation_edge_target", "validate",
]
