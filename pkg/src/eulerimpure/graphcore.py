"""Simple graphs on dense integer vertex ids, named families, and ingestion.

Vertices are ``0..n-1``.  Edges are stored as sorted ``(u, v)`` pairs with
``u < v`` in a sorted tuple, so two graphs with the same edge set compare
equal and hash identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

Edge = tuple[int, int]

CANONICAL_MAX_N = 10


class GraphError(ValueError):
    """Raised when a graph or graph operation violates simplicity or shape rules."""


class GraphParseError(GraphError):
    """Malformed graph text.  ``position`` is the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[Edge, ...]

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        normed = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u}-{v} has an endpoint outside 0..{n - 1}")
            edge = norm_edge(u, v)
            if edge in normed:
                raise GraphError(f"duplicate edge {edge[0]}-{edge[1]}")
            normed.add(edge)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(sorted(normed)))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbour tuples indexed by vertex."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self.edge_set

    def degree_sequence(self) -> tuple[int, ...]:
        return tuple(sorted((len(a) for a in self.adjacency), reverse=True))

    def add_edges(self, extra: Iterable[Sequence[int]]) -> "Graph":
        return Graph(self.n, list(self.edges) + [tuple(e) for e in extra])

    def remove_edges(self, gone: Iterable[Sequence[int]]) -> "Graph":
        drop = {norm_edge(*e) for e in gone}
        missing = drop - self.edge_set
        if missing:
            raise GraphError(f"edges not present: {sorted(missing)}")
        return Graph(self.n, [e for e in self.edges if e not in drop])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with vertex ``v`` renamed ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabelling must be a permutation of 0..n-1")
        return Graph(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph, relabelled to ``0..k-1`` in increasing vertex order."""
        vs = sorted(set(vertices))
        index = {v: i for i, v in enumerate(vs)}
        return Graph(len(vs), [(index[u], index[v]) for u, v in self.edges
                               if u in index and v in index])

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.adjacency[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2


def disjoint_union(g: Graph, h: Graph) -> Graph:
    """``g`` on ``0..g.n-1`` and ``h`` shifted by ``g.n``."""
    off = g.n
    return Graph(g.n + h.n, list(g.edges) + [(u + off, v + off) for u, v in h.edges])


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise GraphError("complete_graph needs n >= 1")
    return Graph(n, combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle_graph needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def non_edges(g: Graph) -> tuple[Edge, ...]:
    es = g.edge_set
    return tuple(e for e in combinations(range(g.n), 2) if e not in es)


# --------------------------------------------------------------------------
# Removal patterns

_PATTERNS = {
    "edge": Graph(2, [(0, 1)]),
    "C5": cycle_graph(5),
    "2K2": Graph(4, [(0, 1), (2, 3)]),
    "K1,2": Graph(3, [(0, 1), (0, 2)]),
    "K1,4": Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)]),
}
PATTERN_NAMES = tuple(_PATTERNS)


def remove_edge_structure(g: Graph, pattern: str, witness: Iterable[Sequence[int]]) -> Graph:
    """Delete ``witness`` from ``g`` after checking it forms ``pattern``.

    ``pattern`` is one of ``edge``, ``C5``, ``2K2``, ``K1,2``, ``K1,4``.
    """
    if pattern not in _PATTERNS:
        raise GraphError(f"unknown pattern {pattern!r}; expected one of {PATTERN_NAMES}")
    wedges = [norm_edge(*e) for e in witness]
    if len(set(wedges)) != len(wedges):
        raise GraphError("witness repeats an edge")
    missing = [e for e in wedges if e not in g.edge_set]
    if missing:
        raise GraphError(f"witness edges not present in graph: {missing}")
    verts = sorted({v for e in wedges for v in e})
    index = {v: i for i, v in enumerate(verts)}
    shape = Graph(len(verts), [(index[u], index[v]) for u, v in wedges])
    want = _PATTERNS[pattern]
    if shape.n != want.n or shape.m != want.m or canonical_form(shape) != canonical_form(want):
        raise GraphError(f"witness does not form the pattern {pattern}")
    return g.remove_edges(wedges)


# --------------------------------------------------------------------------
# Quadrilateral plates: 3-connected planar, outer 4-face 0-1-2-3, rest triangles

def quad_plate_triangles(depth: int) -> list[tuple[int, int, int]]:
    """Interior facial triangles of ``quad_plate(depth)`` as sorted triples.

    Vertex ``5 + k`` is stacked into the lexicographically least interior
    triangle present after ``k`` stacking steps.
    """
    if depth < 0:
        raise GraphError("depth must be >= 0")
    tris = [(0, 1, 4), (0, 3, 4), (1, 2, 4), (2, 3, 4)]
    for k in range(depth):
        s = 5 + k
        a, b, c = min(tris)
        tris.remove((a, b, c))
        tris.extend([(a, b, s), (a, c, s), (b, c, s)])
    return sorted(tris)


def quad_plate_stacking(depth: int) -> list[tuple[int, tuple[int, int, int]]]:
    """The ``(new vertex, host triangle)`` steps that build ``quad_plate(depth)``."""
    tris = [(0, 1, 4), (0, 3, 4), (1, 2, 4), (2, 3, 4)]
    steps = []
    for k in range(depth):
        s = 5 + k
        host = min(tris)
        steps.append((s, host))
        tris.remove(host)
        a, b, c = host
        tris.extend([(a, b, s), (a, c, s), (b, c, s)])
    return steps


def quad_plate(depth: int) -> Graph:
    """4-cycle ``0-1-2-3`` with hub ``4``, then ``depth`` stacked vertices."""
    if depth < 0:
        raise GraphError("depth must be >= 0")
    edges = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4)]
    for s, (a, b, c) in quad_plate_stacking(depth):
        edges += [(a, s), (b, s), (c, s)]
    return Graph(5 + depth, edges)


# --------------------------------------------------------------------------
# Canonical labelling by partition refinement with automorphism pruning

def _refine(adj_sets: list[frozenset[int]], cells: list[list[int]]) -> list[list[int]]:
    """Coarsest equitable refinement; subcell order depends only on counts."""
    cells = [list(c) for c in cells]
    changed = True
    while changed:
        changed = False
        for si in range(len(cells)):
            splitter = set(cells[si])
            out = []
            for cell in cells:
                if len(cell) == 1:
                    out.append(cell)
                    continue
                buckets: dict[int, list[int]] = {}
                for v in cell:
                    buckets.setdefault(len(adj_sets[v] & splitter), []).append(v)
                if len(buckets) == 1:
                    out.append(cell)
                else:
                    changed = True
                    out.extend(buckets[k] for k in sorted(buckets))
            cells = out
            if changed:
                break
    return cells


def canonical_labeling(g: Graph, max_n: int = CANONICAL_MAX_N) -> tuple[int, ...]:
    """Permutation ``perm`` such that ``g.relabel(perm)`` is the canonical representative."""
    if g.n > max_n:
        raise GraphError(f"canonical labelling limited to n <= {max_n}, got n={g.n}")
    n = g.n
    if n == 0:
        return ()
    adj_sets = [frozenset(a) for a in g.adjacency]
    pair_bit = {}
    k = 0
    for j in range(n):
        for i in range(j):
            pair_bit[(i, j)] = 1 << k
            k += 1

    def cert_of(perm: list[int]) -> int:
        c = 0
        for u, v in g.edges:
            a, b = perm[u], perm[v]
            c |= pair_bit[(a, b) if a < b else (b, a)]
        return c

    best: list = [None, None]  # certificate, labelling
    first: list = [None, None]
    gens: list[tuple[int, ...]] = []

    def leaf(cells: list[list[int]]) -> None:
        perm = [0] * n
        for i, c in enumerate(cells):
            perm[c[0]] = i
        cert = cert_of(perm)
        for ref in (first, best):
            if ref[0] is not None and cert == ref[0]:
                inv = [0] * n
                for v, lab in enumerate(ref[1]):
                    inv[lab] = v
                auto = tuple(inv[perm[v]] for v in range(n))
                if any(auto[v] != v for v in range(n)):
                    gens.append(auto)
        if first[0] is None:
            first[0], first[1] = cert, perm
        if best[0] is None or cert > best[0]:
            best[0], best[1] = cert, perm

    def search(cells: list[list[int]], fixed: tuple[int, ...]) -> None:
        cells = _refine(adj_sets, cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            leaf(cells)
            return
        cell = cells[target]
        done: set[int] = set()
        for v in sorted(cell):
            # skip vertices equivalent to an explored one under known automorphisms
            if any(_same_orbit(v, w, gens, fixed) for w in done):
                continue
            done.add(v)
            rest = [w for w in cell if w != v]
            search(cells[:target] + [[v], rest] + cells[target + 1:], fixed + (v,))

    search([list(range(n))], ())
    return tuple(best[1])


def _same_orbit(v: int, w: int, gens: list[tuple[int, ...]], fixed: tuple[int, ...]) -> bool:
    useful = [p for p in gens if all(p[x] == x for x in fixed)]
    if not useful:
        return False
    seen = {w}
    stack = [w]
    while stack:
        x = stack.pop()
        for p in useful:
            y = p[x]
            if y == v:
                return True
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def canonical_graph(g: Graph, max_n: int = CANONICAL_MAX_N) -> Graph:
    return g.relabel(canonical_labeling(g, max_n))


def canonical_form(g: Graph, max_n: int = CANONICAL_MAX_N) -> str:
    """graph6 string of the canonical representative; equal iff isomorphic."""
    return to_graph6(canonical_graph(g, max_n))


# --------------------------------------------------------------------------
# Text formats

def to_graph6(g: Graph) -> str:
    n = g.n
    if n > 62:
        raise GraphError("graph6 writer supports n <= 62")
    bits = []
    es = g.edge_set
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if (i, j) in es else 0)
    while len(bits) % 6:
        bits.append(0)
    out = [chr(n + 63)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k:k + 6]:
            val = (val << 1) | b
        out.append(chr(val + 63))
    return "".join(out)


def from_graph6(text: str) -> Graph:
    s = text.strip()
    offset = len(text) - len(text.lstrip())
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
        offset += len(">>graph6<<")
    if not s:
        raise GraphParseError("empty graph6 string", offset)
    for i, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise GraphParseError(f"invalid graph6 byte {ch!r}", offset + i)
    n = ord(s[0]) - 63
    if n == 63:
        raise GraphParseError("graph6 strings with n > 62 are not supported", offset)
    need = (n * (n - 1) // 2 + 5) // 6
    if len(s) - 1 != need:
        raise GraphParseError(f"expected {need} data bytes for n={n}, found {len(s) - 1}",
                              offset + min(len(s), need + 1))
    bits = []
    for ch in s[1:]:
        val = ord(ch) - 63
        bits.extend((val >> (5 - t)) & 1 for t in range(6))
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return Graph(n, edges)


def to_edge_list(g: Graph) -> str:
    body = " ".join(f"{u}-{v}" for u, v in g.edges)
    return f"{g.n}; {body}".rstrip()


def from_edge_list(text: str) -> Graph:
    head, sep, body = text.partition(";")
    if not sep:
        raise GraphParseError("missing ';' after vertex count", len(text))
    try:
        n = int(head.strip())
    except ValueError:
        raise GraphParseError(f"bad vertex count {head.strip()!r}", 0) from None
    if n < 0:
        raise GraphParseError("negative vertex count", 0)
    edges: list[Edge] = []
    seen: set[Edge] = set()
    pos = len(head) + 1
    for token in body.split():
        at = text.index(token, pos)
        pos = at + len(token)
        u_s, dash, v_s = token.partition("-")
        if not dash or not u_s.isdigit() or not v_s.isdigit():
            raise GraphParseError(f"bad edge token {token!r}", at)
        u, v = int(u_s), int(v_s)
        if u == v:
            raise GraphParseError(f"loop {token!r} violates simplicity", at)
        if u >= n or v >= n:
            raise GraphParseError(f"edge {token!r} has an endpoint >= {n}", at)
        e = norm_edge(u, v)
        if e in seen:
            raise GraphParseError(f"duplicate edge {token!r}", at)
        seen.add(e)
        edges.append(e)
    return Graph(n, edges)


def parse_graph(text: str) -> Graph:
    """Parse either ``"n; u-v u-v ..."`` or a graph6 string."""
    if ";" in text:
        return from_edge_list(text)
    return from_graph6(text)


# --------------------------------------------------------------------------
# Isomorphism classes by edge count

_SPARSE_LEVELS: dict[int, list[frozenset[str]]] = {}


def _sparse_level(n: int, m: int) -> frozenset[str]:
    """Canonical forms of all graphs on ``n`` vertices with ``m`` edges (grown from the empty graph)."""
    levels = _SPARSE_LEVELS.setdefault(n, [frozenset({canonical_form(Graph(n))})])
    while len(levels) <= m:
        nxt = set()
        for code in levels[-1]:
            g = from_graph6(code)
            for e in non_edges(g):
                nxt.add(canonical_form(g.add_edges([e])))
        levels.append(frozenset(nxt))
    return levels[m]


def _complement(g: Graph) -> Graph:
    return Graph(g.n, non_edges(g))


def graph_classes(n: int, m: int, connected: bool = False) -> list[Graph]:
    """One canonical representative per isomorphism class with ``n`` vertices and ``m`` edges.

    Dense levels are produced as complements of sparse ones, so only
    ``min(m, C(n,2) - m)`` augmentation rounds are needed.  Sorted by graph6.
    """
    top = n * (n - 1) // 2
    if not 0 <= m <= top:
        return []
    if m <= top - m:
        graphs = [from_graph6(c) for c in _sparse_level(n, m)]
    else:
        graphs = [canonical_graph(_complement(from_graph6(c))) for c in _sparse_level(n, top - m)]
    if connected:
        graphs = [g for g in graphs if g.is_connected()]
    return sorted(graphs, key=to_graph6)
