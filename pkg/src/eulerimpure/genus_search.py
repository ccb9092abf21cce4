"""Embeddability decisions, minimum genera and embedding enumeration.

Everything here drives :class:`eulerimpure._engine.FaceSearch`.  A search
either returns a witness embedding (re-classified from scratch before it is
handed out), proves non-embeddability by exhausting the reduced search tree,
or reports ``unknown`` when the budget runs out.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

from ._engine import BudgetExceeded, FaceSearch
from .embedding import (EmbeddingError, RotationEmbedding, SurfaceSpec, faces_incident_to,
                        is_orientable, normalize_signatures, surface_of)
from .graphcore import Graph, norm_edge, to_graph6

Decision = Literal["embeddable", "not-embeddable", "unknown"]

ENV_MAX_NODES = "EULERIMPURE_MAX_NODES"
ENV_TIME_LIMIT = "EULERIMPURE_TIME_LIMIT"
ENV_WORKERS = "EULERIMPURE_WORKERS"


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10**8
    time_limit: float = 60.0
    workers: int = 1
    split_depth: int = 6

    def __post_init__(self):
        if self.max_nodes <= 0 or self.time_limit <= 0 or self.workers <= 0 or self.split_depth <= 0:
            raise ValueError("budget fields must all be positive")

    @classmethod
    def from_env(cls, **overrides) -> "SearchBudget":
        """Defaults, then environment variables, then explicit ``overrides``."""
        vals: dict = {}
        if os.environ.get(ENV_MAX_NODES):
            vals["max_nodes"] = int(float(os.environ[ENV_MAX_NODES]))
        if os.environ.get(ENV_TIME_LIMIT):
            vals["time_limit"] = float(os.environ[ENV_TIME_LIMIT])
        if os.environ.get(ENV_WORKERS):
            vals["workers"] = int(os.environ[ENV_WORKERS])
        vals.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**vals)


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class ExhaustionProof:
    """Record of a completed search that found no admissible embedding."""

    graph6: str
    surface: str
    min_faces: int
    nodes: int
    method: str

    def to_dict(self) -> dict:
        return {"graph6": self.graph6, "surface": self.surface, "min_faces": self.min_faces,
                "nodes": self.nodes, "method": self.method}


@dataclass(frozen=True)
class SearchOutcome:
    decision: Decision
    witness: Optional[RotationEmbedding] = None
    proof: Optional[ExhaustionProof] = None
    nodes: int = 0
    elapsed: float = 0.0

    @property
    def embeddable(self) -> bool:
        return self.decision == "embeddable"


@dataclass(frozen=True)
class GenusResult:
    """``genus`` is exact when ``lower == upper``; otherwise a bracket."""

    genus: Optional[int]
    witness: Optional[RotationEmbedding]
    lower: int
    upper: Optional[int]
    proofs: tuple[ExhaustionProof, ...] = ()

    @property
    def exact(self) -> bool:
        return self.genus is not None


@dataclass
class EnumerationResult:
    count: int
    complete: bool
    stopped: bool
    nodes: int = 0


@dataclass(frozen=True)
class Verdict:
    status: Literal["holds", "counterexample", "unknown"]
    counterexample: Optional[RotationEmbedding] = None
    checked: int = 0


def _check_input(g: Graph) -> None:
    if g.n < 1:
        raise SearchError("graph must have at least one vertex")
    if not g.is_connected():
        raise SearchError("graph is disconnected; search each component")


def required_faces(g: Graph, eg: int) -> int:
    return 2 - g.n + g.m - eg


def euler_lower_bound(g: Graph) -> int:
    """Euler-genus lower bound from faces of length >= 3, clipped at 0."""
    if g.m < 3:
        return 0
    return max(0, math.ceil((g.m - 3 * g.n + 6) / 3))


def _trivial_embedding(g: Graph) -> RotationEmbedding:
    return RotationEmbedding(g, [g.adjacency[v] for v in range(g.n)])


def _twist_to_nonorientable(emb: RotationEmbedding) -> RotationEmbedding:
    """Negate one edge whose sides lie on two faces: Euler genus +1, nonorientable."""
    for u, v in emb.graph.edges:
        if len(faces_incident_to(emb, u, v)) == 2:
            out = RotationEmbedding(emb.graph, emb.rotation, emb.negative ^ {norm_edge(u, v)})
            if not is_orientable(out):
                return normalize_signatures(out)
    return emb


# --------------------------------------------------------------------------
# Search drivers

_Accept = Callable[[RotationEmbedding, int], bool]


def _accept_for(g: Graph, s: SurfaceSpec) -> _Accept:
    k = s.euler_genus
    if s.orientable:
        return lambda emb, faces: True

    def accept(emb: RotationEmbedding, faces: int) -> bool:
        eg = 2 - g.n + g.m - faces
        return eg < k or not is_orientable(emb)
    return accept


def _subtree_worker(args):
    graph, min_faces, orientable, surface, prefix, max_nodes, deadline = args
    accept = _accept_for(graph, surface)
    found: list = []

    def visit(emb, faces):
        if accept(emb, faces):
            found.append(emb)
            return True
        return False

    search = FaceSearch(graph, min_faces, orientable, visit, max_nodes=max_nodes, deadline=deadline)
    try:
        search.run(prefix=prefix)
    except BudgetExceeded:
        return ("unknown", None, search.nodes)
    if found:
        return ("found", (found[0].rotation, sorted(found[0].negative)), search.nodes)
    return ("exhausted", None, search.nodes)


def _run_search(g: Graph, s: SurfaceSpec, budget: SearchBudget):
    """Return (status, witness, nodes) with status in found/exhausted/unknown."""
    min_faces = required_faces(g, s.euler_genus)
    deadline = time.monotonic() + budget.time_limit
    if budget.workers > 1:
        return _run_parallel(g, s, min_faces, budget, deadline)
    accept = _accept_for(g, s)
    found: list = []

    def visit(emb, faces):
        if accept(emb, faces):
            found.append(emb)
            return True
        return False

    search = FaceSearch(g, min_faces, s.orientable, visit,
                        max_nodes=budget.max_nodes, deadline=deadline)
    try:
        search.run()
    except BudgetExceeded:
        return "unknown", None, search.nodes
    if found:
        return "found", found[0], search.nodes
    return "exhausted", None, search.nodes


def _run_parallel(g, s, min_faces, budget, deadline):
    """Split the tree at ``budget.split_depth`` and farm subtrees out in DFS order.

    Results are consumed in that order, so the witness is the one a
    single-worker run would return.
    """
    from multiprocessing import get_context

    accept = _accept_for(g, s)
    order: list = []

    def visit(emb, faces):
        # leaves shallower than the split depth, kept in DFS position
        if accept(emb, faces):
            order.append(("leaf", emb))
        return False

    splitter = FaceSearch(g, min_faces, s.orientable, visit,
                          max_nodes=budget.max_nodes, deadline=deadline)
    splitter._splits_sink = order
    try:
        splitter.run(split_depth=budget.split_depth)
    except BudgetExceeded:
        return "unknown", None, splitter.nodes
    nodes = splitter.nodes
    status = "exhausted"
    ctx = get_context("spawn")
    with ctx.Pool(budget.workers) as pool:
        subtree_jobs = [(g, min_faces, s.orientable, s, item[1], budget.max_nodes, deadline)
                        for item in order if item[0] == "prefix"]
        results = iter(pool.imap(_subtree_worker, subtree_jobs))
        for kind, payload in order:
            if kind == "leaf":
                pool.terminate()
                return "found", payload, nodes
            result, wit, used = next(results)
            nodes += used
            if result == "found":
                pool.terminate()
                rot, neg = wit
                return "found", RotationEmbedding(g, rot, neg), nodes
            if result == "unknown":
                status = "unknown"
    return status, None, nodes


def embeds_on(g: Graph, s: SurfaceSpec, budget: SearchBudget = DEFAULT_BUDGET) -> SearchOutcome:
    """Decide whether ``g`` embeds on ``s``.

    A witness for a nonorientable target may be an orientable embedding of
    smaller Euler genus when twisting cannot make it nonorientable (trees).
    """
    _check_input(g)
    t0 = time.monotonic()
    if g.m == 0:
        return SearchOutcome("embeddable", _trivial_embedding(g), elapsed=0.0)
    min_faces = required_faces(g, s.euler_genus)
    g6 = to_graph6(g) if g.n <= 62 else f"n={g.n},m={g.m}"
    if g.m >= 2 and 3 * min_faces > 2 * g.m:
        proof = ExhaustionProof(g6, s.name, min_faces, 0, "euler-bound: faces of length >= 3")
        return SearchOutcome("not-embeddable", proof=proof, elapsed=time.monotonic() - t0)
    status, witness, nodes = _run_search(g, s, budget)
    elapsed = time.monotonic() - t0
    if status == "unknown":
        return SearchOutcome("unknown", nodes=nodes, elapsed=elapsed)
    if status == "exhausted":
        proof = ExhaustionProof(g6, s.name, min_faces, nodes,
                                "exhaustive face-by-face search; tree signatures +1; mirror excluded")
        return SearchOutcome("not-embeddable", proof=proof, nodes=nodes, elapsed=elapsed)
    witness = normalize_signatures(witness)
    if not s.orientable and is_orientable(witness):
        witness = _twist_to_nonorientable(witness)
    got = surface_of(witness)
    if not s.admits(got):
        raise SearchError(f"search produced a witness on {got}, not admissible for {s}")
    return SearchOutcome("embeddable", witness, nodes=nodes, elapsed=elapsed)


def _sweep(g: Graph, make_surface: Callable[[int], SurfaceSpec], start: int,
           budget: SearchBudget) -> GenusResult:
    _check_input(g)
    deadline = time.monotonic() + budget.time_limit
    proofs = []
    k = start
    while True:
        left = deadline - time.monotonic()
        if left <= 0:
            return GenusResult(None, None, k, None, tuple(proofs))
        sub = SearchBudget(budget.max_nodes, left, budget.workers, budget.split_depth)
        out = embeds_on(g, make_surface(k), sub)
        if out.decision == "embeddable":
            return GenusResult(k, out.witness, k, k, tuple(proofs))
        if out.decision == "unknown":
            return GenusResult(None, None, k, None, tuple(proofs))
        proofs.append(out.proof)
        k += 1


def min_orientable_genus(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> GenusResult:
    start = (euler_lower_bound(g) + 1) // 2
    return _sweep(g, lambda k: SurfaceSpec(True, k), start, budget)


def min_nonorientable_genus(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> GenusResult:
    """Least ``k >= 1`` such that ``g`` embeds on the nonorientable surface of genus ``k``."""
    start = max(1, euler_lower_bound(g))
    return _sweep(g, lambda k: SurfaceSpec(False, k), start, budget)


def min_euler_genus(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> GenusResult:
    """``min(2 * orientable genus, nonorientable genus)``.

    Computed by one sweep over Euler genus ``k`` accepting any embedding of
    Euler genus <= ``k``, which is the same minimum.
    """
    _check_input(g)
    deadline = time.monotonic() + budget.time_limit
    k = euler_lower_bound(g)
    proofs = []
    if g.m == 0:
        return GenusResult(0, _trivial_embedding(g), 0, 0)
    while True:
        left = deadline - time.monotonic()
        if left <= 0:
            return GenusResult(None, None, k, None, tuple(proofs))
        found: list = []
        min_faces = required_faces(g, k)
        search = FaceSearch(g, min_faces, False,
                            lambda emb, f: bool(found.append(emb)) or True,
                            max_nodes=budget.max_nodes, deadline=time.monotonic() + left)
        try:
            if not (g.m >= 2 and 3 * min_faces > 2 * g.m):
                search.run()
        except BudgetExceeded:
            return GenusResult(None, None, k, None, tuple(proofs))
        if found:
            w = normalize_signatures(found[0])
            return GenusResult(k, w, k, k, tuple(proofs))
        proofs.append(ExhaustionProof(to_graph6(g), f"euler-genus<={k}", min_faces, search.nodes,
                                      "exhaustive face-by-face search, all signatures"))
        k += 1


def min_euler_genus_of_components(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> int:
    """Sum of component minimum Euler genera (Euler genus is additive on components)."""
    total = 0
    for comp in g.components():
        res = min_euler_genus(g.induced(comp), budget)
        if not res.exact:
            raise SearchError("budget exhausted on a component")
        total += res.genus
    return total


# --------------------------------------------------------------------------
# Enumeration

def enumerate_embeddings(g: Graph, s: SurfaceSpec,
                         visitor: Callable[[RotationEmbedding], object],
                         budget: SearchBudget = DEFAULT_BUDGET) -> EnumerationResult:
    """Call ``visitor`` on every embedding class whose surface is exactly ``s``.

    Classes are rotation systems with BFS-tree signatures fixed to +1 and
    mirror images identified.  A truthy return from ``visitor`` stops.
    """
    _check_input(g)
    target = required_faces(g, s.euler_genus)
    count = 0

    def visit(emb, faces):
        nonlocal count
        if faces != target:
            return False
        if not s.orientable and is_orientable(emb):
            return False
        count += 1
        return bool(visitor(emb))

    if g.m == 0:
        if s.euler_genus != 0:
            return EnumerationResult(0, True, False)
        stop = bool(visitor(_trivial_embedding(g)))
        return EnumerationResult(1, not stop, stop)
    if g.m >= 2 and 3 * target > 2 * g.m:
        return EnumerationResult(0, True, False)
    search = FaceSearch(g, target, s.orientable, visit, max_nodes=budget.max_nodes,
                        deadline=time.monotonic() + budget.time_limit)
    try:
        search.run()
    except BudgetExceeded:
        return EnumerationResult(count, False, False, search.nodes)
    return EnumerationResult(count, not search.stopped, search.stopped, search.nodes)


def all_embeddings_satisfy(g: Graph, s: SurfaceSpec,
                           predicate: Callable[[RotationEmbedding], bool],
                           budget: SearchBudget = DEFAULT_BUDGET) -> Verdict:
    bad: list = []

    def visitor(emb):
        if not predicate(emb):
            bad.append(emb)
            return True
        return False

    res = enumerate_embeddings(g, s, visitor, budget)
    if bad:
        return Verdict("counterexample", bad[0], res.count)
    if not res.complete:
        return Verdict("unknown", None, res.count)
    return Verdict("holds", None, res.count)
