"""Edge-maximality, Euler impurity, impurity and small-n censuses.

A graph is *Euler impure* on a surface when it embeds there, is edge-maximal,
is not complete and has no embedding on that surface that is a
triangulation.  "Does not triangulate" is read off the edge count whenever
the graph is short of the triangulation target; only at deficit zero is an
embedding enumeration needed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Optional

from .certify import certificate_for, write_certificate
from .embedding import RotationEmbedding, SurfaceSpec, face_size_multiset, triangulation_edge_target
from .genus_search import (DEFAULT_BUDGET, ExhaustionProof, SearchBudget, SearchOutcome,
                           all_embeddings_satisfy, embeds_on)
from .graphcore import Edge, Graph, canonical_form, graph_classes, non_edges, to_graph6

IMPURITY_MAX_N = 9
CENSUS_MAX_N = 8


class MaximalityError(ValueError):
    pass


@dataclass(frozen=True)
class MaximalityResult:
    """``status`` is yes/no/unknown.

    For ``yes`` every non-edge has an exhaustion proof in ``blocking``.  For
    ``no`` ``addable`` names an edge and ``addable_witness`` embeds ``g + addable``.
    """

    status: Literal["yes", "no", "unknown"]
    witness: Optional[RotationEmbedding] = None
    blocking: tuple[tuple[Edge, ExhaustionProof], ...] = ()
    addable: Optional[Edge] = None
    addable_witness: Optional[RotationEmbedding] = None
    undecided: tuple[Edge, ...] = ()


@dataclass(frozen=True)
class ImpurityReport:
    graph: Graph
    surface: SurfaceSpec
    edge_maximal: bool
    complete: bool
    triangulates: bool
    deficit: int
    impurity_k: Optional[int] = None
    blocking: tuple[tuple[Edge, ExhaustionProof], ...] = ()
    witness: Optional[RotationEmbedding] = None

    @property
    def euler_impure(self) -> bool:
        return self.edge_maximal and not self.complete and not self.triangulates


@dataclass(frozen=True)
class EulerImpurity:
    status: Literal["yes", "no", "unknown"]
    report: Optional[ImpurityReport] = None
    reason: str = ""


@dataclass(frozen=True)
class ImpurityResult:
    """``k`` is exact when ``exact``; otherwise a lower bound."""

    k: int
    exact: bool
    denser: Optional[Graph] = None
    denser_witness: Optional[RotationEmbedding] = None


@dataclass(frozen=True)
class CensusEntry:
    graph6: str
    verdict: str
    deficit: int
    certificate: Optional[str] = None

    def line(self) -> str:
        return f"{self.graph6}\t{self.verdict}\tdeficit={self.deficit}\t{self.certificate or '-'}"


@dataclass
class CensusResult:
    surface: SurfaceSpec
    n_max: int
    graphs: list[Graph] = field(default_factory=list)
    entries: list[CensusEntry] = field(default_factory=list)
    complete: bool = True
    searches: int = 0

    def report(self) -> str:
        return "".join(e.line() + "\n" for e in self.entries)


def _require_embeddable(g: Graph, s: SurfaceSpec, budget: SearchBudget) -> SearchOutcome:
    out = embeds_on(g, s, budget)
    if out.decision == "not-embeddable":
        raise MaximalityError(f"graph does not embed on {s}")
    return out


def is_edge_maximal(g: Graph, s: SurfaceSpec, budget: SearchBudget = DEFAULT_BUDGET,
                    share_isomorphic: bool = True) -> MaximalityResult:
    """Decide whether no non-edge can be added while staying embeddable on ``s``.

    With ``share_isomorphic`` one search serves every non-edge whose
    supergraph is isomorphic to an earlier one.
    """
    base = _require_embeddable(g, s, budget)
    if base.decision == "unknown":
        return MaximalityResult("unknown")
    cache: dict[str, SearchOutcome] = {}
    blocking = []
    undecided = []
    for e in non_edges(g):
        h = g.add_edges([e])
        key = canonical_form(h) if share_isomorphic and h.n <= 10 else None
        out = cache.get(key) if key else None
        if out is None:
            out = embeds_on(h, s, budget)
            if key:
                cache[key] = out
            if out.decision == "embeddable":
                return MaximalityResult("no", base.witness, addable=e, addable_witness=out.witness)
        if out.decision == "unknown":
            undecided.append(e)
        else:
            blocking.append((e, out.proof))
    if undecided:
        return MaximalityResult("unknown", base.witness, tuple(blocking), undecided=tuple(undecided))
    return MaximalityResult("yes", base.witness, tuple(blocking))


def triangulation_deficit(g: Graph, s: SurfaceSpec) -> int:
    """Edges missing to reach a triangulation of ``s`` on the same vertex count."""
    return triangulation_edge_target(g.n, s.euler_genus) - g.m


def _is_triangulation(emb: RotationEmbedding) -> bool:
    return set(face_size_multiset(emb)) == {3}


def triangulates(g: Graph, s: SurfaceSpec, budget: SearchBudget = DEFAULT_BUDGET) -> Optional[bool]:
    """Whether some embedding of ``g`` on ``s`` is a triangulation; None if undecided."""
    if g.n < 3 or triangulation_deficit(g, s) != 0:
        return False
    verdict = all_embeddings_satisfy(g, s, lambda emb: not _is_triangulation(emb), budget)
    if verdict.status == "unknown":
        return None
    return verdict.status == "counterexample"


def is_euler_impure(g: Graph, s: SurfaceSpec, budget: SearchBudget = DEFAULT_BUDGET,
                    share_isomorphic: bool = True) -> EulerImpurity:
    base = _require_embeddable(g, s, budget)
    if base.decision == "unknown":
        return EulerImpurity("unknown", reason="embeddability undecided within budget")
    deficit = triangulation_deficit(g, s) if g.n >= 3 else 0
    if g.is_complete():
        rep = ImpurityReport(g, s, True, True, deficit == 0, deficit, witness=base.witness)
        return EulerImpurity("no", rep, "complete")
    mx = is_edge_maximal(g, s, budget, share_isomorphic)
    if mx.status == "unknown":
        return EulerImpurity("unknown", reason="edge-maximality undecided within budget")
    if mx.status == "no":
        rep = ImpurityReport(g, s, False, False, False, deficit, witness=base.witness)
        return EulerImpurity("no", rep, f"edge {mx.addable[0]}-{mx.addable[1]} can be added")
    tri = triangulates(g, s, budget)
    if tri is None:
        return EulerImpurity("unknown", reason="triangulation check undecided within budget")
    rep = ImpurityReport(g, s, True, False, tri, deficit, blocking=mx.blocking, witness=mx.witness)
    if tri:
        return EulerImpurity("no", rep, "triangulates")
    return EulerImpurity("yes", rep)


def impurity(g: Graph, s: SurfaceSpec, budget: SearchBudget = DEFAULT_BUDGET) -> ImpurityResult:
    """Largest edge surplus of an ``s``-embeddable graph on the same vertex count.

    Edge counts are scanned downward from the triangulation target; the first
    level holding an embeddable graph decides.  Only connected candidates are
    needed: a disconnected embeddable graph stays embeddable after adding a
    bridge.
    """
    if g.n > IMPURITY_MAX_N:
        raise MaximalityError(f"impurity is limited to n <= {IMPURITY_MAX_N}")
    if g.n < 3:
        return ImpurityResult(0, True)
    _require_embeddable(g, s, budget)
    top = min(triangulation_edge_target(g.n, s.euler_genus), g.n * (g.n - 1) // 2)
    exact = True
    for level in range(top, g.m, -1):
        for h in graph_classes(g.n, level, connected=True):
            out = embeds_on(h, s, budget)
            if out.decision == "embeddable":
                return ImpurityResult(level - g.m, exact, h, out.witness)
            if out.decision == "unknown":
                exact = False
    return ImpurityResult(0, exact)


def _search_job(args):
    g, s, budget = args
    return embeds_on(g, s, budget)


def _cert_name(s: SurfaceSpec, g6: str) -> str:
    return f"{s.name}_{hashlib.sha1(g6.encode()).hexdigest()[:12]}.cert.json"


def census_euler_impure(n_max: int, s: SurfaceSpec, budget: SearchBudget = DEFAULT_BUDGET,
                        cert_dir: Optional[Path] = None,
                        progress: Optional[Callable[[str], None]] = None) -> CensusResult:
    """All Euler impure graphs on ``s`` with at most ``n_max`` vertices, up to isomorphism.

    For each vertex count, connected classes are processed by edge count from
    the top down.  A class with an embeddable one-edge supergraph is itself
    embeddable and not maximal, so it needs no search.  Otherwise it is
    searched, and if it embeds it is edge-maximal.  Once a whole level embeds,
    nothing below it can be maximal and the sweep stops.
    """
    if n_max > CENSUS_MAX_N:
        raise MaximalityError(f"census is limited to n <= {CENSUS_MAX_N}")
    result = CensusResult(s, n_max)
    sub = SearchBudget(budget.max_nodes, budget.time_limit, 1, budget.split_depth)
    for n in range(3, n_max + 1):
        target = triangulation_edge_target(n, s.euler_genus)
        prev_yes: set[str] = set()
        prev_unknown: set[str] = set()
        for m in range(n * (n - 1) // 2, n - 2, -1):
            level = graph_classes(n, m, connected=True)
            yes: set[str] = set()
            unknown: set[str] = set()
            to_search: list[tuple[Graph, str, bool]] = []
            for g in level:
                code = to_graph6(g)
                if m > target:
                    continue
                ups = {canonical_form(g.add_edges([e])) for e in non_edges(g)}
                if ups & prev_yes:
                    yes.add(code)
                    continue
                to_search.append((g, code, bool(ups & prev_unknown)))
            outcomes = _run_level([(g, s, sub) for g, _, _ in to_search], budget.workers)
            result.searches += len(to_search)
            for (g, code, shaky), out in zip(to_search, outcomes):
                if out.decision == "unknown":
                    unknown.add(code)
                    result.complete = False
                    continue
                if out.decision == "not-embeddable":
                    continue
                yes.add(code)
                entry = _classify_maximal(g, code, shaky, out, s, sub, cert_dir, result)
                result.entries.append(entry)
                if progress:
                    progress(entry.line())
            prev_yes, prev_unknown = yes, unknown
            if level and len(yes) == len(level):
                break
    result.graphs.sort(key=to_graph6)
    return result


def _run_level(jobs, workers: int) -> list[SearchOutcome]:
    if workers <= 1 or len(jobs) < 2:
        return [_search_job(j) for j in jobs]
    from multiprocessing import get_context
    with get_context("spawn").Pool(workers) as pool:
        return list(pool.map(_search_job, jobs))


def _classify_maximal(g: Graph, code: str, shaky: bool, out: SearchOutcome, s: SurfaceSpec,
                      budget: SearchBudget, cert_dir: Optional[Path], result: CensusResult) -> CensusEntry:
    deficit = triangulation_deficit(g, s)
    if shaky:
        # some supergraph was undecided, so maximality is not established
        result.complete = False
        return CensusEntry(code, "unknown", deficit)
    if g.is_complete():
        return CensusEntry(code, "complete", deficit)
    tri = triangulates(g, s, budget)
    if tri is None:
        result.complete = False
        return CensusEntry(code, "unknown", deficit)
    if tri:
        return CensusEntry(code, "triangulates", deficit)
    path = None
    if cert_dir is not None:
        cert = certificate_for(out.witness, provenance={"source": "census", "surface": s.name,
                                                        "graph6": code})
        path = str(write_certificate(cert, Path(cert_dir) / _cert_name(s, code)))
    result.graphs.append(g)
    return CensusEntry(code, "euler-impure", deficit, path)
