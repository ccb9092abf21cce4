"""Embedding certificates: serialize, load and re-verify from scratch.

A certificate stores a graph, a rotation system (per-vertex sequences of edge
ids), the negative edges and a set of claims.  ``verify_certificate`` never
looks at stored face data: it re-traces faces with its own tracer (separate
from :mod:`eulerimpure.embedding`) and re-derives every claim.

On-disk format is JSON with sorted keys, two-space indent, UTF-8 and a
trailing newline, so ``write(read(path))`` reproduces the file byte for byte.
"""

from __future__ import annotations

import json
import os
import tempfile
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from .embedding import (RotationEmbedding, SurfaceSpec, face_size_multiset, k4_quad_faces,
                        surface_of, triangulation_edge_target)
from .graphcore import Edge, Graph, norm_edge

SCHEMA = "eulerimpure-certificate/1"


class CertificateError(ValueError):
    """Raised for unreadable or structurally malformed certificate files."""


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class EmbeddingCertificate:
    n: int
    edges: tuple[Edge, ...]
    rotation: tuple[tuple[int, ...], ...]
    negative_edges: tuple[Edge, ...]
    surface: SurfaceSpec
    face_sizes: dict[int, int]
    deficit: Optional[int] = None
    k4_quad_faces: Optional[tuple[tuple[int, ...], ...]] = None
    facial_cycles: tuple[tuple[int, ...], ...] = ()
    provenance: dict[str, Any] = field(default_factory=dict)
    assumptions: tuple[str, ...] = ()
    schema: str = SCHEMA

    def to_dict(self) -> dict:
        claims: dict[str, Any] = {
            "surface": {"orientable": self.surface.orientable, "genus": self.surface.genus},
            "face_sizes": {str(k): v for k, v in sorted(self.face_sizes.items())},
            "facial_cycles": [list(c) for c in self.facial_cycles],
        }
        if self.deficit is not None:
            claims["deficit"] = self.deficit
        if self.k4_quad_faces is not None:
            claims["k4_quad_faces"] = [list(f) for f in self.k4_quad_faces]
        return {
            "schema": self.schema,
            "graph": {"n": self.n, "edges": [list(e) for e in self.edges]},
            "rotation": [list(r) for r in self.rotation],
            "negative_edges": [list(e) for e in self.negative_edges],
            "claims": claims,
            "provenance": self.provenance,
            "assumptions": list(self.assumptions),
        }

    @classmethod
    def from_dict(cls, data: Any) -> "EmbeddingCertificate":
        try:
            claims = data["claims"]
            surf = claims["surface"]
            return cls(
                n=int(data["graph"]["n"]),
                edges=tuple(tuple(int(x) for x in e) for e in data["graph"]["edges"]),
                rotation=tuple(tuple(int(x) for x in r) for r in data["rotation"]),
                negative_edges=tuple(tuple(int(x) for x in e) for e in data["negative_edges"]),
                surface=SurfaceSpec(bool(surf["orientable"]), int(surf["genus"])),
                face_sizes={int(k): int(v) for k, v in claims["face_sizes"].items()},
                deficit=None if claims.get("deficit") is None else int(claims["deficit"]),
                k4_quad_faces=(None if claims.get("k4_quad_faces") is None
                               else tuple(tuple(int(x) for x in f) for f in claims["k4_quad_faces"])),
                facial_cycles=tuple(tuple(int(x) for x in c) for c in claims.get("facial_cycles", [])),
                provenance=dict(data.get("provenance", {})),
                assumptions=tuple(str(a) for a in data.get("assumptions", [])),
                schema=str(data["schema"]),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise CertificateError(f"malformed certificate: {exc!r}") from exc

    @property
    def graph(self) -> Graph:
        return Graph(self.n, self.edges)

    def embedding(self) -> RotationEmbedding:
        """Rebuild the embedding; raises if the rotation data is inconsistent."""
        rot = [tuple(_other_end(self.edges[e], v) for e in r) for v, r in enumerate(self.rotation)]
        return RotationEmbedding(self.graph, rot, self.negative_edges)


def _other_end(edge: Sequence[int], v: int) -> int:
    return edge[1] if edge[0] == v else edge[0]


def certificate_for(emb: RotationEmbedding, *, provenance: Optional[dict] = None,
                    assumptions: Sequence[str] = (), facial_cycles: Sequence[Sequence[int]] = (),
                    claim_deficit: bool = True, claim_k4: bool = True) -> EmbeddingCertificate:
    """Build a certificate whose claims are computed from ``emb``."""
    g = emb.graph
    index = {e: i for i, e in enumerate(g.edges)}
    rotation = tuple(tuple(index[norm_edge(v, w)] for w in emb.rotation[v]) for v in range(g.n))
    surf = surface_of(emb)
    deficit = None
    if claim_deficit and g.n >= 3:
        deficit = triangulation_edge_target(g.n, surf.euler_genus) - g.m
    k4 = None
    if claim_k4:
        faces = emb.faces
        k4 = tuple(sorted(tuple(sorted(faces[i].vertices)) for i in k4_quad_faces(emb)))
    return EmbeddingCertificate(
        n=g.n, edges=g.edges, rotation=rotation,
        negative_edges=tuple(sorted(emb.negative)), surface=surf,
        face_sizes=face_size_multiset(emb), deficit=deficit, k4_quad_faces=k4,
        facial_cycles=tuple(tuple(c) for c in facial_cycles),
        provenance=dict(provenance or {}), assumptions=tuple(assumptions))


# --------------------------------------------------------------------------
# Verification

def _trace(n: int, edges: Sequence[Edge], rot: list[list[int]], neg: set[Edge]) -> list[list[int]]:
    """Face vertex sequences via orbits on (tail, head, orientation) states.

    Every face appears as two orbits, one per direction; one representative
    of each pair is returned.
    """
    pos = [{w: i for i, w in enumerate(r)} for r in rot]
    seen: set[tuple[int, int, int]] = set()
    faces = []
    for u, v in edges:
        for start in ((u, v, 1), (v, u, 1), (u, v, -1), (v, u, -1)):
            if start in seen:
                continue
            walk = []
            state = start
            while state not in seen:
                seen.add(state)
                a, b, o = state
                walk.append(a)
                o2 = o * (-1 if norm_edge(a, b) in neg else 1)
                r = rot[b]
                step = 1 if o2 == 1 else -1
                c = r[(pos[b][a] + step) % len(r)]
                state = (b, c, o2)
            # mark the reverse orbit as seen
            a0, b0, o0 = start
            rstate = (b0, a0, -o0 * (-1 if norm_edge(a0, b0) in neg else 1))
            while rstate not in seen:
                seen.add(rstate)
                a, b, o = rstate
                o2 = o * (-1 if norm_edge(a, b) in neg else 1)
                r = rot[b]
                step = 1 if o2 == 1 else -1
                c = r[(pos[b][a] + step) % len(r)]
                rstate = (b, c, o2)
            faces.append(walk)
    return faces


def _balanced(n: int, edges: Sequence[Edge], neg: set[Edge]) -> bool:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v in edges:
        s = -1 if (u, v) in neg else 1
        adj[u].append((v, s))
        adj[v].append((u, s))
    lam = [0] * n
    for root in range(n):
        if lam[root]:
            continue
        lam[root] = 1
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, s in adj[x]:
                if not lam[y]:
                    lam[y] = lam[x] * s
                    queue.append(y)
                elif lam[y] != lam[x] * s:
                    return False
    return True


def _connected(n: int, edges: Sequence[Edge]) -> bool:
    if n == 0:
        return False
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def _is_facial(cycle: Sequence[int], faces: list[list[int]]) -> bool:
    k = len(cycle)
    want = list(cycle)
    back = want[::-1]
    for f in faces:
        if len(f) != k:
            continue
        for i in range(k):
            rolled = f[i:] + f[:i]
            if rolled == want or rolled == back:
                return True
    return False


def verify_certificate(cert: EmbeddingCertificate) -> CheckResult:
    """Re-derive every claim; the first failing one is reported."""
    if cert.schema != SCHEMA:
        return CheckResult(False, "schema mismatch")
    n, edges = cert.n, cert.edges
    if n < 1:
        return CheckResult(False, "invalid graph: no vertices")
    seen_edges: set[Edge] = set()
    for e in edges:
        if len(e) != 2 or not all(0 <= x < n for x in e) or e[0] == e[1]:
            return CheckResult(False, f"invalid graph: bad edge {list(e)}")
        key = norm_edge(*e)
        if key in seen_edges:
            return CheckResult(False, f"invalid graph: duplicate edge {list(key)}")
        seen_edges.add(key)
    if len(cert.rotation) != n:
        return CheckResult(False, "rotation not a permutation")
    incident: list[list[int]] = [[] for _ in range(n)]
    for i, (u, v) in enumerate(edges):
        incident[u].append(i)
        incident[v].append(i)
    rot: list[list[int]] = []
    for v, seq in enumerate(cert.rotation):
        if any(not 0 <= e < len(edges) for e in seq):
            return CheckResult(False, "dangling edge id")
        if sorted(seq) != sorted(incident[v]):
            return CheckResult(False, "rotation not a permutation")
        rot.append([_other_end(edges[e], v) for e in seq])
    neg: set[Edge] = set()
    for e in cert.negative_edges:
        if len(e) != 2 or norm_edge(*e) not in seen_edges:
            return CheckResult(False, "dangling negative edge")
        neg.add(norm_edge(*e))
    if not _connected(n, edges):
        return CheckResult(False, "graph not connected")

    faces = _trace(n, [norm_edge(*e) for e in edges], rot, neg) if edges else []
    f = len(faces) if edges else 1
    eg = 2 - n + len(edges) - f
    if eg != cert.surface.euler_genus:
        return CheckResult(False, "euler genus mismatch")
    if _balanced(n, edges, neg) != cert.surface.orientable:
        return CheckResult(False, "orientability mismatch")
    sizes = dict(sorted(Counter(len(w) for w in faces).items()))
    if sizes != dict(sorted(cert.face_sizes.items())):
        return CheckResult(False, "face multiset mismatch")
    if cert.deficit is not None:
        if n < 3 or 3 * (n - 2 + eg) - len(edges) != cert.deficit:
            return CheckResult(False, "deficit mismatch")
    if cert.k4_quad_faces is not None:
        found = []
        for w in faces:
            vs = set(w)
            if len(w) == 4 and len(vs) == 4 and all(
                    norm_edge(a, b) in seen_edges for a in vs for b in vs if a < b):
                found.append(tuple(sorted(vs)))
        if sorted(found) != sorted(tuple(sorted(q)) for q in cert.k4_quad_faces):
            return CheckResult(False, "k4 quad faces mismatch")
    for cyc in cert.facial_cycles:
        if not _is_facial(cyc, faces):
            return CheckResult(False, f"facial cycle not a face: {list(cyc)}")
    return CheckResult(True)


# --------------------------------------------------------------------------
# I/O

def dumps(cert: EmbeddingCertificate) -> str:
    return json.dumps(cert.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str, source: str = "<string>") -> EmbeddingCertificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise CertificateError(f"{source}:1:1: top level must be an object")
    try:
        return EmbeddingCertificate.from_dict(data)
    except CertificateError as exc:
        raise CertificateError(f"{source}: {exc}") from exc


def write_certificate(cert: EmbeddingCertificate, path: os.PathLike | str) -> Path:
    """Atomic write: temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(cert))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_certificate(path: os.PathLike | str) -> EmbeddingCertificate:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CertificateError(f"{path}: {exc}") from exc
    return loads(text, str(path))
