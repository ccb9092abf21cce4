"""Backtracking core: build an embedding one facial walk at a time.

Half-edge ``2e`` sits at the smaller endpoint of edge ``e`` and ``2e+1`` at
the larger one.  Rotations are grown as partial successor/predecessor maps
on half-edges; each vertex's partial rotation is a set of disjoint paths,
and a path may only be closed into a cycle once it holds every half-edge of
the vertex.  Signatures of non-tree edges are branched on the first time a
walk needs them.

A walk is traced over departure states ``(h, o)``: leave along half-edge
``h`` with local orientation ``o``.  Each edge has two sides; the state
``(2e, o)`` covers side ``(e, o)`` and ``(2e+1, o)`` covers side
``(e, -o*sig(e))``.

Pruning: every face of a simple connected graph with at least two edges has
length >= 3, so with ``F`` faces closed using ``L`` sides and the open walk
at length ``l`` the final count is at most ``F + 1 + (2E - L - max(l,3))//3``.
"""

from __future__ import annotations

import time
from collections import deque
from typing import Callable, Optional

from .embedding import RotationEmbedding
from .graphcore import Graph


class BudgetExceeded(Exception):
    pass


class FaceSearch:
    """Exhaustive enumeration of signed rotation systems with >= ``min_faces`` faces.

    ``visit(emb, faces)`` is called on every complete system that survives
    the bound; returning ``True`` stops the search.  Symmetry reduction:
    signatures of BFS-tree edges (rooted at a maximum-degree vertex) are
    fixed to +1, and the mirror image is excluded by ordering the two
    rotation neighbours of the root's smallest neighbour.
    """

    def __init__(self, graph: Graph, min_faces: int, orientable: bool,
                 visit: Callable[[RotationEmbedding, int], bool],
                 max_nodes: Optional[int] = None, deadline: Optional[float] = None):
        self.graph = graph
        self.min_faces = min_faces
        self.orientable = orientable
        self.visit = visit
        self.max_nodes = max_nodes
        self.deadline = deadline
        self.nodes = 0
        self.stopped = False

    # -- prefix handling used by the parallel driver ------------------------
    def run(self, prefix: tuple[int, ...] = (), split_depth: Optional[int] = None):
        """Explore the subtree under ``prefix``; with ``split_depth`` collect
        the decision prefixes of that depth instead of descending below it."""
        self._prefix = prefix
        self._split = split_depth
        self._splits: list[tuple[int, ...]] = []
        self._choices: list[int] = []
        self._search()
        return self._splits

    def _search(self) -> None:
        g = self.graph
        n, m = g.n, g.m
        E2 = 2 * m
        min_faces = self.min_faces
        if m == 0:
            return
        hv = [0] * E2
        for e, (u, v) in enumerate(g.edges):
            hv[2 * e] = u
            hv[2 * e + 1] = v
        at: list[list[int]] = [[] for _ in range(n)]
        for h in range(E2):
            at[hv[h]].append(h)
        # neighbour vertex reached along half-edge h
        nb = [hv[h ^ 1] for h in range(E2)]
        deg = [len(a) for a in at]

        succ = [-1] * E2
        pred = [-1] * E2
        end = list(range(E2))
        plen = [1] * E2
        sig = [0] * m
        used = [False] * (2 * m)

        root = max(range(n), key=lambda v: (deg[v], -v))
        seen = [False] * n
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for h in sorted(at[v], key=lambda x: nb[x]):
                w = nb[h]
                if not seen[w]:
                    seen[w] = True
                    sig[h >> 1] = 1
                    queue.append(w)
        if self.orientable:
            sig = [1] * m
        root_h = min(at[root], key=lambda x: nb[x])
        mirror_check = deg[root] >= 3

        if m == 1:
            # K2: one face of length two
            succ[0], pred[0], succ[1], pred[1] = 0, 0, 1, 1
            sig[0] = 1
            self.visit(self._emb(succ, sig, hv, at), 1)
            return

        prefix = self._prefix
        split = self._split
        sink = getattr(self, "_splits_sink", None)
        choices = self._choices
        max_nodes = self.max_nodes
        deadline = self.deadline
        visit = self.visit
        state = {"faces": 0, "closed": 0}

        def tick():
            self.nodes += 1
            if max_nodes is not None and self.nodes > max_nodes:
                raise BudgetExceeded
            if deadline is not None and not (self.nodes & 1023) and time.monotonic() > deadline:
                raise BudgetExceeded

        def branch_range(k: int):
            """Choice indices to try at the next decision point."""
            d = len(choices)
            if d < len(prefix):
                p = prefix[d]
                return (p,) if p < k else ()
            if split is not None and d >= split:
                self._splits.append(tuple(choices))
                if sink is not None:
                    sink.append(("prefix", tuple(choices)))
                return ()
            return range(k)

        def mirror_ok(h: int) -> bool:
            if h != root_h or not mirror_check:
                return True
            s, p = succ[h], pred[h]
            if s < 0 or p < 0:
                return True
            return nb[s] < nb[p]

        def link(a: int, b: int):
            # succ[a] = b; returns undo record or None if forbidden
            ea, eb = end[a], end[b]
            if ea == b:
                # closes a's path into a cycle
                if plen[a] != deg[hv[a]]:
                    return None
                succ[a] = b
                pred[b] = a
                if not (mirror_ok(a) and mirror_ok(b)):
                    succ[a] = -1
                    pred[b] = -1
                    return None
                return (a, b, -1, -1, 0, 0, 0, 0)
            rec = (a, b, ea, eb, end[ea], end[eb], plen[ea], plen[eb])
            total = plen[a] + plen[b]
            succ[a] = b
            pred[b] = a
            end[ea] = eb
            end[eb] = ea
            plen[ea] = total
            plen[eb] = total
            if not (mirror_ok(a) and mirror_ok(b)):
                unlink(rec)
                return None
            return rec

        def unlink(rec) -> None:
            a, b, ea, eb, old_ea, old_eb, pl_ea, pl_eb = rec
            succ[a] = -1
            pred[b] = -1
            if ea >= 0:
                end[eb] = old_eb
                end[ea] = old_ea
                plen[eb] = pl_eb
                plen[ea] = pl_ea

        def side_index(h: int, o: int) -> int:
            e = h >> 1
            if h & 1:
                o = -o * sig[e]
            return 2 * e + (0 if o == 1 else 1)

        def step(h: int, o: int, h0: int, o0: int, length: int) -> None:
            """Leave along h (signature decided) with orientation o."""
            o2 = o * sig[h >> 1]
            t = h ^ 1
            f = succ[t] if o2 == 1 else pred[t]
            if f >= 0:
                arrive(f, o2, h0, o0, length)
                return
            y = hv[t]
            if o2 == 1:
                cands = [x for x in at[y] if pred[x] < 0 and (x != t or deg[y] == 1)]
            else:
                cands = [x for x in at[y] if succ[x] < 0 and (x != t or deg[y] == 1)]
            for idx in branch_range(len(cands)):
                f = cands[idx]
                rec = link(t, f) if o2 == 1 else link(f, t)
                if rec is None:
                    continue
                tick()
                choices.append(idx)
                arrive(f, o2, h0, o0, length)
                choices.pop()
                unlink(rec)
                if self.stopped:
                    return

        def arrive(f: int, o: int, h0: int, o0: int, length: int) -> None:
            """About to leave along f with orientation o."""
            e = f >> 1
            if sig[e] == 0:
                for idx in branch_range(2):
                    sig[e] = 1 if idx == 0 else -1
                    tick()
                    choices.append(idx)
                    arrive2(f, o, h0, o0, length)
                    choices.pop()
                    sig[e] = 0
                    if self.stopped:
                        return
                return
            arrive2(f, o, h0, o0, length)

        def arrive2(f: int, o: int, h0: int, o0: int, length: int) -> None:
            if f == h0 and o == o0:
                faces = state["faces"] + 1
                closed = state["closed"] + length
                if faces + (E2 - closed) // 3 < min_faces:
                    return
                state["faces"], state["closed"] = faces, closed
                if closed == E2:
                    if visit(self._emb(succ, sig, hv, at), faces):
                        self.stopped = True
                else:
                    new_face()
                state["faces"], state["closed"] = faces - 1, closed - length
                return
            s = side_index(f, o)
            if used[s]:
                return
            length += 1
            if state["faces"] + 1 + (E2 - state["closed"] - (length if length > 3 else 3)) // 3 < min_faces:
                return
            used[s] = True
            step(f, o, h0, o0, length)
            used[s] = False

        def start_options():
            """Pick the start state for the next face: prefer a forced first step."""
            best = None
            best_score = None
            for e in range(m):
                s0, s1 = used[2 * e], used[2 * e + 1]
                if s0 and s1:
                    continue
                if sig[e] == 0:
                    if best is None:
                        best = (2 * e, 1)
                        best_score = 1 << 30
                    continue
                for val, free in ((1, not s0), (-1, not s1)):
                    if not free:
                        continue
                    # forward: leave 2e with orientation val
                    o2 = val * sig[e]
                    nxt = succ[2 * e + 1] if o2 == 1 else pred[2 * e + 1]
                    if nxt >= 0:
                        return (2 * e, val)
                    score = deg[hv[2 * e + 1]] - plen[2 * e + 1]
                    # backward: leave 2e+1 with the orientation covering the same side
                    ob = -val * sig[e]
                    o3 = ob * sig[e]
                    nxt = succ[2 * e] if o3 == 1 else pred[2 * e]
                    if nxt >= 0:
                        return (2 * e + 1, ob)
                    score2 = deg[hv[2 * e]] - plen[2 * e]
                    if score2 < score:
                        cand, score = (2 * e + 1, ob), score2
                    else:
                        cand = (2 * e, val)
                    if best_score is None or score < best_score:
                        best, best_score = cand, score
            return best

        def new_face() -> None:
            h0, o0 = start_options()
            s = side_index(h0, o0) if sig[h0 >> 1] else 2 * (h0 >> 1)
            used[s] = True
            if sig[h0 >> 1] == 0:
                for idx in branch_range(2):
                    sig[h0 >> 1] = 1 if idx == 0 else -1
                    tick()
                    choices.append(idx)
                    step(h0, o0, h0, o0, 1)
                    choices.pop()
                    sig[h0 >> 1] = 0
                    if self.stopped:
                        break
            else:
                step(h0, o0, h0, o0, 1)
            used[s] = False

        # First face: arrive at the root along root_h's edge.
        t_root = root_h ^ 1
        h_first = t_root
        e_first = h_first >> 1
        o_first = 1
        s = side_index(h_first, o_first)
        used[s] = True
        assert sig[e_first] == 1
        step(h_first, o_first, h_first, o_first, 1)
        used[s] = False

    def _emb(self, succ, sig, hv, at) -> RotationEmbedding:
        rot = []
        for v, hs in enumerate(at):
            if not hs:
                rot.append(())
                continue
            seq = []
            h = hs[0]
            for _ in range(len(hs)):
                seq.append(hv[h ^ 1])
                h = succ[h]
            rot.append(tuple(seq))
        edges = self.graph.edges
        return RotationEmbedding(self.graph, rot, [edges[e] for e in range(len(sig)) if sig[e] == -1])
