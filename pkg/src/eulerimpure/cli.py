"""Command line front end.

Exit codes: 0 claim holds or witness found, 10 claim fails (counterexample,
non-embeddability proof or invalid certificate), 20 undecided within budget,
2 usage or input error.  The last stdout line is always a ``result:`` line,
or a one-line JSON object with ``--json``.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from .certify import (CertificateError, certificate_for, dumps, read_certificate, verify_certificate,
                      write_certificate)
from .constructions import ConstructionError, fg_embedding, gap_plate, plate
from .embedding import (EmbeddingError, RotationEmbedding, SurfaceSpec, ensure_4face,
                        face_size_multiset, flip_edge)
from .genus_search import (SearchBudget, SearchError, all_embeddings_satisfy, embeds_on,
                           min_euler_genus, min_nonorientable_genus, min_orientable_genus)
from .graphcore import Graph, GraphError, complete_graph, parse_graph
from .maximality import (MaximalityError, census_euler_impure, impurity, is_edge_maximal,
                         is_euler_impure, triangulation_deficit)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILS = 10
EXIT_UNKNOWN = 20


class UsageError(Exception):
    pass


@dataclass
class CommandConfig:
    command: str
    budget: SearchBudget
    json: bool
    verbose: int


@dataclass
class Outcome:
    code: int
    status: str
    fields: dict

    def emit(self, as_json: bool) -> None:
        if as_json:
            print(json.dumps({"status": self.status, "exit": self.code, **self.fields}, sort_keys=True))
        else:
            extra = " ".join(f"{k}={_flat(v)}" for k, v in sorted(self.fields.items()))
            print(f"result: {self.status}" + (f" {extra}" if extra else ""))


def _flat(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


# --------------------------------------------------------------------------
# Argument helpers

_KN = re.compile(r"^K(\d+)(-e)?$")


def load_graph(arg: str) -> Graph:
    """A file holding a graph, ``K<n>`` / ``K<n>-e``, or an inline graph6 / edge list."""
    m = _KN.match(arg)
    if m:
        g = complete_graph(int(m.group(1)))
        return g.remove_edges([(0, 1)]) if m.group(2) else g
    path = Path(arg)
    text = path.read_text(encoding="utf-8").strip() if path.is_file() else arg
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise UsageError(f"no graph in {arg!r}")
    try:
        return parse_graph(lines[0].strip())
    except GraphError as exc:
        raise UsageError(f"cannot parse graph {arg!r}: {exc}") from exc


def _surface(text: str) -> SurfaceSpec:
    try:
        return SurfaceSpec.parse(text)
    except (ValueError, EmbeddingError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text: str) -> int:
    v = int(float(text))
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _edge(text: str) -> tuple[int, int]:
    m = re.match(r"^(\d+)-(\d+)$", text)
    if not m:
        raise argparse.ArgumentTypeError("edge must look like u-v")
    return int(m.group(1)), int(m.group(2))


def _pair(text: str) -> tuple[int, int]:
    m = re.match(r"^(\d+),(\d+)$", text)
    if not m:
        raise argparse.ArgumentTypeError("corners must look like i,j")
    return int(m.group(1)), int(m.group(2))


def _faces_spec(text: str) -> dict[int, int]:
    out = {}
    for part in text.split(","):
        k, _, v = part.partition(":")
        out[int(k)] = int(v)
    return dict(sorted(out.items()))


PREDICATES: dict[str, Callable[[RotationEmbedding], bool]] = {
    "triangulation": lambda e: set(face_size_multiset(e)) == {3},
    "has-4face": lambda e: 4 in face_size_multiset(e),
    "one-quad": lambda e: {k: v for k, v in face_size_multiset(e).items() if k != 3} == {4: 1},
}


def predicate_for(text: str) -> Callable[[RotationEmbedding], bool]:
    """Named predicate, or ``faces=3:16,4:2`` for an exact face-size multiset."""
    if text in PREDICATES:
        return PREDICATES[text]
    if text.startswith("faces="):
        want = _faces_spec(text[len("faces="):])
        return lambda e: face_size_multiset(e) == want
    raise UsageError(f"unknown predicate {text!r}; use one of {sorted(PREDICATES)} or faces=K:N,...")


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# Subcommands

def cmd_genus(args, cfg: CommandConfig) -> Outcome:
    g = load_graph(args.graph)
    runs = {"orientable": min_orientable_genus, "nonorientable": min_nonorientable_genus,
            "euler": min_euler_genus}
    kinds = list(runs) if args.kind == "all" else [args.kind]
    fields: dict = {}
    code = EXIT_OK
    for kind in kinds:
        res = runs[kind](g, cfg.budget)
        if res.exact:
            fields[kind] = res.genus
            if args.emit_cert and kind == kinds[0]:
                write_certificate(certificate_for(res.witness, provenance={"command": "genus", "kind": kind}),
                                  args.emit_cert)
                fields["certificate"] = str(args.emit_cert)
        else:
            fields[kind] = f">={res.lower}"
            code = EXIT_UNKNOWN
    return Outcome(code, "exact" if code == EXIT_OK else "unknown", fields)


def cmd_embeds(args, cfg: CommandConfig) -> Outcome:
    g = load_graph(args.graph)
    out = embeds_on(g, args.surface, cfg.budget)
    fields: dict = {"surface": args.surface.name, "nodes": out.nodes}
    if out.decision == "embeddable":
        fields["faces"] = {str(k): v for k, v in face_size_multiset(out.witness).items()}
        if args.emit_cert:
            cert = certificate_for(out.witness, provenance={"command": "embeds", "surface": args.surface.name})
            write_certificate(cert, args.emit_cert)
            fields["certificate"] = str(args.emit_cert)
        return Outcome(EXIT_OK, "embeddable", fields)
    if out.decision == "not-embeddable":
        if args.emit_proof:
            _write_json(args.emit_proof, out.proof.to_dict())
            fields["proof"] = str(args.emit_proof)
        fields["method"] = out.proof.method
        return Outcome(EXIT_FAILS, "not-embeddable", fields)
    return Outcome(EXIT_UNKNOWN, "unknown", fields)


def cmd_maximal(args, cfg: CommandConfig) -> Outcome:
    g = load_graph(args.graph)
    res = is_edge_maximal(g, args.surface, cfg.budget)
    fields: dict = {"surface": args.surface.name}
    if res.status == "yes":
        fields["blocked_edges"] = len(res.blocking)
        if args.emit_proof:
            _write_json(args.emit_proof, [{"edge": list(e), "proof": p.to_dict()} for e, p in res.blocking])
            fields["proof"] = str(args.emit_proof)
        return Outcome(EXIT_OK, "edge-maximal", fields)
    if res.status == "no":
        fields["addable"] = f"{res.addable[0]}-{res.addable[1]}"
        return Outcome(EXIT_FAILS, "not-maximal", fields)
    fields["undecided"] = [f"{u}-{v}" for u, v in res.undecided]
    return Outcome(EXIT_UNKNOWN, "unknown", fields)


def cmd_impure(args, cfg: CommandConfig) -> Outcome:
    g = load_graph(args.graph)
    res = is_euler_impure(g, args.surface, cfg.budget)
    fields: dict = {"surface": args.surface.name}
    if g.n >= 3:
        fields["deficit"] = triangulation_deficit(g, args.surface)
    if res.status == "yes":
        if args.emit_cert and res.report.witness is not None:
            write_certificate(certificate_for(res.report.witness, provenance={"command": "impure"}),
                              args.emit_cert)
            fields["certificate"] = str(args.emit_cert)
        return Outcome(EXIT_OK, "euler-impure", fields)
    if res.status == "no":
        fields["reason"] = res.reason
        return Outcome(EXIT_FAILS, "not-euler-impure", fields)
    fields["reason"] = res.reason
    return Outcome(EXIT_UNKNOWN, "unknown", fields)


def cmd_impurity(args, cfg: CommandConfig) -> Outcome:
    g = load_graph(args.graph)
    res = impurity(g, args.surface, cfg.budget)
    fields = {"surface": args.surface.name, "k": res.k}
    return Outcome(EXIT_OK if res.exact else EXIT_UNKNOWN, "exact" if res.exact else "lower-bound", fields)


def cmd_census(args, cfg: CommandConfig) -> Outcome:
    progress = (lambda line: print(line, flush=True)) if not cfg.json else None
    res = census_euler_impure(args.nmax, args.surface, cfg.budget, cert_dir=args.cert_dir,
                              progress=progress)
    fields = {"surface": args.surface.name, "nmax": args.nmax,
              "euler_impure": [e.graph6 for e in res.entries if e.verdict == "euler-impure"]}
    return Outcome(EXIT_OK if res.complete else EXIT_UNKNOWN, "complete" if res.complete else "partial", fields)


def cmd_construct(args, cfg: CommandConfig) -> Outcome:
    if args.family != "fg":
        raise UsageError(f"unknown family {args.family!r}")
    if args.gaps is not None:
        piece, name = gap_plate(args.gaps), f"gap_plate({args.gaps})"
    else:
        piece, name = plate(args.plate_depth), f"quad_plate({args.plate_depth})"
    cert = fg_embedding(args.g, piece, plate_name=name)
    fields = {"g": args.g, "plate": name, "n": cert.n, "m": len(cert.edges),
              "surface": cert.surface.name, "deficit": cert.deficit,
              "k4_quads": len(cert.k4_quad_faces or ())}
    if args.emit_cert:
        write_certificate(cert, args.emit_cert)
        fields["certificate"] = str(args.emit_cert)
    return Outcome(EXIT_OK, "constructed", fields)


def cmd_enumerate(args, cfg: CommandConfig) -> Outcome:
    g = load_graph(args.graph)
    pred = predicate_for(args.assert_)
    res = all_embeddings_satisfy(g, args.surface, pred, cfg.budget)
    fields: dict = {"surface": args.surface.name, "predicate": args.assert_, "checked": res.checked}
    if res.status == "holds":
        return Outcome(EXIT_OK, "holds", fields)
    if res.status == "counterexample":
        fields["faces"] = {str(k): v for k, v in face_size_multiset(res.counterexample).items()}
        if args.emit_cert:
            write_certificate(certificate_for(res.counterexample, provenance={"command": "enumerate"}),
                              args.emit_cert)
            fields["certificate"] = str(args.emit_cert)
        return Outcome(EXIT_FAILS, "counterexample", fields)
    return Outcome(EXIT_UNKNOWN, "unknown", fields)


def cmd_verify(args, cfg: CommandConfig) -> Outcome:
    cert = read_certificate(args.cert)
    res = verify_certificate(cert)
    if res.valid:
        return Outcome(EXIT_OK, "valid", {"surface": cert.surface.name})
    return Outcome(EXIT_FAILS, "invalid", {"reason": res.reason})


def _emit_embedding(emb: RotationEmbedding, out: Optional[Path], note: dict) -> dict:
    cert = certificate_for(emb, provenance=note)
    if out:
        write_certificate(cert, out)
        return {"certificate": str(out)}
    sys.stdout.write(dumps(cert))
    return {}


def cmd_flip(args, cfg: CommandConfig) -> Outcome:
    emb = read_certificate(args.cert).embedding()
    before = face_size_multiset(emb)
    new = flip_edge(emb, args.edge, args.face, args.corners[0], args.corners[1])
    fields = {"before": {str(k): v for k, v in before.items()},
              "after": {str(k): v for k, v in face_size_multiset(new).items()}}
    fields.update(_emit_embedding(new, args.out, {"command": "flip", "edge": list(args.edge)}))
    return Outcome(EXIT_OK, "flipped", fields)


def cmd_ensure_4face(args, cfg: CommandConfig) -> Outcome:
    emb = read_certificate(args.cert).embedding()
    new = ensure_4face(emb)
    fields = {"faces": {str(k): v for k, v in face_size_multiset(new).items()}, "changed": new != emb}
    fields.update(_emit_embedding(new, args.out, {"command": "ensure-4face"}))
    return Outcome(EXIT_OK, "has-4face", fields)


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags without clobbering values given earlier
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--json", action="store_true", default=d(False),
                       help="one-line JSON summary on stdout")
        c.add_argument("--max-nodes", type=_positive_int, default=d(None),
                       help="search node budget (default 1e8)")
        c.add_argument("--time-limit", type=_positive_float, default=d(None),
                       help="seconds per search (default 60)")
        c.add_argument("--workers", type=_positive_int, default=d(None),
                       help="parallel search workers (default 1)")
        c.add_argument("-v", "--verbose", action="count", default=d(0))
        return c

    common = flags(True)
    p = argparse.ArgumentParser(prog="eulerimpure", description="Surface embeddings of small graphs.",
                                parents=[flags(False)])
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, fn, helptext, surface=True):
        sp = sub.add_parser(name, help=helptext, parents=[common])
        sp.add_argument("graph", help="file, graph6, 'n; u-v ...' edge list, K<n> or K<n>-e")
        if surface:
            sp.add_argument("--surface", type=_surface, required=True, help="S<g> or N<k>")
        sp.set_defaults(func=fn)
        return sp

    sp = graph_cmd("genus", cmd_genus, "minimum genera", surface=False)
    sp.add_argument("--kind", choices=["orientable", "nonorientable", "euler", "all"], default="all")
    sp.add_argument("--emit-cert", type=Path)
    sp = graph_cmd("embeds", cmd_embeds, "decide embeddability on a surface")
    sp.add_argument("--emit-cert", type=Path)
    sp.add_argument("--emit-proof", type=Path)
    sp = graph_cmd("maximal", cmd_maximal, "edge-maximality on a surface")
    sp.add_argument("--emit-proof", type=Path)
    sp = graph_cmd("impure", cmd_impure, "Euler impurity on a surface")
    sp.add_argument("--emit-cert", type=Path)
    graph_cmd("impurity", cmd_impurity, "edge surplus of the densest embeddable graph")
    sp = graph_cmd("enumerate", cmd_enumerate, "check a predicate on every embedding")
    sp.add_argument("--assert", dest="assert_", required=True,
                    help="triangulation, has-4face, one-quad or faces=K:N,...")
    sp.add_argument("--emit-cert", type=Path)

    sp = sub.add_parser("census", help="Euler impure graphs up to n vertices", parents=[common])
    sp.add_argument("--surface", type=_surface, required=True)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--cert-dir", type=Path)
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("construct", help="build a certified family member", parents=[common])
    sp.add_argument("family", choices=["fg"])
    sp.add_argument("--g", type=int, required=True)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--plate-depth", type=int, default=0)
    group.add_argument("--gaps", type=int, help="use a plate with this many interior 4-faces")
    sp.add_argument("--emit-cert", type=Path)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="re-verify a certificate", parents=[common])
    sp.add_argument("cert", type=Path)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("flip", help="re-embed one edge across another face", parents=[common])
    sp.add_argument("cert", type=Path)
    sp.add_argument("--edge", type=_edge, required=True)
    sp.add_argument("--face", type=int, required=True)
    sp.add_argument("--corners", type=_pair, required=True)
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_flip)

    sp = sub.add_parser("ensure-4face", help="flip until a 4-face exists", parents=[common])
    sp.add_argument("cert", type=Path)
    sp.add_argument("--out", type=Path)
    sp.set_defaults(func=cmd_ensure_4face)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        budget = SearchBudget.from_env(max_nodes=args.max_nodes, time_limit=args.time_limit,
                                       workers=args.workers)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cfg = CommandConfig(args.command, budget, args.json, args.verbose)
    try:
        outcome = args.func(args, cfg)
    except (UsageError, GraphError, SearchError, MaximalityError, ConstructionError,
            CertificateError, EmbeddingError, OSError) as exc:
        outcome = Outcome(EXIT_USAGE, "error", {"reason": str(exc).replace("\n", " ")})
    outcome.emit(cfg.json)
    return outcome.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
