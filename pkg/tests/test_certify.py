import copy
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from eulerimpure.certify import (SCHEMA, CertificateError, EmbeddingCertificate, certificate_for, dumps,
                                 loads, read_certificate, verify_certificate, write_certificate)
from eulerimpure.constructions import (ConstructionError, fg_embedding, find_face, k7e_y_fixture,
                                       k8_c4_fixture, plate)
from eulerimpure.embedding import EmbeddingError, RotationEmbedding, SurfaceSpec
from eulerimpure.genus_search import embeds_on
from eulerimpure.graphcore import GraphError, complete_graph

from oracles import brute_faces


def fixture_certs():
    _, e8 = k8_c4_fixture()
    _, e7 = k7e_y_fixture()
    k6 = embeds_on(complete_graph(6), SurfaceSpec(False, 1)).witness
    return {
        "k8": certificate_for(e8, facial_cycles=[(0, 1, 2, 3)]),
        "k7e": certificate_for(e7, facial_cycles=[(0, 2, 1, 3)]),
        "k6_n1": certificate_for(k6),
        "fg3": fg_embedding(3, plate(0)),
    }


CERTS = fixture_certs()


@pytest.mark.parametrize("name", sorted(CERTS))
def test_fixture_certificates_verify(name):
    assert verify_certificate(CERTS[name]).valid


@pytest.mark.parametrize("name", sorted(CERTS))
def test_round_trip_is_byte_exact(name, tmp_path):
    cert = CERTS[name]
    path = write_certificate(cert, tmp_path / "c.json")
    text = path.read_text()
    assert text == dumps(cert) and text.endswith("\n")
    back = read_certificate(path)
    assert back == cert
    assert dumps(back) == text
    assert not list(tmp_path.glob(".*tmp"))


def test_load_errors_carry_location():
    with pytest.raises(CertificateError, match=r"x.json:2:"):
        loads('{\n  "schema": ,\n}', "x.json")
    with pytest.raises(CertificateError, match="top level"):
        loads("[]", "y.json")
    with pytest.raises(CertificateError, match="malformed"):
        loads('{"schema": "s"}')


def _mutate(data, rnd):
    d = copy.deepcopy(data)
    kind = rnd.choice(["swap", "negate", "genus", "orient", "faces", "deficit", "k4", "dangling",
                       "drop_edge", "schema", "cycle", "reverse"])
    rot = d["rotation"]
    claims = d["claims"]
    if kind == "swap":
        v = rnd.randrange(len(rot))
        if len(rot[v]) >= 3:
            i, j = rnd.sample(range(len(rot[v])), 2)
            rot[v][i], rot[v][j] = rot[v][j], rot[v][i]
    elif kind == "negate":
        e = rnd.choice(d["graph"]["edges"])
        neg = d["negative_edges"]
        if e in neg:
            neg.remove(e)
        else:
            neg.append(e)
    elif kind == "genus":
        claims["surface"]["genus"] += rnd.choice([-1, 1])
    elif kind == "orient":
        claims["surface"]["orientable"] = not claims["surface"]["orientable"]
    elif kind == "faces":
        k = rnd.choice(list(claims["face_sizes"]))
        claims["face_sizes"][k] += 1
    elif kind == "deficit":
        claims["deficit"] = claims.get("deficit", 0) + 1
    elif kind == "k4":
        claims["k4_quad_faces"] = (claims.get("k4_quad_faces") or [])[1:] or [[0, 1, 2, 3]]
    elif kind == "dangling":
        v = rnd.randrange(len(rot))
        rot[v][0] = len(d["graph"]["edges"]) + 5
    elif kind == "drop_edge":
        d["graph"]["edges"].pop()
    elif kind == "schema":
        d["schema"] = "other/2"
    elif kind == "cycle":
        claims["facial_cycles"] = [[0, 1, 2, 3]]
    elif kind == "reverse":
        v = rnd.randrange(len(rot))
        rot[v].reverse()
    return kind, d


def _expected_valid(cert: EmbeddingCertificate) -> bool:
    """Second route: rebuild through RotationEmbedding and recompute every claim."""
    if cert.schema != SCHEMA:
        return False
    try:
        emb = cert.embedding()
    except (EmbeddingError, GraphError, IndexError, ValueError):
        return False
    if not emb.graph.is_connected():
        return False
    ref = certificate_for(emb, facial_cycles=cert.facial_cycles,
                          claim_deficit=cert.deficit is not None, claim_k4=cert.k4_quad_faces is not None)
    if (ref.surface, ref.face_sizes, ref.deficit) != (cert.surface, cert.face_sizes, cert.deficit):
        return False
    if ref.k4_quad_faces is not None and sorted(ref.k4_quad_faces) != sorted(cert.k4_quad_faces):
        return False
    for cyc in cert.facial_cycles:
        try:
            find_face(emb, cyc)
        except ConstructionError:
            return False
    return True


@pytest.mark.parametrize("name", sorted(CERTS))
def test_tamper_fuzz_agrees_with_second_route(name):
    rnd = random.Random(f"tamper-{name}")
    data = CERTS[name].to_dict()
    rejected = 0
    for _ in range(250):
        kind, d = _mutate(data, rnd)
        try:
            cert = EmbeddingCertificate.from_dict(d)
        except CertificateError:
            rejected += 1
            continue
        got = verify_certificate(cert)
        assert got.valid == _expected_valid(cert), (kind, got.reason)
        rejected += not got.valid
    assert rejected > 150


def test_specific_rejection_reasons():
    data = CERTS["k7e"].to_dict()
    d = copy.deepcopy(data)
    d["claims"]["surface"]["genus"] = 2
    assert verify_certificate(EmbeddingCertificate.from_dict(d)).reason == "euler genus mismatch"
    d = copy.deepcopy(data)
    d["rotation"][0] = d["rotation"][0][1:]
    assert verify_certificate(EmbeddingCertificate.from_dict(d)).reason == "rotation not a permutation"
    d = copy.deepcopy(data)
    d["negative_edges"] = [[0, 1]]
    assert verify_certificate(EmbeddingCertificate.from_dict(d)).reason == "dangling negative edge"
    d = copy.deepcopy(data)
    d["claims"]["facial_cycles"] = [[0, 1, 2, 3]]
    assert "facial cycle" in verify_certificate(EmbeddingCertificate.from_dict(d)).reason
    d = copy.deepcopy(data)
    d["graph"]["edges"].append([0, 0])
    assert verify_certificate(EmbeddingCertificate.from_dict(d)).reason.startswith("invalid graph")


@st.composite
def orientable_rotations(draw):
    n = draw(st.integers(4, 7))
    rnd = draw(st.randoms(use_true_random=False))
    rot = []
    for v in range(n):
        nb = [w for w in range(n) if w != v]
        rnd.shuffle(nb)
        rot.append(nb)
    return n, rot


@settings(max_examples=60, deadline=None)
@given(orientable_rotations())
def test_face_count_matches_dart_oracle(case):
    n, rot = case
    g = complete_graph(n)
    cert = certificate_for(RotationEmbedding(g, rot))
    assert verify_certificate(cert)
    assert sum(cert.face_sizes.values()) == brute_faces(n, g.edges, rot)
