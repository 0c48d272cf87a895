from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from tourkg import vocab
from tourkg.jsonld import (
    DEFAULT_SKOLEM_POLICY,
    AnnotationError,
    CycleError,
    SkolemPolicy,
    annotation_to_quads,
    check_annotation,
    parse_annotation,
    quads_to_annotation,
    skolemize_hash,
)
from tourkg.rdf import (
    RDF_TYPE,
    Quad,
    QuadStore,
    canonical_anon_quads,
    iri,
    isomorphic,
    literal,
    parse_nquads,
)
from conftest import FIXTURES, check_partition

GRAPH = "urn:kg:fixture"
SCHEMA = vocab.SCHEMA


def is_anon(term):
    return term.is_bnode or (term.is_iri and term.value.startswith(DEFAULT_SKOLEM_POLICY.base))


def corpus_docs():
    return sorted((FIXTURES / "corpus" / "docs").glob("*.jsonld"))


# -- reference fixtures ------------------------------------------------------------


def test_corpus_is_large_enough():
    assert len(corpus_docs()) >= 20


@pytest.mark.parametrize("doc_path", corpus_docs(), ids=lambda p: p.stem)
def test_annotation_to_quads_matches_reference_fixture(doc_path):
    doc = json.loads(doc_path.read_text("utf-8"))
    mine = annotation_to_quads(doc, GRAPH)
    expected = parse_nquads(
        (FIXTURES / "corpus" / "expected" / f"{doc_path.stem}.nq").read_text("utf-8")
    )
    assert isomorphic(mine, expected, is_anon_a=is_anon)


# -- spec examples -----------------------------------------------------------------


def test_minimal_hotel_two_quads():
    doc = {"@type": "Hotel", "name": "Alpenhof"}
    quads = annotation_to_quads(doc, GRAPH)
    assert len(quads) == 2
    subject = quads[0].subject
    assert subject.value.startswith(DEFAULT_SKOLEM_POLICY.base)
    assert quads[0] == Quad(subject, iri(RDF_TYPE), iri(SCHEMA + "Hotel"), iri(GRAPH))
    assert quads[1] == Quad(subject, iri(SCHEMA + "name"), literal("Alpenhof"), iri(GRAPH))


def test_id_passthrough():
    doc = {"@type": "Hotel", "@id": "https://ex.org/h1", "name": "X"}
    quads = annotation_to_quads(doc, GRAPH)
    assert all(x.subject == iri("https://ex.org/h1") for x in quads)


def test_nested_address_four_quads():
    doc = {"@type": "Hotel", "address": {"@type": "PostalAddress", "postalCode": "6020"}}
    quads = annotation_to_quads(doc, GRAPH)
    assert len(quads) == 4
    link = [x for x in quads if x.predicate == iri(SCHEMA + "address")]
    assert len(link) == 1
    child = link[0].object
    assert child.value.startswith(DEFAULT_SKOLEM_POLICY.base)
    assert Quad(child, iri(RDF_TYPE), iri(SCHEMA + "PostalAddress"), iri(GRAPH)) in quads
    assert Quad(child, iri(SCHEMA + "postalCode"), literal("6020"), iri(GRAPH)) in quads


# -- skolemization -----------------------------------------------------------------


def test_skolemize_deterministic():
    assert skolemize_hash("same text") == skolemize_hash("same text")


def test_skolemize_sensitive_to_one_character():
    assert skolemize_hash("alpenhof 6020") != skolemize_hash("alpenhof 6021")


def test_skolemize_prefix_and_format():
    policy = SkolemPolicy(base="urn:test:nodes:")
    out = skolemize_hash('{"@type":["Hotel"]}', policy)
    assert out.startswith("urn:test:nodes:")
    digest = out[len(policy.base):]
    assert digest == digest.lower() and len(digest) == 64


def test_skolem_policy_requires_absolute_base():
    with pytest.raises(ValueError):
        SkolemPolicy(base="nodes/")


def test_equal_documents_share_subjects():
    doc = {"@type": "Hotel", "name": "Alpenhof", "address": {"@type": "PostalAddress", "postalCode": "6020"}}
    a = annotation_to_quads(doc, GRAPH)
    b = annotation_to_quads(json.loads(json.dumps(doc)), GRAPH)
    assert set(a) == set(b)


def test_double_ingest_adds_nothing():
    doc = {"@type": "Hotel", "name": "Alpenhof", "address": {"@type": "PostalAddress", "postalCode": "6020"}}
    store = QuadStore()
    first = store.add_quads(annotation_to_quads(doc, GRAPH))
    assert first == 5
    assert store.add_quads(annotation_to_quads(doc, GRAPH)) == 0
    check_partition(store)


# -- scalar handling ----------------------------------------------------------------


def test_scalar_datatypes():
    doc = {
        "@type": "Hotel",
        "name": "X",
        "starRating": 4,
        "numberOfRooms": 12.5,
        "petsAllowed": True,
        "maximumAttendeeCapacity": 3.0,
    }
    quads = {x.predicate.value.rsplit("/", 1)[-1]: x.object for x in annotation_to_quads(doc, GRAPH)}
    assert quads["name"].datatype.endswith("string")
    assert quads["starRating"].value == "4" and quads["starRating"].datatype.endswith("integer")
    assert quads["numberOfRooms"].value == "12.5" and quads["numberOfRooms"].datatype.endswith("decimal")
    assert quads["petsAllowed"].value == "true"
    # integral floats use the integer datatype
    assert quads["maximumAttendeeCapacity"].value == "3"
    assert quads["maximumAttendeeCapacity"].datatype.endswith("integer")


def test_type_quad_count_equals_node_type_pairs():
    doc = {
        "@type": ["Resort", "SportsActivityLocation"],
        "name": "X",
        "address": {"@type": "PostalAddress", "postalCode": "1"},
        "geo": {"@type": "GeoCoordinates", "latitude": 47.1},
    }
    quads = annotation_to_quads(doc, GRAPH)
    type_quads = [x for x in quads if x.predicate == iri(RDF_TYPE)]
    assert len(type_quads) == 4  # 2 on the root + 1 + 1


# -- rejections ---------------------------------------------------------------------


def test_untyped_root_rejected():
    with pytest.raises(AnnotationError, match="root"):
        annotation_to_quads({"name": "X"}, GRAPH)


def test_relative_id_rejected():
    with pytest.raises(AnnotationError):
        annotation_to_quads({"@type": "Hotel", "@id": "hotels/1"}, GRAPH)


def test_empty_array_rejected():
    with pytest.raises(AnnotationError, match="empty array"):
        annotation_to_quads({"@type": "Hotel", "name": []}, GRAPH)


def test_unsupported_keyword_rejected():
    with pytest.raises(AnnotationError, match="@graph"):
        annotation_to_quads({"@type": "Hotel", "@graph": []}, GRAPH)


def test_wrong_context_rejected():
    with pytest.raises(AnnotationError, match="@context"):
        check_annotation({"@context": "https://example.org/vocab", "@type": "Hotel"})


def test_parse_annotation_requires_context():
    with pytest.raises(AnnotationError):
        parse_annotation('{"@type": "Hotel", "name": "X"}')
    doc = parse_annotation('{"@context": "http://schema.org", "@type": "Hotel", "name": "X"}')
    assert doc["@type"] == "Hotel"


# -- reconstruction ------------------------------------------------------------------


def test_quads_to_annotation_root_with_type_only():
    quads = annotation_to_quads({"@type": "Hotel"}, GRAPH)
    doc = quads_to_annotation(quads, quads[0].subject)
    assert doc == {"@context": SCHEMA, "@type": "Hotel"}


def test_reconstruction_inverse_on_hotel_slice():
    doc = {"@type": "Hotel", "name": "Alpenhof"}
    quads = annotation_to_quads(doc, GRAPH)
    rebuilt = quads_to_annotation(quads, quads[0].subject)
    assert rebuilt["@type"] == "Hotel" and rebuilt["name"] == "Alpenhof"
    assert set(annotation_to_quads(rebuilt, GRAPH)) == set(quads)


def test_cycle_rejected_with_subjects():
    a, b = iri("https://ex.org/a"), iri("https://ex.org/b")
    p = iri(SCHEMA + "containedInPlace")
    g = iri(GRAPH)
    with pytest.raises(CycleError) as err:
        quads_to_annotation([Quad(a, p, b, g), Quad(b, p, a, g)], a)
    assert "https://ex.org/a" in err.value.subjects
    assert "https://ex.org/b" in err.value.subjects


# -- round-trip property --------------------------------------------------------------


def _normalize(value):
    if isinstance(value, list):
        items = [_normalize(v) for v in value]
        return items[0] if len(items) == 1 else items
    if isinstance(value, dict):
        return {k: _normalize(v) for k, v in sorted(value.items()) if k != "@context"}
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


class _DocGenerator:
    """Random valid annotation documents without identical anonymous twins."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.counter = 0
        self.types = sorted(vocab.CLASSES)
        self.props = sorted(vocab.PROPERTIES)

    def unique(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def scalar(self):
        roll = self.rng.random()
        if roll < 0.4:
            return f"text-{self.unique()}"
        if roll < 0.55:
            return self.rng.randint(-5, 400)
        if roll < 0.7:
            return round(self.rng.uniform(0.1, 300.0), 2)
        if roll < 0.8:
            return self.rng.random() < 0.5
        if roll < 0.9:
            return {"@value": f"wert-{self.unique()}", "@language": self.rng.choice(["de", "en"])}
        return {
            "@value": f"2018-0{self.rng.randint(1, 4)}-1{self.rng.randint(0, 9)}",
            "@type": "http://www.w3.org/2001/XMLSchema#date",
        }

    def node(self, depth: int) -> dict:
        doc = {"@type": self.rng.choice(self.types)}
        if self.rng.random() < 0.25:
            doc["@id"] = f"https://example.org/things/{self.unique()}"
        for prop in self.rng.sample(self.props, self.rng.randint(1, 4)):
            roll = self.rng.random()
            if depth > 0 and roll < 0.3:
                doc[prop] = self.node(depth - 1)
            elif roll < 0.45:
                doc[prop] = [self.scalar() for _ in range(self.rng.randint(2, 3))]
            elif roll < 0.55:
                doc[prop] = {"@id": f"https://example.org/refs/{self.unique()}"}
            else:
                doc[prop] = self.scalar()
        return doc


def test_round_trip_property_random_documents():
    rng = random.Random(20180401)
    gen = _DocGenerator(rng)
    for _ in range(60):
        doc = gen.node(depth=2)
        quads = annotation_to_quads(doc, GRAPH)
        rebuilt = quads_to_annotation(quads, quads[0].subject)
        assert _normalize(rebuilt) == _normalize(doc)
        assert set(annotation_to_quads(rebuilt, GRAPH)) == set(quads)


def test_round_trip_through_store_slice():
    doc = json.loads((corpus_docs()[3]).read_text("utf-8"))
    store = QuadStore()
    store.add_quads(annotation_to_quads(doc, GRAPH))
    quads = store.match_quads(graph=iri(GRAPH))
    roots = [x.subject for x in quads if x.object == iri(SCHEMA + "Hotel")]
    rebuilt = quads_to_annotation(quads, roots[0])
    assert _normalize(rebuilt) == _normalize(doc)
