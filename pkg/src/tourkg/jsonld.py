"""Restricted JSON-LD processing for schema.org annotation documents.

Supported subset: a single vocabulary context (schema.org), `@type`,
`@id`, `@value` with `@language` (or `@type`), nesting, non-empty
arrays.  Unidentified nodes are skolemized with a deterministic content
hash so identical re-submitted annotations collapse onto the same
subjects.
"""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Iterable, Sequence

from . import vocab
from .rdf import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    RDF_LANGSTRING,
    Quad,
    Term,
    TermError,
    bnode,
    iri,
    literal,
    quad,
)

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")

KEYWORDS = {"@context", "@type", "@id", "@value", "@language"}
_UNSUPPORTED_KEYWORDS = {"@graph", "@reverse", "@list", "@set", "@index", "@container"}


class AnnotationError(ValueError):
    """Raised for documents outside the supported annotation subset."""


class CycleError(AnnotationError):
    """Raised when a quad slice contains a reference cycle."""

    def __init__(self, subjects: list[str]):
        super().__init__("reference cycle through subjects: " + " -> ".join(subjects))
        self.subjects = subjects


@dataclass(frozen=True)
class SkolemPolicy:
    """Where and how unidentified nodes get their deterministic IRIs."""

    base: str = "urn:kg:sk:"
    hash_algorithm: str = "sha256"

    def __post_init__(self):
        if not _SCHEME_RE.match(self.base):
            raise ValueError(f"skolem base must be an absolute IRI prefix: {self.base!r}")
        hashlib.new(self.hash_algorithm)  # unknown algorithm raises here


DEFAULT_SKOLEM_POLICY = SkolemPolicy()


def skolemize_hash(description: str, policy: SkolemPolicy = DEFAULT_SKOLEM_POLICY) -> str:
    """Deterministic skolem IRI for a canonical node description."""
    digest = hashlib.new(policy.hash_algorithm, description.encode("utf-8")).hexdigest()
    return policy.base + digest.lower()


def parse_annotation(text: str) -> dict:
    """Parse JSON text into a checked annotation document.

    At this boundary the root must carry the schema.org `@context`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AnnotationError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "@context" not in doc:
        raise AnnotationError("annotation document must carry the schema.org @context")
    check_annotation(doc)
    return doc


def check_annotation(doc: Any) -> None:
    """Raise AnnotationError unless `doc` is a valid annotation document."""
    annotation_to_quads(doc, "urn:kg:scratch", DEFAULT_SKOLEM_POLICY)


def _check_context(value: Any) -> None:
    if not isinstance(value, str) or value not in vocab.CONTEXT_FORMS:
        raise AnnotationError(f"@context must be the schema.org IRI, got {value!r}")


def _expand_name(name: str) -> str:
    """Property or type name -> absolute IRI (schema.org unless already absolute)."""
    if "://" in name or name.startswith("urn:"):
        return name
    return vocab.SCHEMA + name


def _scalar_literal(value: Any) -> Term:
    if isinstance(value, bool):
        return literal("true" if value else "false", XSD_BOOLEAN)
    if isinstance(value, int):
        return literal(str(value), XSD_INTEGER)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise AnnotationError(f"non-finite number not representable: {value!r}")
        if value.is_integer():
            return literal(str(int(value)), XSD_INTEGER)
        return literal(format(Decimal(str(value)), "f"), XSD_DECIMAL)
    if isinstance(value, str):
        return literal(value)
    raise AnnotationError(f"unsupported scalar: {value!r}")


def _value_object_literal(value: dict) -> Term:
    extra = set(value) - {"@value", "@language", "@type"}
    if extra:
        raise AnnotationError(f"unsupported keys in value object: {sorted(extra)}")
    inner = value["@value"]
    lang = value.get("@language")
    dtype = value.get("@type")
    if lang is not None and dtype is not None:
        raise AnnotationError("@language and @type are mutually exclusive in a value object")
    if lang is not None:
        if not isinstance(inner, str):
            raise AnnotationError("@language requires a string @value")
        return literal(inner, language=lang)
    if dtype is not None:
        if not isinstance(inner, str) or not isinstance(dtype, str):
            raise AnnotationError("typed @value requires string value and datatype")
        return literal(inner, datatype=dtype)
    return _scalar_literal(inner)


def _id_term(value: str, where: str) -> Term:
    if not isinstance(value, str):
        raise AnnotationError(f"{where}: @id must be a string")
    if value.startswith("_:"):
        return bnode(value[2:])
    try:
        return iri(value)
    except TermError as exc:
        raise AnnotationError(f"{where}: {exc}") from None


class _Converter:
    def __init__(self, graph: Term, policy: SkolemPolicy):
        self.graph = graph
        self.policy = policy

    def node(self, node: dict, path: str, is_root: bool, out: list[Quad]) -> Term:
        """Emit quads for one node into `out` (own statements before the
        nested nodes'); subjects are computed bottom-up, return the node's."""
        if not isinstance(node, dict):
            raise AnnotationError(f"{path}: expected an object")
        bad = _UNSUPPORTED_KEYWORDS & set(node)
        if bad:
            raise AnnotationError(f"{path}: unsupported keyword {sorted(bad)[0]}")
        if "@context" in node:
            if not is_root:
                raise AnnotationError(f"{path}: @context only allowed on the root node")
            _check_context(node["@context"])
        if "@value" in node:
            raise AnnotationError(f"{path}: value object not allowed as a node")

        types = node.get("@type", [])
        if isinstance(types, str):
            types = [types]
        if not isinstance(types, list) or not all(isinstance(t, str) for t in types):
            raise AnnotationError(f"{path}: @type must be a string or list of strings")
        if is_root and not types:
            raise AnnotationError("root node must have a type")

        # reference object: @id and nothing else
        props = {
            k: v for k, v in node.items() if k not in ("@context", "@type", "@id")
        }
        if "@id" in node and not types and not props:
            return _id_term(node["@id"], path)
        if not types and not props:
            raise AnnotationError(f"{path}: empty node object")

        # resolve values first (children buffered) so the canonical
        # description of the subtree is complete before hashing
        canonical: dict[str, Any] = {}
        if types:
            canonical["@type"] = sorted(types)
        resolved: list[tuple[str, list[tuple[str, Term]]]] = []
        children: list[Quad] = []
        for key, value in props.items():
            if key.startswith("@"):
                raise AnnotationError(f"{path}: unsupported keyword {key}")
            if not isinstance(key, str) or not key:
                raise AnnotationError(f"{path}: property names must be non-empty strings")
            prop_iri = _expand_name(key)
            values = value if isinstance(value, list) else [value]
            if isinstance(value, list) and not value:
                raise AnnotationError(f"{path}/{key}: empty array value")
            canon_values: list[Any] = []
            terms: list[tuple[str, Term]] = []
            for i, v in enumerate(values):
                vpath = f"{path}/{key}" + (f"[{i}]" if isinstance(value, list) else "")
                if isinstance(v, dict):
                    if "@value" in v:
                        t = _value_object_literal(v)
                        canon_values.append(
                            {"@value": v["@value"], **{k2: v[k2] for k2 in ("@language", "@type") if k2 in v}}
                        )
                    else:
                        t = self.node(v, vpath, is_root=False, out=children)
                        canon_values.append({"@id": t.value if t.is_iri else "_:" + t.value})
                elif isinstance(v, list):
                    raise AnnotationError(f"{vpath}: nested arrays are not supported")
                elif v is None:
                    raise AnnotationError(f"{vpath}: null values are not supported")
                else:
                    t = _scalar_literal(v)
                    canon_values.append(v)
                terms.append((prop_iri, t))
            canonical[prop_iri] = canon_values
            resolved.append((key, terms))

        if "@id" in node:
            subject = _id_term(node["@id"], path)
        else:
            description = json.dumps(
                canonical, sort_keys=True, ensure_ascii=False, separators=(",", ":")
            )
            subject = iri(skolemize_hash(description, self.policy))

        for t in types:
            out.append(Quad(subject, iri(RDF_TYPE), iri(_expand_name(t)), self.graph))
        for _key, terms in resolved:
            for prop_iri, obj in terms:
                out.append(Quad(subject, iri(prop_iri), obj, self.graph))
        out.extend(children)
        return subject


def annotation_to_quads(
    doc: dict,
    graph: Term | str,
    policy: SkolemPolicy = DEFAULT_SKOLEM_POLICY,
) -> list[Quad]:
    """Convert an annotation document into quads inside `graph`.

    Nodes become subjects (their `@id`, else a content-hash skolem IRI);
    types become rdf:type quads; scalars become literals with inferred
    datatypes (string / integer / decimal / boolean).  The root node's
    statements come first in the returned sequence.
    """
    if isinstance(graph, str):
        graph = iri(graph)
    if not isinstance(doc, dict):
        raise AnnotationError("annotation document must be a JSON object")
    quads: list[Quad] = []
    _Converter(graph, policy).node(doc, path="$", is_root=True, out=quads)
    return quads


def _literal_to_value(t: Term) -> Any:
    if t.language is not None:
        return {"@value": t.value, "@language": t.language}
    if t.datatype == XSD_STRING:
        return t.value
    if t.datatype == XSD_INTEGER:
        try:
            return int(t.value)
        except ValueError:
            return {"@value": t.value, "@type": t.datatype}
    if t.datatype in (XSD_DECIMAL, XSD_DOUBLE):
        try:
            return float(t.value)
        except ValueError:
            return {"@value": t.value, "@type": t.datatype}
    if t.datatype == XSD_BOOLEAN:
        if t.value in ("true", "false"):
            return t.value == "true"
        return {"@value": t.value, "@type": t.datatype}
    return {"@value": t.value, "@type": t.datatype}


def _compact_iri(value: str) -> str:
    name = vocab.local_name(value)
    return name if name is not None else value


def quads_to_annotation(
    quads: Sequence[Quad],
    root: Term,
    policy: SkolemPolicy = DEFAULT_SKOLEM_POLICY,
) -> dict:
    """Rebuild an annotation document from a quad slice, starting at `root`.

    Inverse of annotation_to_quads up to skolem-vs-blank naming: skolem
    subjects lose their generated `@id`; re-converting the result
    reproduces the slice as a set.  Cycles reachable from the root are
    rejected.
    """
    by_subject: dict[Term, list[Quad]] = {}
    for q in quads:
        by_subject.setdefault(q.subject, []).append(q)
    if root not in by_subject:
        raise AnnotationError(f"root {root!r} has no outgoing statements in the slice")

    def is_skolem(t: Term) -> bool:
        return t.is_iri and t.value.startswith(policy.base)

    def build(subject: Term, path: tuple[Term, ...]) -> dict:
        if subject in path:
            cycle = [t.value for t in path[path.index(subject) :]] + [subject.value]
            raise CycleError(cycle)
        node: dict[str, Any] = {}
        if subject.is_iri and not is_skolem(subject):
            node["@id"] = subject.value
        types: list[str] = []
        props: dict[str, list[Any]] = {}
        for q in by_subject[subject]:
            if q.predicate.value == RDF_TYPE and q.object.is_iri:
                types.append(_compact_iri(q.object.value))
                continue
            key = _compact_iri(q.predicate.value)
            if q.object.is_literal:
                value = _literal_to_value(q.object)
            elif q.object in by_subject:
                value = build(q.object, path + (subject,))
            elif q.object.is_iri:
                value = {"@id": q.object.value}
            else:
                value = {"@id": "_:" + q.object.value}
            props.setdefault(key, []).append(value)
        if types:
            node["@type"] = types[0] if len(types) == 1 else types
        for key, values in props.items():
            node[key] = values[0] if len(values) == 1 else values
        return node

    doc = build(root, ())
    return {"@context": vocab.SCHEMA, **doc}
