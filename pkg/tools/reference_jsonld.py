"""Independent JSON-LD-to-N-Quads reference for the annotation subset.

Deliberately structured like the standard processing pipeline - context
check, expansion to expanded form, node-map flattening with sequential
blank-node allocation, then RDF emission - rather than the library's
single-pass tree walk with content-hash subjects.  Used to generate the
committed fixture N-Quads the fidelity tests compare against
(blank-node-isomorphic set equality).

Scalar datatype mapping is the documented one: strings -> xsd:string,
booleans -> xsd:boolean, integers (including integral floats) ->
xsd:integer, other numbers -> xsd:decimal.
"""
from __future__ import annotations

import json
import math
from decimal import Decimal

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"
XSD = "http://www.w3.org/2001/XMLSchema#"
SCHEMA = "https://schema.org/"
CONTEXTS = {"https://schema.org/", "https://schema.org", "http://schema.org/", "http://schema.org"}


def expand_name(name: str) -> str:
    if "://" in name or name.startswith("urn:"):
        return name
    return SCHEMA + name


def expand(doc: dict) -> dict:
    """Document -> expanded form with IRI keys and value/node objects."""
    if "@context" in doc and doc["@context"] not in CONTEXTS:
        raise ValueError(f"unsupported @context: {doc['@context']!r}")
    return _expand_node(doc)


def _expand_node(node: dict) -> dict:
    out: dict = {}
    if "@id" in node:
        out["@id"] = node["@id"]
    types = node.get("@type", [])
    if isinstance(types, str):
        types = [types]
    if types:
        out["@type"] = [expand_name(t) for t in types]
    for key, value in node.items():
        if key in ("@context", "@id", "@type"):
            continue
        values = value if isinstance(value, list) else [value]
        expanded = []
        for v in values:
            if isinstance(v, dict) and "@value" in v:
                expanded.append(dict(v))
            elif isinstance(v, dict):
                expanded.append(_expand_node(v))
            else:
                expanded.append({"@value": v})
        out[expand_name(key)] = expanded
    return out


class NodeMap:
    """Flattened node map with sequential blank-node identifiers."""

    def __init__(self):
        self.nodes: dict[str, dict] = {}
        self._counter = 0

    def _issue_id(self) -> str:
        bid = f"_:b{self._counter}"
        self._counter += 1
        return bid

    def insert(self, expanded: dict) -> str:
        node_id = expanded.get("@id") or self._issue_id()
        entry = self.nodes.setdefault(node_id, {"@type": [], "props": {}})
        for t in expanded.get("@type", []):
            if t not in entry["@type"]:
                entry["@type"].append(t)
        for prop, values in expanded.items():
            if prop.startswith("@"):
                continue
            slot = entry["props"].setdefault(prop, [])
            for v in values:
                if "@value" in v:
                    slot.append(("literal", v))
                elif set(v) == {"@id"}:
                    slot.append(("ref", v["@id"]))
                else:
                    slot.append(("ref", self.insert(v)))
        return node_id


def _canonical_number(value) -> tuple[str, str]:
    if isinstance(value, bool):
        return ("true" if value else "false", XSD + "boolean")
    if isinstance(value, int):
        return (str(value), XSD + "integer")
    if not math.isfinite(value):
        raise ValueError(f"non-finite number: {value!r}")
    if float(value).is_integer():
        return (str(int(value)), XSD + "integer")
    return (format(Decimal(str(value)), "f"), XSD + "decimal")


def _literal_nq(value_object: dict) -> str:
    v = value_object["@value"]
    if "@language" in value_object:
        lex, suffix = str(v), "@" + value_object["@language"]
    elif "@type" in value_object:
        lex, suffix = str(v), f"^^<{value_object['@type']}>"
    elif isinstance(v, str):
        lex, suffix = v, ""
    else:
        lex, datatype = _canonical_number(v)
        suffix = f"^^<{datatype}>"
    escaped = (
        lex.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    return f'"{escaped}"{suffix}'


def _term_nq(node_id: str) -> str:
    return node_id if node_id.startswith("_:") else f"<{node_id}>"


def to_nquads(doc: dict, graph_iri: str) -> str:
    """Document -> N-Quads text (one statement per line, sorted)."""
    node_map = NodeMap()
    node_map.insert(expand(doc))
    lines = []
    g = f"<{graph_iri}>"
    for node_id, entry in node_map.nodes.items():
        s = _term_nq(node_id)
        for t in entry["@type"]:
            lines.append(f"{s} <{RDF_TYPE}> <{t}> {g} .")
        for prop, values in entry["props"].items():
            for kind, payload in values:
                o = _literal_nq(payload) if kind == "literal" else _term_nq(payload)
                lines.append(f"{s} <{prop}> {o} {g} .")
    return "\n".join(sorted(lines)) + ("\n" if lines else "")


if __name__ == "__main__":
    import sys

    print(to_nquads(json.load(open(sys.argv[1])), sys.argv[2] if len(sys.argv) > 2 else "urn:kg:fixture"), end="")
