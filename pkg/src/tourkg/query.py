"""Basic-graph-pattern queries over the quad store.

A query is a list of triple patterns (optionally graph-scoped), numeric
or string filters over variables, and a projection.  Evaluation is a
natural join of per-pattern matches with bag semantics and a
deterministic row order for a fixed store.

Text form, one clause per line::

    SELECT ?hotel ?name
    PATTERN ?hotel rdf:type schema:Hotel
    PATTERN ?hotel schema:name ?name ?g
    FILTER ?name != "Alpenhof"

Terms are `?var`, `<absolute-iri>`, prefixed names (schema:, rdf:,
rdfs:, xsd:, owl:), quoted strings, numbers, or true/false.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from . import vocab
from .rdf import (
    OWL_NS,
    RDF_NS,
    RDFS_NS,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_NS,
    QuadStore,
    Term,
    TermError,
    iri,
    literal,
)

PREFIXES = {
    "schema": vocab.SCHEMA,
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "xsd": XSD_NS,
    "owl": OWL_NS,
}

OPERATORS = ("<=", ">=", "!=", "<", ">", "=")


class QueryError(ValueError):
    """Raised for malformed or unanswerable queries (before evaluation)."""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class TriplePattern:
    subject: Term | Var
    predicate: Term | Var
    object: Term | Var
    graph: Term | Var | None = None  # None scopes the pattern over all graphs

    def variables(self) -> set[str]:
        out = set()
        for pos in (self.subject, self.predicate, self.object, self.graph):
            if isinstance(pos, Var):
                out.add(pos.name)
        return out


@dataclass(frozen=True)
class Filter:
    variable: str
    op: str  # one of OPERATORS
    value: float | int | str


@dataclass
class PatternQuery:
    patterns: list[TriplePattern] = field(default_factory=list)
    filters: list[Filter] = field(default_factory=list)
    projection: list[str] = field(default_factory=list)

    def check(self) -> None:
        """Reject queries whose projected or filtered variables are unbound."""
        bound: set[str] = set()
        for p in self.patterns:
            bound |= p.variables()
        if not self.patterns:
            raise QueryError("query needs at least one pattern")
        if not self.projection:
            raise QueryError("query needs a projection (SELECT)")
        for v in self.projection:
            if v not in bound:
                raise QueryError(f"projected variable ?{v} appears in no pattern")
        for f in self.filters:
            if f.variable not in bound:
                raise QueryError(f"filtered variable ?{f.variable} appears in no pattern")


# -- text format ----------------------------------------------------------------

_TERM_RE = re.compile(
    r"""\?([A-Za-z_][A-Za-z0-9_]*)   # variable
      | <([^<>\s]+)>                 # absolute IRI
      | ([A-Za-z][A-Za-z0-9]*):([A-Za-z_][A-Za-z0-9_.\-]*)  # prefixed name
      | "((?:[^"\\]|\\.)*)"          # string literal
      | (true|false)                 # boolean
      | (-?\d+\.\d+)                 # decimal
      | (-?\d+)                      # integer
    """,
    re.VERBOSE,
)


def _parse_term(token: str, lineno: int) -> Term | Var:
    m = _TERM_RE.fullmatch(token)
    if not m:
        raise QueryError(f"line {lineno}: cannot parse term {token!r}")
    var_name, iri_value, prefix, local, string, boolean, dec, integer = m.groups()
    if var_name:
        return Var(var_name)
    if iri_value:
        try:
            return iri(iri_value)
        except TermError as exc:
            raise QueryError(f"line {lineno}: {exc}") from None
    if prefix:
        ns = PREFIXES.get(prefix)
        if ns is None:
            raise QueryError(f"line {lineno}: unknown prefix {prefix!r}")
        return iri(ns + local)
    if string is not None:
        return literal(string.replace('\\"', '"').replace("\\\\", "\\"))
    if boolean:
        return literal(boolean, datatype=XSD_NS + "boolean")
    if dec:
        return literal(dec, datatype=XSD_DECIMAL)
    return literal(integer, datatype=XSD_INTEGER)


def parse_query(text: str) -> PatternQuery:
    """Parse the line-based query format; the query is checked, not evaluated."""
    query = PatternQuery()
    saw_select = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        keyword = parts[0].upper()
        if keyword == "SELECT":
            if saw_select:
                raise QueryError(f"line {lineno}: duplicate SELECT")
            saw_select = True
            for tok in parts[1:]:
                if not tok.startswith("?"):
                    raise QueryError(f"line {lineno}: SELECT takes ?variables, got {tok!r}")
                query.projection.append(tok[1:])
        elif keyword == "PATTERN":
            if len(parts) not in (4, 5):
                raise QueryError(f"line {lineno}: PATTERN takes s p o [g]")
            terms = [_parse_term(t, lineno) for t in parts[1:]]
            graph = terms[3] if len(terms) == 4 else None
            if graph is not None and isinstance(graph, Term) and not graph.is_iri:
                raise QueryError(f"line {lineno}: graph position must be an IRI or variable")
            query.patterns.append(TriplePattern(terms[0], terms[1], terms[2], graph))
        elif keyword == "FILTER":
            if len(parts) != 4 or not parts[1].startswith("?"):
                raise QueryError(f"line {lineno}: FILTER takes ?var <op> value")
            if parts[2] not in OPERATORS:
                raise QueryError(f"line {lineno}: unknown operator {parts[2]!r}")
            raw_value = parts[3]
            value: float | int | str
            if raw_value.startswith('"') and raw_value.endswith('"'):
                value = raw_value[1:-1]
            else:
                try:
                    value = int(raw_value)
                except ValueError:
                    try:
                        value = float(raw_value)
                    except ValueError:
                        raise QueryError(
                            f"line {lineno}: filter value must be a number or quoted string"
                        ) from None
            query.filters.append(Filter(parts[1][1:], parts[2], value))
        else:
            raise QueryError(f"line {lineno}: unknown clause {parts[0]!r}")
    query.check()
    return query


# -- evaluation -------------------------------------------------------------------

_NUMERIC_DATATYPES = (XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE)


def _filter_passes(term: Term, f: Filter) -> bool:
    if isinstance(f.value, (int, float)):
        if not term.is_literal:
            return False
        try:
            lhs = float(term.value)
        except ValueError:
            return False
        rhs = float(f.value)
    else:
        lhs = term.value
        rhs = f.value
    if f.op == "<":
        return lhs < rhs
    if f.op == "<=":
        return lhs <= rhs
    if f.op == ">":
        return lhs > rhs
    if f.op == ">=":
        return lhs >= rhs
    if f.op == "=":
        return lhs == rhs
    return lhs != rhs


def evaluate(store: QuadStore, query: PatternQuery) -> list[dict[str, Term]]:
    """Bindings from joining the patterns, filtered and projected.

    Bag semantics: duplicate rows are preserved.  Matching a pattern
    with no graph term walks every named graph, so a triple present in
    two graphs contributes two rows.
    """
    query.check()
    rows: list[dict[str, Term]] = [{}]
    for pattern in query.patterns:
        next_rows: list[dict[str, Term]] = []
        for row in rows:
            bind = lambda pos: row.get(pos.name) if isinstance(pos, Var) else pos
            s, p, o, g = (
                bind(pattern.subject),
                bind(pattern.predicate),
                bind(pattern.object),
                bind(pattern.graph) if pattern.graph is not None else None,
            )
            for q in store.match_quads(subject=s, predicate=p, object=o, graph=g):
                new_row = dict(row)
                ok = True
                for pos, got in (
                    (pattern.subject, q.subject),
                    (pattern.predicate, q.predicate),
                    (pattern.object, q.object),
                    (pattern.graph, q.graph),
                ):
                    if isinstance(pos, Var):
                        bound = new_row.get(pos.name)
                        if bound is None:
                            new_row[pos.name] = got
                        elif bound != got:
                            ok = False
                            break
                if ok:
                    next_rows.append(new_row)
        rows = next_rows
    out: list[dict[str, Term]] = []
    for row in rows:
        if all(_filter_passes(row[f.variable], f) for f in query.filters):
            out.append({v: row[v] for v in query.projection})
    return out


def rows_to_plain(rows: Iterable[dict[str, Term]]) -> list[dict[str, str]]:
    """Bindings rendered as plain strings (IRIs bare, literals lexical)."""
    plain = []
    for row in rows:
        plain.append(
            {
                v: (t.value if not t.is_bnode else "_:" + t.value)
                for v, t in row.items()
            }
        )
    return plain
