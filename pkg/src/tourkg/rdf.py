"""In-memory RDF quad store: named graphs, RDFS-lite inference, N-Quads I/O.

The store keeps set semantics over quads and tracks, per quad, whether it
was asserted explicitly or derived by `rdfs_closure`.  Explicit and
inferred counts always partition the total.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from threading import Lock
from typing import Callable, Iterable, Iterator, Sequence

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"

RDF_TYPE = RDF_NS + "type"
RDF_LANGSTRING = RDF_NS + "langString"
XSD_STRING = XSD_NS + "string"
XSD_INTEGER = XSD_NS + "integer"
XSD_DECIMAL = XSD_NS + "decimal"
XSD_DOUBLE = XSD_NS + "double"
XSD_BOOLEAN = XSD_NS + "boolean"
XSD_DATE = XSD_NS + "date"
OWL_SAMEAS = OWL_NS + "sameAs"

# Reserved IRI for statements without an explicit graph component.
DEFAULT_GRAPH_IRI = "urn:kg:default"

EXPLICIT = "explicit"
INFERRED = "inferred"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_BAD_IRI_CHARS = re.compile(r'[<>"\s{}|\\^`]')
_BNODE_LABEL_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.\-]*$")


class TermError(ValueError):
    """Raised for a structurally invalid term (relative IRI, bad label, ...)."""


class QuadError(ValueError):
    """Raised for a structurally invalid quad."""


class NQuadsError(ValueError):
    """Raised on N-Quads syntax errors; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Term:
    """An RDF term: IRI, blank node, or literal.  Equality is structural."""

    kind: str  # "iri" | "bnode" | "literal"
    value: str  # IRI string, blank node label, or lexical form
    datatype: str | None = None
    language: str | None = None

    def __post_init__(self):
        if self.kind == "iri":
            if not _SCHEME_RE.match(self.value):
                raise TermError(f"IRI is not absolute (no scheme): {self.value!r}")
            if _BAD_IRI_CHARS.search(self.value):
                raise TermError(f"IRI contains forbidden characters: {self.value!r}")
            if self.datatype is not None or self.language is not None:
                raise TermError("IRI terms carry no datatype or language")
        elif self.kind == "bnode":
            if not _BNODE_LABEL_RE.match(self.value):
                raise TermError(f"invalid blank node label: {self.value!r}")
            if self.datatype is not None or self.language is not None:
                raise TermError("blank nodes carry no datatype or language")
        elif self.kind == "literal":
            if not self.datatype:
                raise TermError("literal requires a datatype IRI")
            if self.language is not None and self.datatype != RDF_LANGSTRING:
                raise TermError("language tag only allowed on language-string literals")
            if self.language is None and self.datatype == RDF_LANGSTRING:
                raise TermError("language-string literal requires a language tag")
        else:
            raise TermError(f"unknown term kind: {self.kind!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind == "iri"

    @property
    def is_bnode(self) -> bool:
        return self.kind == "bnode"

    @property
    def is_literal(self) -> bool:
        return self.kind == "literal"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Term({format_term(self)})"


def iri(value: str) -> Term:
    return Term("iri", value)


def bnode(label: str) -> Term:
    return Term("bnode", label)


def literal(lex: str, datatype: str = XSD_STRING, language: str | None = None) -> Term:
    if language is not None:
        datatype = RDF_LANGSTRING
    return Term("literal", lex, datatype, language)


@dataclass(frozen=True)
class Quad:
    """A statement (subject, predicate, object) inside a named graph."""

    subject: Term
    predicate: Term
    object: Term
    graph: Term

    def __post_init__(self):
        _check_quad_shape(self)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Quad({format_quad(self)})"


def _check_quad_shape(q: Quad) -> None:
    if q.subject.is_literal:
        raise QuadError("subject must not be a literal")
    if not q.predicate.is_iri:
        raise QuadError("predicate must be an IRI")
    if not q.graph.is_iri:
        raise QuadError("graph must be an IRI")


def quad(subject: Term, predicate: Term, object: Term, graph: Term | str | None = None) -> Quad:
    """Build a quad; a missing graph goes to the reserved default graph."""
    if graph is None:
        graph = iri(DEFAULT_GRAPH_IRI)
    elif isinstance(graph, str):
        graph = iri(graph)
    return Quad(subject, predicate, object, graph)


@dataclass
class ClassHierarchy:
    """Subclass/subproperty edges plus domain/range assertions driving inference.

    Edge sets are finite; cycles are permitted (closures still terminate).
    Closure maps are memoised on first query; treat the edge sets as
    immutable afterwards.
    """

    subclass_of: set[tuple[str, str]] = field(default_factory=set)
    subproperty_of: set[tuple[str, str]] = field(default_factory=set)
    domains: set[tuple[str, str]] = field(default_factory=set)  # (property, class)
    ranges: set[tuple[str, str]] = field(default_factory=set)  # (property, class)
    _sc_cache: dict[str, set[str]] | None = field(default=None, repr=False, compare=False)
    _sp_cache: dict[str, set[str]] | None = field(default=None, repr=False, compare=False)

    def superclass_map(self) -> dict[str, set[str]]:
        """Strict transitive closure of the subclass edges."""
        if self._sc_cache is None:
            self._sc_cache = _transitive_closure(self.subclass_of)
        return self._sc_cache

    def superproperty_map(self) -> dict[str, set[str]]:
        if self._sp_cache is None:
            self._sp_cache = _transitive_closure(self.subproperty_of)
        return self._sp_cache

    def is_subclass(self, sub: str, sup: str) -> bool:
        """Reflexive-transitive subclass test."""
        if sub == sup:
            return True
        return sup in self.superclass_map().get(sub, ())


def _transitive_closure(edges: set[tuple[str, str]]) -> dict[str, set[str]]:
    direct: dict[str, set[str]] = {}
    for a, b in edges:
        direct.setdefault(a, set()).add(b)
    closure: dict[str, set[str]] = {}
    for start in direct:
        seen: set[str] = set()
        stack = list(direct[start])
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            stack.extend(direct.get(node, ()))
        closure[start] = seen
    return closure


class QuadStore:
    """Named-graph quad store with set semantics and provenance accounting.

    Concurrency: many concurrent readers or one exclusive writer; every
    mutating call takes the store lock and is atomic at call granularity.
    """

    def __init__(self):
        self._flags: dict[Quad, str] = {}  # insertion-ordered
        self._seq: dict[Quad, int] = {}
        self._next_seq = 0
        self._by_s: dict[Term, set[Quad]] = {}
        self._by_p: dict[Term, set[Quad]] = {}
        self._by_o: dict[Term, set[Quad]] = {}
        self._by_g: dict[Term, set[Quad]] = {}
        self._explicit = 0
        self._inferred = 0
        self._lock = Lock()

    # -- accounting ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._flags)

    def __contains__(self, q: Quad) -> bool:
        return q in self._flags

    def __iter__(self) -> Iterator[Quad]:
        return iter(list(self._flags))

    @property
    def count_total(self) -> int:
        return len(self._flags)

    @property
    def count_explicit(self) -> int:
        return self._explicit

    @property
    def count_inferred(self) -> int:
        return self._inferred

    def provenance(self, q: Quad) -> str | None:
        return self._flags.get(q)

    def graphs(self) -> list[Term]:
        """All graph IRIs with at least one quad, sorted."""
        return sorted((g for g, qs in self._by_g.items() if qs), key=lambda t: t.value)

    # -- mutation -----------------------------------------------------------

    def add_quads(self, quads: Sequence[Quad], provenance: str = EXPLICIT) -> int:
        """Insert quads; returns how many were not present before.

        Explicit provenance overrides a prior inferred flag for the same
        quad (the upgrade does not count as a new insertion).
        """
        if provenance not in (EXPLICIT, INFERRED):
            raise ValueError(f"unknown provenance flag: {provenance!r}")
        with self._lock:
            added = 0
            for idx, q in enumerate(quads):
                try:
                    if not isinstance(q, Quad):
                        raise QuadError(f"not a quad: {type(q).__name__}")
                    _check_quad_shape(q)
                except (QuadError, TermError) as exc:
                    raise QuadError(f"quad {idx}: {exc}") from None
                if self._insert(q, provenance):
                    added += 1
            return added

    def add(self, q: Quad, provenance: str = EXPLICIT) -> bool:
        """Insert one quad; True if it was new."""
        with self._lock:
            return self._insert(q, provenance)

    def _insert(self, q: Quad, provenance: str) -> bool:
        existing = self._flags.get(q)
        if existing is None:
            self._flags[q] = provenance
            self._seq[q] = self._next_seq
            self._next_seq += 1
            self._by_s.setdefault(q.subject, set()).add(q)
            self._by_p.setdefault(q.predicate, set()).add(q)
            self._by_o.setdefault(q.object, set()).add(q)
            self._by_g.setdefault(q.graph, set()).add(q)
            if provenance == EXPLICIT:
                self._explicit += 1
            else:
                self._inferred += 1
            return True
        if existing == INFERRED and provenance == EXPLICIT:
            self._flags[q] = EXPLICIT
            self._inferred -= 1
            self._explicit += 1
        return False

    def remove_quads(self, quads: Iterable[Quad]) -> int:
        """Remove quads (consolidation plumbing); returns how many existed."""
        with self._lock:
            removed = 0
            for q in list(quads):
                flag = self._flags.pop(q, None)
                if flag is None:
                    continue
                del self._seq[q]
                self._by_s[q.subject].discard(q)
                self._by_p[q.predicate].discard(q)
                self._by_o[q.object].discard(q)
                self._by_g[q.graph].discard(q)
                if flag == EXPLICIT:
                    self._explicit -= 1
                else:
                    self._inferred -= 1
                removed += 1
            return removed

    # -- matching -----------------------------------------------------------

    def match_quads(
        self,
        subject: Term | None = None,
        predicate: Term | None = None,
        object: Term | None = None,
        graph: Term | None = None,
    ) -> list[Quad]:
        """All quads matching the bound positions, in insertion order."""
        candidates: set[Quad] | None = None
        for bound, index in (
            (subject, self._by_s),
            (predicate, self._by_p),
            (object, self._by_o),
            (graph, self._by_g),
        ):
            if bound is None:
                continue
            bucket = index.get(bound)
            if not bucket:
                return []
            if candidates is None or len(bucket) < len(candidates):
                candidates = bucket
        if candidates is None:
            return list(self._flags)
        out = [
            q
            for q in candidates
            if (subject is None or q.subject == subject)
            and (predicate is None or q.predicate == predicate)
            and (object is None or q.object == object)
            and (graph is None or q.graph == graph)
        ]
        out.sort(key=self._seq.__getitem__)
        return out


# -- RDFS-lite forward chaining ----------------------------------------------


def rdfs_closure(store: QuadStore, hierarchy: ClassHierarchy) -> int:
    """Extend the store to its least fixpoint under the RDFS-lite rules.

    Rules: subclass transitivity feeding type propagation, subproperty
    propagation, and domain/range typing (range typing skips literal
    objects).  Derived quads land in the graph of their premise quad and
    are flagged inferred.  Idempotent; returns the number of quads added.
    """
    superclasses = hierarchy.superclass_map()
    superproperties = hierarchy.superproperty_map()
    domains_by_p: dict[str, set[str]] = {}
    for p, c in hierarchy.domains:
        domains_by_p.setdefault(p, set()).add(c)
    ranges_by_p: dict[str, set[str]] = {}
    for p, c in hierarchy.ranges:
        ranges_by_p.setdefault(p, set()).add(c)

    rdf_type = iri(RDF_TYPE)
    added = 0
    pending: list[Quad] = list(store)
    while pending:
        produced: list[Quad] = []
        for q in pending:
            g = q.graph
            p_iri = q.predicate.value
            if p_iri == RDF_TYPE and q.object.is_iri:
                for sup in superclasses.get(q.object.value, ()):
                    produced.append(Quad(q.subject, rdf_type, iri(sup), g))
            for sup_p in superproperties.get(p_iri, ()):
                produced.append(Quad(q.subject, iri(sup_p), q.object, g))
            for cls in domains_by_p.get(p_iri, ()):
                produced.append(Quad(q.subject, rdf_type, iri(cls), g))
            if not q.object.is_literal:
                for cls in ranges_by_p.get(p_iri, ()):
                    produced.append(Quad(q.object, rdf_type, iri(cls), g))
        pending = []
        for q in produced:
            if store.add(q, INFERRED):
                added += 1
                pending.append(q)
    return added


# -- N-Quads ------------------------------------------------------------------


def _escape_literal(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def format_term(t: Term) -> str:
    if t.kind == "iri":
        return f"<{t.value}>"
    if t.kind == "bnode":
        return f"_:{t.value}"
    lex = f'"{_escape_literal(t.value)}"'
    if t.language is not None:
        return f"{lex}@{t.language}"
    if t.datatype != XSD_STRING:
        return f"{lex}^^<{t.datatype}>"
    return lex


def format_quad(q: Quad) -> str:
    return (
        f"{format_term(q.subject)} {format_term(q.predicate)} "
        f"{format_term(q.object)} {format_term(q.graph)} ."
    )


def serialize_nquads(store: QuadStore, graph: Term | str | None = None) -> str:
    """Canonical N-Quads: one statement per line, lines sorted, UTF-8-safe.

    `graph` limits the export to one named graph; the graph IRI is always
    written explicitly (including the default graph's reserved IRI).
    """
    if isinstance(graph, str):
        graph = iri(graph)
    quads = store.match_quads(graph=graph) if graph is not None else list(store)
    lines = sorted(format_quad(q) for q in quads)
    return "\n".join(lines) + ("\n" if lines else "")


_UNESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape_literal(s: str, lineno: int) -> str:
    def sub(m: re.Match) -> str:
        if m.group(1):
            return chr(int(m.group(1), 16))
        if m.group(2):
            return chr(int(m.group(2), 16))
        ch = m.group(3)
        if ch not in _ECHAR:
            raise NQuadsError(lineno, f"invalid escape sequence \\{ch}")
        return _ECHAR[ch]

    return _UNESCAPE_RE.sub(sub, s)


class _LineScanner:
    def __init__(self, line: str, lineno: int):
        self.line = line
        self.pos = 0
        self.lineno = lineno

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.line)

    def error(self, message: str) -> NQuadsError:
        return NQuadsError(self.lineno, message)

    def term(self) -> Term:
        self.skip_ws()
        if self.pos >= len(self.line):
            raise self.error("unexpected end of statement")
        ch = self.line[self.pos]
        if ch == "<":
            end = self.line.find(">", self.pos + 1)
            if end < 0:
                raise self.error("unterminated IRI")
            value = self.line[self.pos + 1 : end]
            self.pos = end + 1
            try:
                return iri(value)
            except TermError as exc:
                raise self.error(str(exc)) from None
        if ch == "_" and self.line.startswith("_:", self.pos):
            m = re.match(r"_:([A-Za-z0-9][A-Za-z0-9_.\-]*)", self.line[self.pos :])
            if not m:
                raise self.error("invalid blank node label")
            self.pos += m.end()
            return bnode(m.group(1))
        if ch == '"':
            i = self.pos + 1
            while i < len(self.line):
                if self.line[i] == "\\":
                    i += 2
                    continue
                if self.line[i] == '"':
                    break
                i += 1
            else:
                raise self.error("unterminated literal")
            raw = self.line[self.pos + 1 : i]
            self.pos = i + 1
            lex = _unescape_literal(raw, self.lineno)
            if self.line.startswith("@", self.pos):
                m = re.match(r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)", self.line[self.pos :])
                if not m:
                    raise self.error("invalid language tag")
                self.pos += m.end()
                return literal(lex, language=m.group(1))
            if self.line.startswith("^^<", self.pos):
                end = self.line.find(">", self.pos + 3)
                if end < 0:
                    raise self.error("unterminated datatype IRI")
                dt = self.line[self.pos + 3 : end]
                self.pos = end + 1
                try:
                    return literal(lex, datatype=dt)
                except TermError as exc:
                    raise self.error(str(exc)) from None
            return literal(lex)
        raise self.error(f"unexpected character {ch!r}")


def parse_nquads(text: str) -> list[Quad]:
    """Parse N-Quads text; 3-term statements go to the default graph.

    Blank lines and full-line comments (#) are tolerated; syntax errors
    report the 1-based line number.
    """
    quads: list[Quad] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sc = _LineScanner(raw, lineno)
        s = sc.term()
        p = sc.term()
        o = sc.term()
        sc.skip_ws()
        g: Term | None = None
        if sc.pos < len(sc.line) and sc.line[sc.pos] not in ".":
            g = sc.term()
        sc.skip_ws()
        if not sc.line.startswith(".", sc.pos):
            raise NQuadsError(lineno, 'statement must end with "."')
        sc.pos += 1
        if not sc.at_end():
            raise NQuadsError(lineno, "trailing content after statement terminator")
        try:
            quads.append(quad(s, p, o, g))
        except (QuadError, TermError) as exc:
            raise NQuadsError(lineno, str(exc)) from None
    return quads


# -- comparison up to anonymous-node renaming ---------------------------------


def canonical_anon_quads(
    quads: Iterable[Quad], is_anon: Callable[[Term], bool] | None = None
) -> frozenset[str]:
    """Render quads with anonymous nodes replaced by neighbourhood hashes.

    Anonymous terms (default: blank nodes) receive labels derived from an
    iterated hash of their surrounding statements, so two graphs are equal
    under this rendering iff they are isomorphic up to anonymous-node
    renaming - provided anonymous nodes are distinguishable by their
    neighbourhood, which holds for the tree-shaped annotation data this
    toolkit produces.  Identical anonymous twins collapse (set semantics).
    """
    if is_anon is None:
        is_anon = lambda t: t.is_bnode
    quads = list(quads)
    anon_terms = {t for q in quads for t in (q.subject, q.object) if is_anon(t)}
    labels: dict[Term, str] = {t: "" for t in anon_terms}

    def render(t: Term) -> str:
        if t in labels:
            return f"?{labels[t]}"
        return format_term(t)

    for _ in range(len(anon_terms) + 1):
        new_labels: dict[Term, str] = {}
        for t in anon_terms:
            signature = sorted(
                f"{pos}|{render(q.subject)}|{format_term(q.predicate)}|{render(q.object)}|{format_term(q.graph)}"
                for q in quads
                for pos in ("s", "o")
                if (pos == "s" and q.subject == t) or (pos == "o" and q.object == t)
            )
            digest = hashlib.sha256("\n".join(signature).encode("utf-8")).hexdigest()
            new_labels[t] = digest[:16]
        if new_labels == labels:
            break
        labels = new_labels

    return frozenset(
        f"{render(q.subject)} {format_term(q.predicate)} {render(q.object)} {format_term(q.graph)}"
        for q in quads
    )


def isomorphic(
    a: Iterable[Quad],
    b: Iterable[Quad],
    is_anon_a: Callable[[Term], bool] | None = None,
    is_anon_b: Callable[[Term], bool] | None = None,
) -> bool:
    """Set equality of two quad collections up to anonymous-node renaming."""
    return canonical_anon_quads(a, is_anon_a) == canonical_anon_quads(b, is_anon_b)
