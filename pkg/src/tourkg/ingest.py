"""Migration pipeline: annotation documents into snapshot named graphs.

Each source's daily batch lands in its own `urn:snapshot:<source>:<date>`
graph, keeping history redundant by design.  Ingestion cleans (parse
check, optional DS validation), converts, deduplicates via skolem
determinism plus store set semantics, and runs inference; other graphs
stay bit-identical.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from threading import Lock
from typing import Any, Sequence

from . import vocab
from .crawler import CrawlJob, FetchPolicy, run_crawl
from .domainspec import DomainSpecification, validate
from .jsonld import DEFAULT_SKOLEM_POLICY, AnnotationError, SkolemPolicy, annotation_to_quads
from .rdf import (
    OWL_SAMEAS,
    EXPLICIT,
    ClassHierarchy,
    Quad,
    QuadStore,
    Term,
    iri,
    rdfs_closure,
)

P_NAME = vocab.SCHEMA + "name"
P_ADDRESS = vocab.SCHEMA + "address"
P_POSTAL_CODE = vocab.SCHEMA + "postalCode"


class ManifestError(ValueError):
    """Raised for malformed migration manifests."""


@dataclass(frozen=True)
class SnapshotId:
    source: str
    snapshot_date: date

    @property
    def graph_iri(self) -> str:
        return f"urn:snapshot:{self.source}:{self.snapshot_date.isoformat()}"


@dataclass
class IngestReport:
    source: str
    graph_iri: str
    documents_received: int = 0
    documents_rejected: int = 0
    rejections: list[tuple[str, str]] = field(default_factory=list)  # (doc id/index, reason)
    quads_written: int = 0
    duplicates_suppressed: int = 0
    entities_consolidated: int = 0
    inferred_added: int = 0

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "graph": self.graph_iri,
            "documentsReceived": self.documents_received,
            "documentsRejected": self.documents_rejected,
            "rejections": [{"document": d, "reason": r} for d, r in self.rejections],
            "quadsWritten": self.quads_written,
            "duplicatesSuppressed": self.duplicates_suppressed,
            "entitiesConsolidated": self.entities_consolidated,
            "inferredAdded": self.inferred_added,
        }


def ingest_snapshot(
    store: QuadStore,
    docs: Sequence[Any],
    snapshot: SnapshotId,
    ds: DomainSpecification | None = None,
    hierarchy: ClassHierarchy | None = None,
    skolem: SkolemPolicy = DEFAULT_SKOLEM_POLICY,
    infer: bool = True,
) -> IngestReport:
    """Ingest one source's documents into its snapshot graph.

    Documents failing the annotation check (or DS validation, when a DS
    is supplied) are rejected and itemized.  Re-ingesting the same batch
    is a no-op; other named graphs are untouched.
    """
    if hierarchy is None:
        hierarchy = vocab.default_hierarchy()
    report = IngestReport(source=snapshot.source, graph_iri=snapshot.graph_iri)
    for i, doc in enumerate(docs):
        report.documents_received += 1
        doc_id = str(doc.get("@id", f"doc-{i}")) if isinstance(doc, dict) else f"doc-{i}"
        try:
            quads = annotation_to_quads(doc, snapshot.graph_iri, skolem)
        except AnnotationError as exc:
            report.documents_rejected += 1
            report.rejections.append((doc_id, f"annotation: {exc}"))
            continue
        if ds is not None:
            verdict = validate(doc, ds, hierarchy, document_id=doc_id)
            if verdict.errors:
                report.documents_rejected += 1
                codes = ",".join(sorted({c for c, _p, _m in verdict.errors}))
                report.rejections.append((doc_id, f"validation: {codes}"))
                continue
        written = store.add_quads(quads, EXPLICIT)
        report.quads_written += written
        report.duplicates_suppressed += len(quads) - written
    if infer:
        report.inferred_added = rdfs_closure(store, hierarchy)
    return report


class IngestSink:
    """Crawler sink: accepts (document, graph IRI) pairs, possibly concurrently.

    Conversion failures are counted, not raised; quad insertion relies on
    the store's writer lock, with a sink-level lock for the counters.
    """

    def __init__(
        self,
        store: QuadStore,
        ds: DomainSpecification | None = None,
        hierarchy: ClassHierarchy | None = None,
        skolem: SkolemPolicy = DEFAULT_SKOLEM_POLICY,
    ):
        self.store = store
        self.ds = ds
        self.hierarchy = hierarchy or vocab.default_hierarchy()
        self.skolem = skolem
        self.documents_received = 0
        self.documents_rejected = 0
        self.rejections: list[tuple[str, str]] = []
        self.quads_written = 0
        self.duplicates_suppressed = 0
        self._lock = Lock()

    def __call__(self, doc: dict, graph_iri: str) -> None:
        with self._lock:
            self.documents_received += 1
            doc_id = str(doc.get("@id", f"doc-{self.documents_received}")) if isinstance(doc, dict) else "doc"
            try:
                quads = annotation_to_quads(doc, graph_iri, self.skolem)
            except AnnotationError as exc:
                self.documents_rejected += 1
                self.rejections.append((doc_id, f"annotation: {exc}"))
                return
            if self.ds is not None:
                verdict = validate(doc, self.ds, self.hierarchy, document_id=doc_id)
                if verdict.errors:
                    self.documents_rejected += 1
                    codes = ",".join(sorted({c for c, _p, _m in verdict.errors}))
                    self.rejections.append((doc_id, f"validation: {codes}"))
                    return
            written = self.store.add_quads(quads, EXPLICIT)
            self.quads_written += written
            self.duplicates_suppressed += len(quads) - written


def _normalize_key(text: str) -> str:
    return " ".join(text.split()).lower()


def _consolidation_key(store: QuadStore, subject: Term, graph: Term) -> tuple[str, str] | None:
    """(normalized name, normalized postal code), or None if either is absent.

    The postal code may sit on the subject itself or on its address node.
    """
    names = sorted(
        q.object.value
        for q in store.match_quads(subject=subject, predicate=iri(P_NAME), graph=graph)
        if q.object.is_literal
    )
    if not names:
        return None
    postals = sorted(
        q.object.value
        for q in store.match_quads(subject=subject, predicate=iri(P_POSTAL_CODE), graph=graph)
        if q.object.is_literal
    )
    if not postals:
        for aq in store.match_quads(subject=subject, predicate=iri(P_ADDRESS), graph=graph):
            postals.extend(
                q.object.value
                for q in store.match_quads(
                    subject=aq.object, predicate=iri(P_POSTAL_CODE), graph=graph
                )
                if q.object.is_literal
            )
        postals.sort()
    if not postals:
        return None
    return _normalize_key(names[0]), _normalize_key(postals[0])


def consolidate_entities(store: QuadStore, graph: Term | str) -> int:
    """Merge same-graph subjects sharing (name, postal code); returns merged pairs.

    The lexicographically smaller subject IRI becomes canonical; the
    other subject's statements are rewritten onto it and an owl:sameAs
    statement records the merge.  Idempotent.
    """
    if isinstance(graph, str):
        graph = iri(graph)
    subjects = {q.subject for q in store.match_quads(graph=graph)}
    by_key: dict[tuple[str, str], list[Term]] = {}
    for s in subjects:
        key = _consolidation_key(store, s, graph)
        if key is not None:
            by_key.setdefault(key, []).append(s)
    merged = 0
    for key in sorted(by_key):
        group = sorted(by_key[key], key=lambda t: t.value)
        if len(group) < 2:
            continue
        winner = group[0]
        for loser in group[1:]:
            loser_quads = store.match_quads(subject=loser, graph=graph)
            rewritten = [
                (Quad(winner, q.predicate, q.object, q.graph), store.provenance(q))
                for q in loser_quads
            ]
            store.remove_quads(loser_quads)
            for q, flag in rewritten:
                store.add(q, flag or EXPLICIT)
            store.add(Quad(winner, iri(OWL_SAMEAS), loser, graph), EXPLICIT)
            merged += 1
    return merged


# -- daily migrations -----------------------------------------------------------


def migrate_daily(
    store: QuadStore,
    sources: Sequence[tuple[str, Any]],
    migration_date: date,
    hierarchy: ClassHierarchy | None = None,
    skolem: SkolemPolicy = DEFAULT_SKOLEM_POLICY,
    fetch_policy: FetchPolicy | None = None,
) -> list[IngestReport]:
    """One snapshot per source, ingested in declared order.

    A source payload is either a document batch (sequence of dicts,
    optionally paired with a DS as `(docs, ds)`) or a CrawlJob.  A single
    aggregate inference pass runs at the end; its count is recorded on
    the last report.
    """
    if hierarchy is None:
        hierarchy = vocab.default_hierarchy()
    reports: list[IngestReport] = []
    for source_id, payload in sources:
        ds = None
        if isinstance(payload, tuple) and len(payload) == 2:
            payload, ds = payload
        if isinstance(payload, CrawlJob):
            sink = IngestSink(store, ds=ds, hierarchy=hierarchy, skolem=skolem)
            result = run_crawl(payload, sink, policy=fetch_policy)
            rejections = list(sink.rejections)
            if result.parse_failures:
                rejections.append(
                    ("crawl", f"unparseable JSON blocks: {result.parse_failures}")
                )
            report = IngestReport(
                source=source_id,
                graph_iri=";".join(sorted(result.graphs.values())),
                documents_received=sink.documents_received + result.parse_failures,
                documents_rejected=sink.documents_rejected + result.parse_failures,
                rejections=rejections,
                quads_written=sink.quads_written,
                duplicates_suppressed=sink.duplicates_suppressed,
            )
        else:
            snapshot = SnapshotId(source_id, migration_date)
            report = ingest_snapshot(
                store, payload, snapshot, ds=ds, hierarchy=hierarchy, skolem=skolem, infer=False
            )
        reports.append(report)
    inferred = rdfs_closure(store, hierarchy)
    if reports:
        reports[-1].inferred_added = inferred
    return reports


def load_manifest(text: str) -> list[dict]:
    """Migration manifest: JSON with a `sources` list.

    Each source carries `id`, `kind` (`documents` | `crawl`) and `path`;
    lifecycle extensions (`ds`, `mapping`, `records`, `offerSpaces`,
    `strategy`, `k`) pass through untouched.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON: {exc}") from None
    sources = obj.get("sources")
    if not isinstance(sources, list):
        raise ManifestError("manifest must have a sources list")
    for i, s in enumerate(sources):
        if not isinstance(s, dict) or not isinstance(s.get("id"), str):
            raise ManifestError(f"sources[{i}]: missing id")
        if s.get("kind") not in ("documents", "crawl"):
            raise ManifestError(f"sources[{i}]: kind must be documents or crawl")
        if not isinstance(s.get("path"), str):
            raise ManifestError(f"sources[{i}]: missing path")
    return sources
