"""Command-line entry point orchestrating the knowledge-graph lifecycle.

Subcommands: validate, map, offers materialize|price, crawl, ingest,
migrate, query, analyze price-series|compare, serve, export.  Exit
codes: 0 success, 1 domain failure (invalid documents, total source
rejection), 2 usage error.  Store state persists between commands as a
canonical N-Quads file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .analytics import compare_regions, parse_month, price_series
from .broker import BrokerServer, BrokerService, ProviderDescriptor, ProviderRegistry, TokenTable
from .crawler import CrawlJob, FetchPolicy, load_seeds, run_crawl
from .domainspec import DomainSpecError, load_ds, validate
from .ingest import (
    IngestSink,
    ManifestError,
    SnapshotId,
    consolidate_entities,
    ingest_snapshot,
    load_manifest,
    migrate_daily,
)
from .jsonld import AnnotationError, parse_annotation
from .mapping import MappingError, MappingSpecError, apply_batch, load_mapping, load_records
from .offers import (
    OfferBoundsError,
    OfferSpaceError,
    load_offer_space,
    materialize_representatives,
    offers_to_annotations,
    price_offer,
)
from .query import QueryError, evaluate, parse_query, rows_to_plain
from .rdf import NQuadsError, QuadStore, iri, parse_nquads, rdfs_closure, serialize_nquads
from . import vocab

USAGE_ERROR = 2
DOMAIN_ERROR = 1


@dataclass
class Config:
    store: str = "kg.nq"
    manifest: str | None = None
    ds_dir: str | None = None
    mapping_dir: str | None = None
    broker_host: str = "127.0.0.1"
    broker_port: int = 8080
    default_provider: str | None = None
    token_ttl_s: float = 900.0
    fetch_timeout_s: float = 10.0
    base_dir: Path = field(default_factory=Path)

    @classmethod
    def load(cls, path: str) -> "Config":
        p = Path(path)
        obj = json.loads(p.read_text("utf-8"))
        broker = obj.get("broker", {})
        crawler = obj.get("crawler", {})
        port = int(broker.get("port", 8080))
        if not 1 <= port <= 65535:
            raise ValueError(f"broker port out of range: {port}")
        return cls(
            store=obj.get("store", "kg.nq"),
            manifest=obj.get("manifest"),
            ds_dir=obj.get("dsDir"),
            mapping_dir=obj.get("mappingDir"),
            broker_host=broker.get("host", "127.0.0.1"),
            broker_port=port,
            default_provider=broker.get("defaultProvider"),
            token_ttl_s=float(broker.get("tokenTtlS", 900)),
            fetch_timeout_s=float(crawler.get("timeoutS", 10)),
            base_dir=p.parent,
        )

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def load_store(path: str | Path) -> QuadStore:
    store = QuadStore()
    p = Path(path)
    if p.exists():
        store.add_quads(parse_nquads(p.read_text("utf-8")))
    return store


def save_store(store: QuadStore, path: str | Path) -> None:
    Path(path).write_text(serialize_nquads(store), "utf-8")


def _emit(args, payload, csv_rows=None, csv_header=None) -> None:
    if getattr(args, "format", "json") == "csv" and csv_rows is not None:
        out = io.StringIO()
        writer = csv.writer(out)
        if csv_header:
            writer.writerow(csv_header)
        for row in csv_rows:
            writer.writerow(row)
        sys.stdout.write(out.getvalue())
    else:
        json.dump(payload, sys.stdout, indent=2, ensure_ascii=False)
        sys.stdout.write("\n")


def _load_docs_arg(paths: list[str]) -> tuple[list[dict], list[tuple[str, str]]]:
    """Documents from .jsonld/.json files or directories of them."""
    docs: list[dict] = []
    failures: list[tuple[str, str]] = []
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")) + sorted(p.glob("*.jsonld")))
        else:
            files.append(p)
    for f in files:
        try:
            docs.append(json.loads(f.read_text("utf-8")))
        except (OSError, ValueError) as exc:
            failures.append((str(f), str(exc)))
    return docs, failures


# -- subcommands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    ds = load_ds(Path(args.ds).read_text("utf-8"))
    worst = 0
    reports = []
    for doc_path in args.documents:
        try:
            doc = parse_annotation(Path(doc_path).read_text("utf-8"))
        except AnnotationError as exc:
            reports.append(
                {
                    "documentId": doc_path,
                    "verdict": "invalid",
                    "errors": [{"code": "ParseError", "path": "", "message": str(exc)}],
                    "warnings": [],
                }
            )
            worst = DOMAIN_ERROR
            continue
        report = validate(doc, ds, document_id=doc_path)
        reports.append(report.to_dict())
        if report.errors:
            worst = DOMAIN_ERROR
    _emit(args, reports if len(reports) > 1 else reports[0])
    return worst


def cmd_map(args) -> int:
    spec = load_mapping(Path(args.mapping).read_text("utf-8"))
    records = load_records(Path(args.records).read_text("utf-8"), spec.source_format)
    docs, errors = apply_batch(spec, records)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for i, doc in enumerate(docs):
            (out_dir / f"doc-{i:04d}.jsonld").write_text(
                json.dumps(doc, indent=2, ensure_ascii=False), "utf-8"
            )
        _emit(args, {"written": len(docs), "errors": [{"record": i, "message": m} for i, m in errors]})
    else:
        _emit(args, {"documents": docs, "errors": [{"record": i, "message": m} for i, m in errors]})
    return DOMAIN_ERROR if errors and not docs else 0


def cmd_offers_materialize(args) -> int:
    space = load_offer_space(Path(args.space).read_text("utf-8"))
    window = (
        date.fromisoformat(args.window_from) if args.window_from else space.validity[0],
        date.fromisoformat(args.window_to) if args.window_to else space.validity[1],
    )
    offers = materialize_representatives(space, window, k=args.k, strategy=args.strategy)
    provider = f"urn:provider:{args.provider}" if args.provider else None
    docs = offers_to_annotations(offers, space.accommodation_id, provider_iri=provider)
    _emit(args, docs)
    return 0


def cmd_offers_price(args) -> int:
    space = load_offer_space(Path(args.space).read_text("utf-8"))
    offer = price_offer(
        space,
        room_id=args.room,
        check_in=date.fromisoformat(args.check_in),
        nights=args.nights,
        persons=args.persons,
        board_id=args.board,
    )
    docs = offers_to_annotations([offer], space.accommodation_id)
    _emit(args, docs[0])
    return 0


def cmd_crawl(args) -> int:
    store_file = _store_path(args)
    store = load_store(store_file)
    seeds = load_seeds(Path(args.seeds).read_text("utf-8"))
    job = CrawlJob(
        seeds=tuple(seeds),
        crawl_date=date.fromisoformat(args.date),
        max_pages_per_site=args.max_pages,
        per_host_delay_ms=args.delay_ms,
    )
    sink = IngestSink(store)
    result = run_crawl(job, sink, policy=FetchPolicy(timeout=args.timeout))
    inferred = rdfs_closure(store, vocab.default_hierarchy())
    save_store(store, store_file)
    payload = result.to_dict()
    payload["quadsWritten"] = sink.quads_written
    payload["inferredAdded"] = inferred
    _emit(args, payload)
    return 0


def cmd_ingest(args) -> int:
    store_file = _store_path(args)
    store = load_store(store_file)
    docs, failures = _load_docs_arg(args.documents)
    ds = load_ds(Path(args.ds).read_text("utf-8")) if args.ds else None
    snapshot = SnapshotId(args.source, date.fromisoformat(args.date))
    report = ingest_snapshot(store, docs, snapshot, ds=ds)
    for name, message in failures:
        report.documents_received += 1
        report.documents_rejected += 1
        report.rejections.append((name, f"file: {message}"))
    save_store(store, store_file)
    _emit(args, report.to_dict())
    received, rejected = report.documents_received, report.documents_rejected
    return DOMAIN_ERROR if received > 0 and rejected == received else 0


def run_lifecycle(config: Config, run_date: date, store_path: str | None = None) -> tuple[int, list]:
    """The full pipeline: map, validate, materialize offers, crawl, ingest,
    infer, consolidate, persist.  Returns (exit status, reports)."""
    if config.manifest is None:
        raise FileNotFoundError("no migration manifest configured")
    manifest_path = config.resolve(config.manifest)
    if not manifest_path.exists():
        raise FileNotFoundError(f"manifest not found: {manifest_path}")
    sources = load_manifest(manifest_path.read_text("utf-8"))
    store_file = Path(store_path) if store_path else config.resolve(config.store)
    store = load_store(store_file)

    batches = []
    extra_failures: dict[str, list[tuple[str, str]]] = {}
    for source in sources:
        sid = source["id"]
        ds = None
        if source.get("ds"):
            ds = load_ds(config.resolve(source["ds"]).read_text("utf-8"))
        if source["kind"] == "crawl":
            seeds = load_seeds(config.resolve(source["path"]).read_text("utf-8"))
            job = CrawlJob(
                seeds=tuple(seeds),
                crawl_date=run_date,
                max_pages_per_site=int(source.get("maxPages", 100)),
                per_host_delay_ms=int(source.get("delayMs", 0)),
            )
            batches.append((sid, (job, ds) if ds else job))
            continue
        docs: list[dict] = []
        failures: list[tuple[str, str]] = []
        if source.get("mapping") and source.get("records"):
            spec = load_mapping(config.resolve(source["mapping"]).read_text("utf-8"))
            records = load_records(
                config.resolve(source["records"]).read_text("utf-8"), spec.source_format
            )
            mapped, errors = apply_batch(spec, records)
            docs.extend(mapped)
            failures.extend((f"record-{i}", m) for i, m in errors)
        path = config.resolve(source["path"])
        if path.exists():
            loaded, file_failures = _load_docs_arg([str(path)])
            docs.extend(loaded)
            failures.extend(file_failures)
        if source.get("offerSpaces"):
            spaces_dir = config.resolve(source["offerSpaces"])
            for space_file in sorted(spaces_dir.glob("*.json")):
                space = load_offer_space(space_file.read_text("utf-8"))
                offers = materialize_representatives(
                    space,
                    space.validity,
                    k=int(source.get("k", 5)),
                    strategy=source.get("strategy", "global-min-first"),
                )
                provider = source.get("provider")
                docs.extend(
                    offers_to_annotations(
                        offers,
                        space.accommodation_id,
                        provider_iri=f"urn:provider:{provider}" if provider else None,
                    )
                )
        batches.append((sid, (docs, ds) if ds else docs))
        if failures:
            extra_failures[sid] = failures

    reports = migrate_daily(
        store, batches, run_date, fetch_policy=FetchPolicy(timeout=config.fetch_timeout_s)
    )
    for report in reports:
        for name, message in extra_failures.get(report.source, []):
            report.documents_received += 1
            report.documents_rejected += 1
            report.rejections.append((name, message))
        for graph_iri in report.graph_iri.split(";"):
            if graph_iri:
                report.entities_consolidated += consolidate_entities(store, graph_iri)
    save_store(store, store_file)
    failed = any(
        r.documents_received > 0 and r.documents_rejected == r.documents_received
        for r in reports
    )
    return (DOMAIN_ERROR if failed else 0, reports)


def cmd_migrate(args) -> int:
    config_path = args.config or getattr(args, "global_config", None)
    store_override = args.store or getattr(args, "global_store", None)
    if config_path:
        config = Config.load(config_path)
    else:
        if not args.manifest:
            print("migrate needs --config or --manifest", file=sys.stderr)
            return USAGE_ERROR
        manifest_path = Path(args.manifest)
        config = Config(
            store=store_override or "kg.nq",
            manifest=manifest_path.name,
            base_dir=manifest_path.parent,
        )
    if store_override:
        config.store = store_override
    try:
        status, reports = run_lifecycle(config, date.fromisoformat(args.date))
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    _emit(args, [r.to_dict() for r in reports])
    return status


def cmd_query(args) -> int:
    store = load_store(_store_path(args))
    query = parse_query(Path(args.query).read_text("utf-8"))
    rows = rows_to_plain(evaluate(store, query))
    _emit(
        args,
        rows,
        csv_rows=[[row.get(v, "") for v in query.projection] for row in rows],
        csv_header=query.projection,
    )
    return 0


def cmd_analyze_series(args) -> int:
    store = load_store(_store_path(args))
    points = price_series(store, args.region, parse_month(args.month_from), parse_month(args.month_to))
    rows = [p.to_row() for p in points]
    _emit(
        args,
        rows,
        csv_rows=[
            [r["region"], r["year"], r["month"], r["avg_min"], r["avg_max"], r["count"]]
            for r in rows
        ],
        csv_header=["region", "year", "month", "avg_min", "avg_max", "count"],
    )
    return 0


def cmd_analyze_compare(args) -> int:
    store = load_store(_store_path(args))
    regions = [r.strip() for r in args.regions.split(",") if r.strip()]
    table = compare_regions(
        store, regions, parse_month(args.month_from), parse_month(args.month_to)
    )
    rows = []
    for region, (year, month), point in table:
        if point is None:
            rows.append(
                {"region": region, "year": year, "month": month, "avg_min": "", "avg_max": "", "count": ""}
            )
        else:
            rows.append(point.to_row())
    _emit(
        args,
        rows,
        csv_rows=[
            [r["region"], r["year"], r["month"], r["avg_min"], r["avg_max"], r["count"]]
            for r in rows
        ],
        csv_header=["region", "year", "month", "avg_min", "avg_max", "count"],
    )
    return 0


def cmd_serve(args) -> int:
    store = load_store(_store_path(args))
    if not 1 <= args.port <= 65535:
        print(f"port out of range: {args.port}", file=sys.stderr)
        return USAGE_ERROR
    service = BrokerService(
        store,
        ProviderRegistry(),
        TokenTable(ttl_s=args.token_ttl),
        default_provider_id=args.default_provider,
    )
    if args.provider_file:
        descriptor = ProviderDescriptor.from_json(
            json.loads(Path(args.provider_file).read_text("utf-8"))
        )
        service.registry.register(descriptor)
    server = BrokerServer(service, host=args.host, port=args.port)
    service.action_base_url = server.base_url
    print(f"broker listening on {server.base_url}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def cmd_export(args) -> int:
    store = load_store(_store_path(args))
    graph = iri(args.graph) if args.graph else None
    sys.stdout.write(serialize_nquads(store, graph))
    return 0


def _store_path(args) -> str:
    path = getattr(args, "store", None) or getattr(args, "global_store", None)
    if not path:
        raise FileNotFoundError("no store file given (use --store)")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tourkg", description="Tourism knowledge-graph toolkit"
    )
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--store", dest="global_store", help="default store file")
    parser.add_argument("--config", dest="global_config", help="default config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate annotation documents against a DS")
    p.add_argument("--ds", required=True)
    p.add_argument("documents", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("map", help="apply a mapping spec to source records")
    p.add_argument("--mapping", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--out", help="directory for one .jsonld file per document")
    p.set_defaults(func=cmd_map)

    offers = sub.add_parser("offers", help="offer-space operations")
    offers_sub = offers.add_subparsers(dest="offers_command", required=True)
    p = offers_sub.add_parser("materialize", help="representative offers for publication")
    p.add_argument("--space", required=True)
    p.add_argument("--from", dest="window_from")
    p.add_argument("--to", dest="window_to")
    p.add_argument("-k", type=int, default=5)
    p.add_argument(
        "--strategy",
        choices=("global-min-first", "per-room-min", "per-month-min"),
        default="global-min-first",
    )
    p.add_argument("--provider", help="stamp offers with a seller provider id")
    p.set_defaults(func=cmd_offers_materialize)
    p = offers_sub.add_parser("price", help="price one booking combination")
    p.add_argument("--space", required=True)
    p.add_argument("--room", required=True)
    p.add_argument("--check-in", required=True)
    p.add_argument("--nights", type=int, required=True)
    p.add_argument("--persons", type=int, required=True)
    p.add_argument("--board", required=True)
    p.set_defaults(func=cmd_offers_price)

    p = sub.add_parser("crawl", help="crawl seed sites and ingest annotations")
    p.add_argument("--seeds", required=True)
    p.add_argument("--date", required=True)
    p.add_argument("--store")
    p.add_argument("--max-pages", type=int, default=100)
    p.add_argument("--delay-ms", type=int, default=0)
    p.add_argument("--timeout", type=float, default=10.0)
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("ingest", help="ingest documents into one snapshot graph")
    p.add_argument("--store")
    p.add_argument("--source", required=True)
    p.add_argument("--date", required=True)
    p.add_argument("--ds")
    p.add_argument("documents", nargs="+")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("migrate", help="run the full lifecycle over a manifest")
    p.add_argument("--config")
    p.add_argument("--manifest")
    p.add_argument("--store")
    p.add_argument("--date", required=True)
    p.set_defaults(func=cmd_migrate)

    p = sub.add_parser("query", help="evaluate a pattern query file")
    p.add_argument("--store")
    p.add_argument("query")
    p.set_defaults(func=cmd_query)

    analyze = sub.add_parser("analyze", help="price analytics over snapshots")
    analyze_sub = analyze.add_subparsers(dest="analyze_command", required=True)
    p = analyze_sub.add_parser("price-series", help="monthly price series for a region")
    p.add_argument("--store")
    p.add_argument("--region", required=True)
    p.add_argument("--from", dest="month_from", required=True)
    p.add_argument("--to", dest="month_to", required=True)
    p.set_defaults(func=cmd_analyze_series)
    p = analyze_sub.add_parser("compare", help="aligned series for several regions")
    p.add_argument("--store")
    p.add_argument("--regions", required=True, help="comma-separated region names")
    p.add_argument("--from", dest="month_from", required=True)
    p.add_argument("--to", dest="month_to", required=True)
    p.set_defaults(func=cmd_analyze_compare)

    p = sub.add_parser("serve", help="run the action-broker HTTP service")
    p.add_argument("--store")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--default-provider")
    p.add_argument("--provider-file", help="descriptor JSON to register at startup")
    p.add_argument("--token-ttl", type=float, default=900.0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="write the store as canonical N-Quads")
    p.add_argument("--store")
    p.add_argument("--graph")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        AnnotationError,
        DomainSpecError,
        MappingError,
        MappingSpecError,
        ManifestError,
        NQuadsError,
        OfferBoundsError,
        OfferSpaceError,
        QueryError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
