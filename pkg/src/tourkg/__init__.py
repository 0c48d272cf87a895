"""tourkg: build, validate, populate and serve a schema.org tourism knowledge graph."""

from importlib import resources

from .rdf import (
    DEFAULT_GRAPH_IRI,
    EXPLICIT,
    INFERRED,
    ClassHierarchy,
    Quad,
    QuadStore,
    Term,
    bnode,
    iri,
    literal,
    parse_nquads,
    quad,
    rdfs_closure,
    serialize_nquads,
)
from .jsonld import (
    DEFAULT_SKOLEM_POLICY,
    AnnotationError,
    SkolemPolicy,
    annotation_to_quads,
    parse_annotation,
    quads_to_annotation,
    skolemize_hash,
)
from .domainspec import DomainSpecification, ValidationReport, load_ds, validate, validate_batch
from .mapping import MappingSpec, apply_batch, apply_mapping, load_mapping
from .offers import (
    ConcreteOffer,
    OfferSpace,
    combination_count,
    load_offer_space,
    materialize_representatives,
    offers_to_annotations,
    price_offer,
)
from .crawler import CrawlJob, CrawlResult, extract_jsonld, fetch_page, run_crawl
from .ingest import IngestReport, SnapshotId, consolidate_entities, ingest_snapshot, migrate_daily
from .query import PatternQuery, parse_query, evaluate
from .analytics import PriceSeriesPoint, compare_regions, price_series
from .broker import (
    BookingResult,
    BrokerService,
    ProviderDescriptor,
    ProviderRegistry,
    SearchRequest,
    TokenTable,
    execute_action,
    handle_search,
)

__version__ = "0.1.0"


def bundled_ds(name: str) -> str:
    """JSON text of a bundled domain specification ("hotel", "offer")."""
    return (resources.files("tourkg") / "data" / "ds" / f"{name}.json").read_text("utf-8")
