"""Price-series analytics over historical snapshot graphs.

Snapshot and crawl graphs carry their date in the graph IRI
(`urn:snapshot:<source>:<YYYY-MM-DD>`, `urn:crawl:<host>:<YYYY-MM-DD>`).
For each month, every accommodation in a region contributes the minimum
and maximum of its offers' per-person-per-night prices; the series
reports the arithmetic means of those per-entity minima and maxima.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date

from . import vocab
from .offers import OfferSpaceError, cents_str, parse_money
from .rdf import RDF_TYPE, QuadStore, Term, iri, literal

_GRAPH_DATE_RE = re.compile(r"^urn:(?:snapshot|crawl):.+:(\d{4}-\d{2}-\d{2})$")
_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")

SCHEMA_OFFER = vocab.SCHEMA + "Offer"
P_ITEM_OFFERED = vocab.SCHEMA + "itemOffered"
P_PRICE_SPEC = vocab.SCHEMA + "priceSpecification"
P_PRICE = vocab.SCHEMA + "price"
P_ADDRESS = vocab.SCHEMA + "address"
P_LOCALITY = vocab.SCHEMA + "addressLocality"


class AnalyticsError(ValueError):
    pass


def parse_month(text: str) -> tuple[int, int]:
    m = _MONTH_RE.match(text)
    if not m:
        raise AnalyticsError(f"months are YYYY-MM, got {text!r}")
    year, month = int(m.group(1)), int(m.group(2))
    if not 1 <= month <= 12:
        raise AnalyticsError(f"bad month in {text!r}")
    return year, month


def months_between(start: tuple[int, int], end: tuple[int, int]) -> list[tuple[int, int]]:
    if start > end:
        raise AnalyticsError(f"month range is empty: {start} > {end}")
    out = []
    y, m = start
    while (y, m) <= end:
        out.append((y, m))
        m += 1
        if m > 12:
            y, m = y + 1, 1
    return out


@dataclass(frozen=True)
class PriceSeriesPoint:
    region: str
    year: int
    month: int
    avg_min_cents: int
    avg_max_cents: int
    accommodation_count: int

    def to_row(self) -> dict:
        return {
            "region": self.region,
            "year": self.year,
            "month": self.month,
            "avg_min": cents_str(self.avg_min_cents),
            "avg_max": cents_str(self.avg_max_cents),
            "count": self.accommodation_count,
        }


def graph_date(graph: Term) -> date | None:
    """Snapshot date encoded in a graph IRI, if any."""
    m = _GRAPH_DATE_RE.match(graph.value)
    if not m:
        return None
    try:
        return date.fromisoformat(m.group(1))
    except ValueError:
        return None


def entities_in_region(store: QuadStore, region: str) -> set[Term]:
    """Entities whose address locality equals `region` (any graph)."""
    out: set[Term] = set()
    for lq in store.match_quads(predicate=iri(P_LOCALITY), object=literal(region)):
        # locality sits on the address node; walk back to the addressed entity
        for aq in store.match_quads(predicate=iri(P_ADDRESS), object=lq.subject):
            out.add(aq.subject)
        out.add(lq.subject)  # locality asserted directly on the entity
    return out


def _offer_ppn_cents(store: QuadStore, offer: Term, graph: Term) -> int | None:
    """Per-person-per-night cents, read from the offer's unit price field."""
    for sq in store.match_quads(subject=offer, predicate=iri(P_PRICE_SPEC), graph=graph):
        for pq in store.match_quads(subject=sq.object, predicate=iri(P_PRICE), graph=graph):
            if pq.object.is_literal:
                try:
                    return parse_money(pq.object.value)
                except OfferSpaceError:
                    return None
    return None


def _mean_cents(values: list[int]) -> int:
    total = sum(values)
    q, r = divmod(total, len(values))
    return q + (1 if 2 * r >= len(values) else 0)


def price_series(
    store: QuadStore,
    region: str,
    from_month: tuple[int, int],
    to_month: tuple[int, int],
) -> list[PriceSeriesPoint]:
    """Monthly average minimum/maximum accommodation prices in a region.

    Entities without an address locality are excluded; months without
    data are omitted.
    """
    months = months_between(from_month, to_month)
    entities = entities_in_region(store, region)
    if not entities:
        return []
    graphs_by_month: dict[tuple[int, int], list[Term]] = {}
    for g in store.graphs():
        d = graph_date(g)
        if d is not None and (d.year, d.month) in set(months):
            graphs_by_month.setdefault((d.year, d.month), []).append(g)
    points = []
    for ym in months:
        per_entity: dict[Term, list[int]] = {}
        for g in graphs_by_month.get(ym, []):
            for tq in store.match_quads(
                predicate=iri(RDF_TYPE), object=iri(SCHEMA_OFFER), graph=g
            ):
                offer = tq.subject
                targets = store.match_quads(
                    subject=offer, predicate=iri(P_ITEM_OFFERED), graph=g
                )
                for t in targets:
                    if t.object in entities:
                        ppn = _offer_ppn_cents(store, offer, g)
                        if ppn is not None:
                            per_entity.setdefault(t.object, []).append(ppn)
        if not per_entity:
            continue
        minima = [min(v) for v in per_entity.values()]
        maxima = [max(v) for v in per_entity.values()]
        points.append(
            PriceSeriesPoint(
                region=region,
                year=ym[0],
                month=ym[1],
                avg_min_cents=_mean_cents(minima),
                avg_max_cents=_mean_cents(maxima),
                accommodation_count=len(per_entity),
            )
        )
    return points


def compare_regions(
    store: QuadStore,
    regions: list[str],
    from_month: tuple[int, int],
    to_month: tuple[int, int],
) -> list[tuple[str, tuple[int, int], PriceSeriesPoint | None]]:
    """Per-region series aligned on months; cells are None where a region
    has no data for a month that another region covers."""
    series = {r: {(p.year, p.month): p for p in price_series(store, r, from_month, to_month)} for r in regions}
    covered = sorted({ym for s in series.values() for ym in s})
    table: list[tuple[str, tuple[int, int], PriceSeriesPoint | None]] = []
    for region in regions:
        for ym in covered:
            table.append((region, ym, series[region].get(ym)))
    return table
