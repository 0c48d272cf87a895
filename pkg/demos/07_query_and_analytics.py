"""
Pattern queries and price-series analytics
==========================================

Builds five months of offer snapshots for two regions, runs a basic
graph-pattern query, and derives the monthly average minimum/maximum
price per person per night - the analysis the history graphs exist for.
"""
from datetime import date

from tourkg.analytics import compare_regions, price_series
from tourkg.ingest import SnapshotId, ingest_snapshot
from tourkg.offers import ConcreteOffer, offers_to_annotations
from tourkg.query import evaluate, parse_query
from tourkg.rdf import QuadStore

HOTELS = {
    "Mayrhofen": [("https://example.org/hotels/m1", "Gasthof Zillertal", 6200, 7800)],
    "Seefeld": [("https://example.org/hotels/s1", "Hotel Seespitz", 9800, 12500)],
}
MONTHS = [(2017, 12), (2018, 1), (2018, 2), (2018, 3), (2018, 4)]

store = QuadStore()
static = [
    {
        "@context": "https://schema.org/",
        "@type": "Hotel",
        "@id": acc,
        "name": name,
        "address": {"@type": "PostalAddress", "addressLocality": region},
    }
    for region, hotels in HOTELS.items()
    for acc, name, _lo, _hi in hotels
]
ingest_snapshot(store, static, SnapshotId("dmo", date(2017, 12, 1)))

for year, month in MONTHS:
    docs = []
    for region, hotels in HOTELS.items():
        for acc, _name, lo, hi in hotels:
            bump = 3500 if (region, month) == ("Seefeld", 2) else 0
            for day, cents in ((10, lo + bump), (20, hi + bump)):
                # one person, one night: the total is the per-person-per-night price
                offer = ConcreteOffer(acc, "double", date(year, month, day), 1, 1, "breakfast", cents)
                docs.extend(offers_to_annotations([offer], acc))
    ingest_snapshot(store, docs, SnapshotId("offers", date(year, month, 15)))

print(f"store: {store.count_total} statements across {len(store.graphs())} graphs\n")

query = parse_query(
    "SELECT ?hotel ?name\n"
    "PATTERN ?hotel rdf:type schema:Hotel\n"
    "PATTERN ?hotel schema:name ?name"
)
print("hotels in the graph:")
for row in evaluate(store, query):
    print(f"  {row['name'].value}  <{row['hotel'].value}>")

print("\nSeefeld price series (avg min / avg max per person per night):")
for point in price_series(store, "Seefeld", (2017, 12), (2018, 4)):
    row = point.to_row()
    print(f"  {point.year}-{point.month:02d}: {row['avg_min']} / {row['avg_max']} EUR")

print("\nregion comparison (February peaks in Seefeld):")
for region, (year, month), point in compare_regions(store, ["Seefeld", "Mayrhofen"], (2017, 12), (2018, 4)):
    cell = "-" if point is None else f"{point.to_row()['avg_min']}..{point.to_row()['avg_max']}"
    print(f"  {region:>9} {year}-{month:02d}: {cell}")
