"""Generate the JSON-LD fidelity corpus and its reference N-Quads.

Writes tests/fixtures/corpus/docs/dNN.jsonld and the expected output of
the independent reference pipeline to tests/fixtures/corpus/expected/dNN.nq.
Both sides are committed; tests never regenerate them.

Run from the repository root: python3 tools/gen_jsonld_fixtures.py
"""
from __future__ import annotations

import json
from pathlib import Path

from reference_jsonld import to_nquads

SCHEMA = "https://schema.org/"
FIXTURE_GRAPH = "urn:kg:fixture"

DOCS: dict[str, dict] = {
    "d01": {"@context": SCHEMA, "@type": "Hotel", "name": "Alpenhof"},
    "d02": {
        "@context": SCHEMA,
        "@type": "Hotel",
        "@id": "https://example.org/hotels/alpenhof",
        "name": "Alpenhof",
        "telephone": "+43 512 000000",
    },
    "d03": {
        "@context": SCHEMA,
        "@type": "Hotel",
        "name": "Alpenhof",
        "address": {"@type": "PostalAddress", "postalCode": "6020"},
    },
    "d04": {
        "@context": SCHEMA,
        "@type": "Hotel",
        "name": "Hotel Seespitz",
        "address": {
            "@type": "PostalAddress",
            "streetAddress": "Seeweg 12",
            "postalCode": "6100",
            "addressLocality": "Seefeld",
            "addressCountry": "AT",
        },
        "geo": {"@type": "GeoCoordinates", "latitude": 47.3297, "longitude": 11.1875},
        "starRating": 4,
        "petsAllowed": True,
        "priceRange": "€€€",
    },
    "d05": {
        "@context": SCHEMA,
        "@type": "Restaurant",
        "name": "Gasthof Goldener Adler",
        "servesCuisine": ["Tyrolean", "Austrian"],
        "openingHours": "Mo-Su 11:00-23:00",
        "address": {"@type": "PostalAddress", "addressLocality": "Innsbruck", "postalCode": "6020"},
    },
    "d06": {
        "@context": SCHEMA,
        "@type": "Event",
        "name": "Bergsilvester",
        "startDate": "2017-12-31",
        "endDate": "2018-01-01",
        "location": {
            "@type": "Place",
            "name": "Altstadt",
            "address": {"@type": "PostalAddress", "addressLocality": "Innsbruck"},
        },
    },
    "d07": {
        "@context": SCHEMA,
        "@type": "Offer",
        "name": "double room, half board, 3 nights",
        "price": "414.00",
        "priceCurrency": "EUR",
        "itemOffered": {"@id": "https://example.org/hotels/alpenhof"},
        "validFrom": "2018-02-01",
        "validThrough": "2018-02-04",
        "priceSpecification": {
            "@type": "UnitPriceSpecification",
            "price": "69.00",
            "priceCurrency": "EUR",
            "unitText": "person night",
        },
    },
    "d08": {
        "@context": SCHEMA,
        "@type": "SkiResort",
        "name": "Skigebiet Patscherkofel",
        "amenityFeature": ["ski school", "night skiing", "rental"],
        "url": "https://example.org/patscherkofel",
    },
    "d09": {
        "@context": SCHEMA,
        "@type": ["Resort", "SportsActivityLocation"],
        "name": "Alpenresort Schwarz",
        "telephone": "+43 5264 5212",
    },
    "d10": {
        "@context": SCHEMA,
        "@type": "Hotel",
        "name": "Hotel Schönruh",
        "description": [
            {"@value": "Ruhiges Hotel über dem Inntal", "@language": "de"},
            {"@value": "Quiet hotel above the Inn valley", "@language": "en"},
        ],
    },
    "d11": {
        "@context": SCHEMA,
        "@type": "Offer",
        "price": 95,
        "priceCurrency": "EUR",
        "itemOffered": {"@id": "https://example.org/rooms/101"},
        "validFrom": {"@value": "2018-02-01", "@type": "http://www.w3.org/2001/XMLSchema#date"},
    },
    "d12": {
        "@context": SCHEMA,
        "@type": "TouristAttraction",
        "name": "Goldenes Dachl",
        "containedInPlace": {"@id": "https://example.org/places/innsbruck"},
        "touristType": "sightseeing",
    },
    "d13": {
        "@context": SCHEMA,
        "@type": "TouristTrip",
        "name": "Zillertal Höhenstraße",
        "description": "Panoramic alpine road through the Zillertal",
        "touristType": ["families", "motorists"],
    },
    "d14": {
        "@context": SCHEMA,
        "@type": "LodgingBusiness",
        "name": "Berghaus Tirol",
        "event": {
            "@type": "Event",
            "name": "Käseverkostung",
            "startDate": "2018-03-10",
            "location": {
                "@type": "Place",
                "name": "Stube",
                "address": {"@type": "PostalAddress", "streetAddress": "Dorfplatz 1"},
            },
        },
    },
    "d15": {
        "@context": SCHEMA,
        "@type": "Person",
        "name": "Maria Gruber",
        "email": "maria@example.org",
        "address": {"@type": "PostalAddress", "addressLocality": "Mayrhofen", "postalCode": "6290"},
    },
    "d16": {
        "@context": SCHEMA,
        "@type": "Organization",
        "name": "Tourismusverband Seefeld",
        "legalName": "TVB Seefeld GmbH",
        "foundingDate": "1998-04-01",
        "makesOffer": {
            "@type": "Offer",
            "name": "guest card",
            "price": 0,
            "priceCurrency": "EUR",
        },
    },
    "d17": {
        "@context": SCHEMA,
        "@type": "Hostel",
        "name": "Jugendherberge Innsbruck",
        "numberOfRooms": 48,
        "checkinTime": "14:00",
        "petsAllowed": False,
    },
    "d18": {
        "@context": SCHEMA,
        "@type": "BedAndBreakfast",
        "name": "Pension Edelweiß",
        "aggregateRating": {"@type": "AggregateRating", "ratingValue": 4.6, "bestRating": 5},
    },
    "d19": {
        "@context": SCHEMA,
        "@type": "Apartment",
        "name": "Ferienwohnung Talblick",
        "occupancy": {"@type": "QuantitativeValue", "value": 4, "unitText": "person"},
        "numberOfRooms": 3,
    },
    "d20": {
        "@context": SCHEMA,
        "@type": "Campground",
        "name": "Camping Seeblick",
        "geo": {"@type": "GeoCoordinates", "latitude": 47.8432, "longitude": 12.4572},
        "smokingAllowed": False,
    },
    "d21": {
        "@context": SCHEMA,
        "@type": "Mountain",
        "name": "Ahornspitze",
        "elevation": 2973.4,
        "containedInPlace": {"@id": "https://example.org/places/zillertal"},
    },
    "d22": {
        "@context": SCHEMA,
        "@type": "TouristInformationCenter",
        "name": "Infobüro Mayrhofen",
        "openingHoursSpecification": [
            {"@type": "OpeningHoursSpecification", "dayOfWeek": "Monday", "validFrom": "2018-01-01"},
            {"@type": "OpeningHoursSpecification", "dayOfWeek": "Saturday", "validFrom": "2018-01-06"},
        ],
        "telephone": "+43 5285 6760",
    },
}


def main() -> None:
    root = Path(__file__).resolve().parents[1]
    docs_dir = root / "tests" / "fixtures" / "corpus" / "docs"
    expected_dir = root / "tests" / "fixtures" / "corpus" / "expected"
    docs_dir.mkdir(parents=True, exist_ok=True)
    expected_dir.mkdir(parents=True, exist_ok=True)
    for name, doc in DOCS.items():
        (docs_dir / f"{name}.jsonld").write_text(
            json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8"
        )
        (expected_dir / f"{name}.nq").write_text(to_nquads(doc, FIXTURE_GRAPH), "utf-8")
    print(f"wrote {len(DOCS)} documents and reference fixtures")


if __name__ == "__main__":
    main()
