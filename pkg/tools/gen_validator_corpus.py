"""Generate the seeded validator corpus: clean docs plus planted defects.

Clean documents are built mechanically from the bundled Hotel DS (all
required properties present, values in range); each defective document
plants exactly one defect.  The seeding manifest records every planted
defect with its expected code and path - the test oracle.

Run from the repository root: python3 tools/gen_validator_corpus.py
"""
from __future__ import annotations

import json
import random
from pathlib import Path

SCHEMA = "https://schema.org/"

NAMES = [
    "Alpenhof", "Seespitz", "Goldener Adler", "Edelweiß", "Bergkristall",
    "Tirolerhof", "Zillertalerhof", "Gletscherblick", "Sonnenalm", "Karwendel",
    "Postwirt", "Brückenwirt", "Alpenrose", "Waldesruh", "Talstation",
    "Panorama", "Steinbock", "Enzian", "Silberdistel", "Murmeltier",
]
LOCALITIES = ["Innsbruck", "Seefeld", "Mayrhofen", "Kufstein", "Landeck"]
POSTCODES = {"Innsbruck": "6020", "Seefeld": "6100", "Mayrhofen": "6290", "Kufstein": "6330", "Landeck": "6500"}


def clean_doc(rng: random.Random, i: int) -> dict:
    locality = LOCALITIES[i % len(LOCALITIES)]
    doc = {
        "@context": SCHEMA,
        "@type": "Hotel",
        "name": f"Hotel {NAMES[i % len(NAMES)]}",
        "address": {
            "@type": "PostalAddress",
            "streetAddress": f"Dorfstraße {rng.randint(1, 99)}",
            "postalCode": POSTCODES[locality],
            "addressLocality": locality,
        },
    }
    if rng.random() < 0.6:
        doc["priceRange"] = rng.choice(["€", "€€", "€€€"])
    if rng.random() < 0.6:
        doc["starRating"] = rng.choice([1, 2, 3, 4, 5, 3.5, 4.5])
    return doc


def main() -> None:
    rng = random.Random(20171201)
    root = Path(__file__).resolve().parents[1]
    out_dir = root / "tests" / "fixtures" / "validator"
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"ds": "hotel", "documents": []}

    for i in range(20):
        doc = clean_doc(rng, i)
        if i in (3, 11):  # exercise the unknown-property warning path
            doc["telephone"] = "+43 512 000000"
        name = f"clean-{i:02d}.jsonld"
        (out_dir / name).write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8")
        manifest["documents"].append({"file": name, "defect": None})

    def plant(name: str, code: str, path: str, mutate) -> None:
        doc = clean_doc(rng, len(manifest["documents"]))
        mutate(doc)
        filename = f"defect-{name}.jsonld"
        (out_dir / filename).write_text(
            json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8"
        )
        manifest["documents"].append(
            {"file": filename, "defect": {"code": code, "path": path}}
        )

    # missing-required
    plant("missing-name", "MissingRequiredProperty", "name", lambda d: d.pop("name"))
    plant("missing-address", "MissingRequiredProperty", "address", lambda d: d.pop("address"))
    plant(
        "missing-address-2",
        "MissingRequiredProperty",
        "address",
        lambda d: d.pop("address"),
    )

    # wrong-range (on unruled properties, so each plants exactly one error)
    def bad_name_kind(d):
        d["name"] = 42

    def bad_address_kind(d):
        d["address"] = "Hauptstraße 1, 6020 Innsbruck"

    def bad_postal_code(d):
        d["address"]["postalCode"] = 6020

    plant("name-kind", "RangeViolation", "name", bad_name_kind)
    plant("address-kind", "RangeViolation", "address", bad_address_kind)
    plant("postalcode-kind", "RangeViolation", "address/postalCode", bad_postal_code)

    # out-of-rule
    def stars(v):
        def mutate(d):
            d["starRating"] = v

        return mutate

    plant("starrating-high", "RuleViolation", "starRating", stars(7))
    plant("starrating-low", "RuleViolation", "starRating", stars(0))
    plant("starrating-frac", "RuleViolation", "starRating", stars(5.5))

    # cardinality
    def name_array(d):
        d["name"] = ["Hotel Nord", "Hotel Süd"]

    def price_range_array(d):
        d["priceRange"] = ["€", "€€"]

    plant("name-array", "CardinalityViolation", "name", name_array)
    plant("pricerange-array", "CardinalityViolation", "priceRange", price_range_array)

    # unexpected-type
    def wrong_type(d):
        d["@type"] = "Restaurant"

    plant("wrong-type", "UnexpectedType", "@type", wrong_type)

    (out_dir / "seeding.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", "utf-8"
    )
    planted = sum(1 for d in manifest["documents"] if d["defect"])
    print(f"wrote {len(manifest['documents'])} documents, {planted} planted defects")


if __name__ == "__main__":
    main()
