"""
Declarative source wrappers
===========================

A mapping spec turns one source's proprietary records into schema.org
annotations: path extraction, transforms, constants, and nested
sub-mappings.  Unresolved paths simply omit their property.
"""
import json

from tourkg.mapping import apply_batch, load_mapping

mapping = load_mapping(
    json.dumps(
        {
            "sourceFormat": "json",
            "targetType": "Hotel",
            "fields": {
                "name": {"path": "$.hotelName", "transform": "trim"},
                "starRating": {"path": "$.category", "transform": "to-number"},
                "servesCuisine": {"path": "$.kitchen[*]"},
                "address": {
                    "nested": {
                        "targetType": "PostalAddress",
                        "fields": {
                            "postalCode": {"path": "$.zip"},
                            "addressLocality": {"path": "$.city"},
                        },
                    }
                },
            },
        }
    )
)

records = [
    {"hotelName": " Hotel Alpenhof ", "category": "4", "zip": "6020", "city": "Innsbruck"},
    {"hotelName": "Berggasthof", "kitchen": ["Tyrolean", "vegetarian"]},
    {"category": "not a number"},  # fails the to-number coercion
]

docs, errors = apply_batch(mapping, records)
print(f"{len(docs)} documents, {len(errors)} failures\n")
for doc in docs:
    print(json.dumps(doc, ensure_ascii=False))
print("\nfailures:")
for index, message in errors:
    print(f"  record {index}: {message}")
