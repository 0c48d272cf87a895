"""
Domain specifications and validation
====================================

Domain specifications restrict schema.org to a curated pattern: required
and optional properties, value ranges, and semantic rules.  Validation
reports syntactic and semantic problems with machine-readable codes.
"""
import json

from tourkg import bundled_ds
from tourkg.domainspec import load_ds, validate

ds = load_ds(bundled_ds("hotel"))
print(f"DS {ds.name}: target {ds.target_type}, {len(ds.properties)} properties, {len(ds.rules)} rule(s)")

good = {
    "@context": "https://schema.org/",
    "@type": "Hotel",
    "name": "Hotel Alpenhof",
    "address": {"@type": "PostalAddress", "postalCode": "6020"},
    "starRating": 4,
}
print("\nclean document:", validate(good, ds).verdict)

# a missing required property, a broken rule, and an open-world extra
bad = {
    "@context": "https://schema.org/",
    "@type": "Hotel",
    "starRating": 7,
    "telephone": "+43 512 000000",
}
report = validate(bad, ds, document_id="demo-bad")
print("\ndefective document:")
print(json.dumps(report.to_dict(), indent=2))
