"""
JSON-LD annotations in and out of the graph
===========================================

A schema.org annotation becomes quads with deterministic content-hash
subjects; the same annotation re-ingested lands on the same subjects, so
duplicates collapse.  The inverse direction rebuilds the document.
"""
import json

from tourkg.jsonld import annotation_to_quads, quads_to_annotation
from tourkg.rdf import QuadStore, format_quad

doc = {
    "@context": "https://schema.org/",
    "@type": "Hotel",
    "name": "Hotel Alpenhof",
    "address": {
        "@type": "PostalAddress",
        "streetAddress": "Maria-Theresien-Straße 18",
        "postalCode": "6020",
        "addressLocality": "Innsbruck",
    },
    "starRating": 4,
    "petsAllowed": True,
}

graph = "urn:snapshot:demo:2018-01-01"
quads = annotation_to_quads(doc, graph)
print("converted quads:")
for q in quads:
    print(" ", format_quad(q))

store = QuadStore()
print("\nfirst ingest adds:", store.add_quads(quads))
print("re-ingesting the identical document adds:", store.add_quads(annotation_to_quads(doc, graph)))

# back from the graph to a publishable document
root = quads[0].subject
rebuilt = quads_to_annotation(list(store), root)
print("\nrebuilt document:")
print(json.dumps(rebuilt, indent=2, ensure_ascii=False))
