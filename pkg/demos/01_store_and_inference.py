"""
Quad store basics and RDFS-lite inference
=========================================

Build a small named-graph store by hand, run forward chaining over the
bundled schema.org hierarchy, and watch the explicit/inferred accounting.
"""
from tourkg import vocab
from tourkg.rdf import QuadStore, Quad, iri, literal, rdfs_closure, serialize_nquads, RDF_TYPE

SCHEMA = vocab.SCHEMA
g = iri("urn:snapshot:demo:2018-01-01")

store = QuadStore()
alpenhof = iri("https://example.org/hotels/alpenhof")
store.add_quads(
    [
        Quad(alpenhof, iri(RDF_TYPE), iri(SCHEMA + "Hotel"), g),
        Quad(alpenhof, iri(SCHEMA + "name"), literal("Hotel Alpenhof"), g),
    ]
)
print(f"explicit statements: {store.count_explicit}")

# Hotel is a LodgingBusiness is a LocalBusiness is both an Organization
# and a Place - forward chaining materializes the whole ancestry.
added = rdfs_closure(store, vocab.default_hierarchy())
print(f"inferred statements added: {added}")
print(f"total = {store.count_total} (explicit {store.count_explicit} + inferred {store.count_inferred})")

# a second run is a no-op: the closure is a fixpoint
print(f"second closure adds: {rdfs_closure(store, vocab.default_hierarchy())}")

print("\ncanonical N-Quads export:")
print(serialize_nquads(store))
