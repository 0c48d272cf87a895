"""
The action broker: search, then book through a provider's annotated API
=======================================================================

Puts offers into a graph, registers a mock internet booking engine as an
action provider, and walks the whole hypermedia flow over real HTTP:
search -> offer with embedded potential action -> execute -> confirmed
booking.  The token in the action URL is single-use.
"""
from datetime import date

import requests

from tourkg.broker import BrokerServer, BrokerService, ProviderDescriptor, provider_iri
from tourkg.ingest import SnapshotId, ingest_snapshot
from tourkg.mock_ibe import MockIbe
from tourkg.offers import ConcreteOffer, offers_to_annotations
from tourkg.rdf import QuadStore

# -- a graph with one hotel and two offers ------------------------------------
store = QuadStore()
acc = "https://example.org/hotels/seespitz"
docs = [
    {
        "@context": "https://schema.org/",
        "@type": "Hotel",
        "@id": acc,
        "name": "Hotel Seespitz",
        "address": {"@type": "PostalAddress", "addressLocality": "Seefeld"},
    }
]
for day, cents in ((10, 9000), (12, 15000)):
    offer = ConcreteOffer(acc, "double", date(2018, 2, day), 1, 1, "breakfast", cents)
    docs.extend(offers_to_annotations([offer], acc, provider_iri=provider_iri("mock-ibe")))
ingest_snapshot(store, docs, SnapshotId("dmo", date(2018, 2, 1)))

# -- the provider (a mock IBE) and the broker ----------------------------------
ibe = MockIbe().start()
service = BrokerService(store)
broker = BrokerServer(service, port=0).start()
service.action_base_url = broker.base_url
print(f"mock IBE at {ibe.book_url}")
print(f"broker at {broker.base_url}")

descriptor = {
    "providerId": "mock-ibe",
    "action": {
        "@context": "https://schema.org/",
        "@type": "ReserveAction",
        "target": {"@type": "EntryPoint", "urlTemplate": ibe.book_url, "httpMethod": "POST"},
        "object-input": [
            {"@type": "PropertyValueSpecification", "valueName": "checkinDate", "valueRequired": True},
            {"@type": "PropertyValueSpecification", "valueName": "persons", "valueRequired": True},
        ],
        "result-output": [
            {"@type": "PropertyValueSpecification", "valueName": "confirmation"}
        ],
    },
}
requests.put(f"{broker.base_url}/providers/mock-ibe", json=descriptor).raise_for_status()

entry = requests.get(broker.base_url + "/").json()
print(f"\nentry point: {entry['@type']} -> {entry['target']['urlTemplate']}")

offers = requests.get(
    broker.base_url + "/search", params={"type": "Hotel", "region": "Seefeld", "maxPrice": "120"}
).json()
print(f"search found {len(offers)} offer(s) under 120 EUR")
cheapest = min(offers, key=lambda d: float(d["price"]))
action_url = cheapest["potentialAction"]["target"]["urlTemplate"]
print(f"cheapest: {cheapest['price']} EUR, action -> ...{action_url[-20:]}")

booking = requests.post(action_url, json={"checkinDate": "2018-02-10", "persons": 1})
print(f"\nbooking: {booking.json()['status']}, confirmation {booking.json()['confirmation']}")

replay = requests.post(action_url, json={"checkinDate": "2018-02-10", "persons": 1})
print(f"replaying the consumed token: HTTP {replay.status_code}")

broker.stop()
ibe.stop()
