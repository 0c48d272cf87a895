from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from datetime import date
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from threading import Thread

import pytest

from tourkg import bundled_ds
from tourkg.domainspec import load_ds
from tourkg.ingest import SnapshotId, ingest_snapshot
from tourkg.offers import ConcreteOffer, load_offer_space, offers_to_annotations
from tourkg.rdf import QuadStore

FIXTURES = Path(__file__).parent / "fixtures"


def check_partition(store: QuadStore) -> None:
    """Explicit + inferred counts must partition the total, disjointly."""
    explicit = sum(1 for q in store if store.provenance(q) == "explicit")
    inferred = sum(1 for q in store if store.provenance(q) == "inferred")
    assert explicit == store.count_explicit
    assert inferred == store.count_inferred
    assert explicit + inferred == store.count_total == len(store)


@pytest.fixture
def partition_check():
    return check_partition


@pytest.fixture(scope="session")
def hotel_ds():
    return load_ds(bundled_ds("hotel"))


@pytest.fixture(scope="session")
def offer_ds():
    return load_ds(bundled_ds("offer"))


@pytest.fixture(scope="session")
def fixture_space():
    return load_offer_space((FIXTURES / "offers" / "alpenhof.json").read_text("utf-8"))


# -- local fixture web site -------------------------------------------------


class _SiteHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def do_GET(self):
        server = self.server
        server.request_log.append((self.path, time.monotonic()))
        path = self.path.split("?", 1)[0]
        if path == "/":
            path = "/index.html"
        if path.startswith("/redirect/"):
            hops = int(path.rsplit("/", 1)[1])
            if hops <= 0:
                self._ok(b"<html><body>landed</body></html>")
            else:
                self.send_response(302)
                self.send_header("Location", f"/redirect/{hops - 1}")
                self.end_headers()
            return
        if path == "/error":
            self.send_response(500)
            self.end_headers()
            return
        candidate = server.site_dir / path.lstrip("/")
        if candidate.is_file():
            self._ok(candidate.read_bytes())
        else:
            self.send_response(404)
            self.end_headers()

    def _ok(self, body: bytes):
        self.send_response(200)
        self.send_header("Content-Type", "text/html; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@dataclass
class SiteServer:
    base_url: str
    request_log: list
    _httpd: ThreadingHTTPServer = field(repr=False, default=None)

    def times_for_host(self) -> list[float]:
        return [t for _path, t in self.request_log]


@pytest.fixture
def site_server():
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), _SiteHandler)
    httpd.site_dir = FIXTURES / "site"
    httpd.request_log = []
    thread = Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    host, port = httpd.server_address[:2]
    yield SiteServer(base_url=f"http://{host}:{port}", request_log=httpd.request_log, _httpd=httpd)
    httpd.shutdown()
    httpd.server_close()
    thread.join(timeout=5)


def make_site_server():
    """Non-fixture variant for tests that need two independent sites."""
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), _SiteHandler)
    httpd.site_dir = FIXTURES / "site"
    httpd.request_log = []
    thread = Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    host, port = httpd.server_address[:2]
    server = SiteServer(base_url=f"http://{host}:{port}", request_log=httpd.request_log, _httpd=httpd)
    return server, httpd, thread


# -- synthetic price-history store -------------------------------------------

REGION_HOTELS = {
    "Mayrhofen": [
        ("https://example.org/hotels/m1", "Gasthof Zillertal"),
        ("https://example.org/hotels/m2", "Hotel Tuxertal"),
    ],
    "Seefeld": [
        ("https://example.org/hotels/s1", "Hotel Seespitz"),
        ("https://example.org/hotels/s2", "Alpenresort Karwendel"),
    ],
}

# per-person-per-night cents: (min, max) per hotel, with a February bump in Seefeld
PPN_PLAN = {
    "https://example.org/hotels/m1": {"base": (6000, 7500), "feb_bump": 0},
    "https://example.org/hotels/m2": {"base": (6500, 8000), "feb_bump": 200},
    "https://example.org/hotels/s1": {"base": (9500, 12000), "feb_bump": 4000},
    "https://example.org/hotels/s2": {"base": (10500, 13500), "feb_bump": 4000},
}

HISTORY_MONTHS = [(2017, 12), (2018, 1), (2018, 2), (2018, 3), (2018, 4)]


def _ppn_offer(acc_iri: str, check_in: date, ppn_cents: int) -> ConcreteOffer:
    # one person, one night: total == per-person-per-night
    return ConcreteOffer(
        accommodation_id=acc_iri,
        room_id="double",
        check_in=check_in,
        nights=1,
        persons=1,
        board_id="breakfast",
        total_cents=ppn_cents,
    )


def build_history_store() -> QuadStore:
    """Five months of offer snapshots for two regions, ingested through the
    real pipeline.  Seefeld dominates Mayrhofen every month and peaks in
    February."""
    store = QuadStore()
    static_docs = []
    for region, hotels in REGION_HOTELS.items():
        for acc_iri, name in hotels:
            static_docs.append(
                {
                    "@context": "https://schema.org/",
                    "@type": "Hotel",
                    "@id": acc_iri,
                    "name": name,
                    "address": {"@type": "PostalAddress", "addressLocality": region},
                }
            )
    report = ingest_snapshot(store, static_docs, SnapshotId("dmo", date(2017, 12, 1)))
    assert report.documents_rejected == 0
    for year, month in HISTORY_MONTHS:
        docs = []
        for hotels in REGION_HOTELS.values():
            for acc_iri, _name in hotels:
                low, high = PPN_PLAN[acc_iri]["base"]
                if month == 2:
                    bump = PPN_PLAN[acc_iri]["feb_bump"]
                    low, high = low + bump, high + bump
                day = date(year, month, 10)
                offers = [
                    _ppn_offer(acc_iri, day, low),
                    _ppn_offer(acc_iri, day.replace(day=20), high),
                ]
                docs.extend(offers_to_annotations(offers, acc_iri))
        snapshot = SnapshotId("offers", date(year, month, 15))
        report = ingest_snapshot(store, docs, snapshot)
        assert report.documents_rejected == 0
    check_partition(store)
    return store


@pytest.fixture(scope="session")
def history_store():
    return build_history_store()
