from __future__ import annotations

import json
import threading
from datetime import date

import pytest

from tourkg.crawler import (
    CrawlJob,
    FetchError,
    FetchPolicy,
    crawl_graph_iri,
    extract_jsonld,
    fetch_page,
    load_seeds,
    run_crawl,
)
from tourkg.ingest import IngestSink
from tourkg.rdf import QuadStore, iri, rdfs_closure
from tourkg import vocab
from conftest import check_partition, make_site_server

CRAWL_DATE = date(2018, 3, 1)


class ListSink:
    """Collects (document, graph IRI) pairs; thread-safe."""

    def __init__(self):
        self.delivered = []
        self._lock = threading.Lock()

    def __call__(self, doc, graph_iri):
        with self._lock:
            self.delivered.append((doc, graph_iri))


# -- extraction -----------------------------------------------------------------


def test_extract_no_script_tags():
    assert extract_jsonld("<html><body><p>Servus</p></body></html>") == []


def test_extract_single_block_with_offset():
    html = '<html><script type="application/ld+json">{"@type": "Hotel"}</script></html>'
    blocks = extract_jsonld(html)
    assert len(blocks) == 1
    raw, offset = blocks[0]
    assert raw == '{"@type": "Hotel"}'
    assert offset == html.index('{"@type"')  # pure ASCII: byte offset == char offset


def test_extract_three_blocks_in_order_including_malformed():
    html = (
        "<html><head>"
        '<script type="application/ld+json">{"a": 1}</script>'
        "<script type='APPLICATION/LD+JSON'>{broken json</script>'"
        "<script>var x = 1;</script>"
        '<script data-x="y" type=application/ld+json>{"c": 3}</script>'
        "</head></html>"
    )
    blocks = extract_jsonld(html)
    assert [raw for raw, _off in blocks] == ['{"a": 1}', "{broken json", '{"c": 3}']
    offsets = [off for _raw, off in blocks]
    assert offsets == sorted(offsets)


def test_extract_byte_offsets_with_multibyte_text():
    html = '<p>Grüße</p><script type="application/ld+json">{"x":1}</script>'
    [(raw, offset)] = extract_jsonld(html)
    assert html.encode("utf-8")[offset:].decode("utf-8").startswith(raw)


def test_extract_is_pure():
    html = '<script type="application/ld+json">{"x": 1}</script>'
    assert extract_jsonld(html) == extract_jsonld(html)


# -- fetching -------------------------------------------------------------------


def test_fetch_fixture_page(site_server):
    status, body = fetch_page(site_server.base_url + "/index.html")
    assert status == 200
    assert "Alpenhof" in body


def test_fetch_unknown_host_is_network_error():
    with pytest.raises(FetchError) as err:
        fetch_page("http://no-such-host.invalid/x", FetchPolicy(timeout=3))
    assert err.value.kind == "network"


def test_fetch_redirects_followed_to_depth_5(site_server):
    status, body = fetch_page(site_server.base_url + "/redirect/5")
    assert status == 200 and "landed" in body


def test_fetch_six_deep_redirect_chain_rejected(site_server):
    with pytest.raises(FetchError) as err:
        fetch_page(site_server.base_url + "/redirect/6")
    assert err.value.kind == "redirect-limit"


def test_fetch_http_error_status(site_server):
    with pytest.raises(FetchError) as err:
        fetch_page(site_server.base_url + "/error")
    assert err.value.kind == "http-status" and err.value.status == 500


# -- crawling -------------------------------------------------------------------


def test_crawl_fixture_site_delivers_four_documents(site_server):
    sink = ListSink()
    job = CrawlJob(seeds=(site_server.base_url + "/index.html",), crawl_date=CRAWL_DATE)
    result = run_crawl(job, sink)
    assert result.pages_fetched == 3
    assert result.blocks_extracted == 4
    assert result.documents_delivered == 4
    assert result.parse_failures == 0
    host = site_server.base_url.split("//", 1)[1]
    graph = crawl_graph_iri(host, CRAWL_DATE)
    assert {g for _d, g in sink.delivered} == {graph}
    assert graph == f"urn:crawl:{host}:2018-03-01"
    types = sorted(d["@type"] for d, _g in sink.delivered)
    assert types == ["Hotel", "HotelRoom", "Offer", "Restaurant"]


def test_two_sites_same_date_get_distinct_graphs(site_server):
    other, other_httpd, other_thread = make_site_server()
    try:
        sink = ListSink()
        job = CrawlJob(
            seeds=(site_server.base_url + "/index.html", other.base_url + "/index.html"),
            crawl_date=CRAWL_DATE,
        )
        result = run_crawl(job, sink)
        assert len(result.graphs) == 2
        assert len(set(result.graphs.values())) == 2
    finally:
        other_httpd.shutdown()
        other_httpd.server_close()
        other_thread.join(timeout=5)


def test_crawl_rerun_adds_zero_net_new_quads(site_server):
    store = QuadStore()
    sink = IngestSink(store)
    job = CrawlJob(seeds=(site_server.base_url + "/index.html",), crawl_date=CRAWL_DATE)
    run_crawl(job, sink)
    rdfs_closure(store, vocab.default_hierarchy())
    first_total = store.count_total
    assert first_total > 0
    sink2 = IngestSink(store)
    run_crawl(job, sink2)
    rdfs_closure(store, vocab.default_hierarchy())
    assert store.count_total == first_total
    assert sink2.quads_written == 0
    assert sink2.duplicates_suppressed > 0
    check_partition(store)


def test_page_cap_respected(site_server):
    sink = ListSink()
    job = CrawlJob(
        seeds=(site_server.base_url + "/index.html",),
        crawl_date=CRAWL_DATE,
        max_pages_per_site=1,
    )
    result = run_crawl(job, sink)
    assert result.pages_fetched == 1
    assert len(site_server.request_log) == 1


def test_per_host_delay_observed(site_server):
    delay_ms = 120
    job = CrawlJob(
        seeds=(site_server.base_url + "/index.html",),
        crawl_date=CRAWL_DATE,
        per_host_delay_ms=delay_ms,
    )
    run_crawl(job, ListSink())
    times = site_server.times_for_host()
    assert len(times) == 3
    gaps = [b - a for a, b in zip(times, times[1:])]
    for gap in gaps:
        assert gap >= delay_ms / 1000 - 0.020  # observed at the fixture server
    assert sum(gaps) / len(gaps) < delay_ms / 1000 + 0.5


def test_link_discovery_stays_on_host(site_server):
    sink = ListSink()
    job = CrawlJob(seeds=(site_server.base_url + "/index.html",), crawl_date=CRAWL_DATE)
    run_crawl(job, sink)
    paths = [p for p, _t in site_server.request_log]
    assert sorted(paths) == ["/index.html", "/restaurant.html", "/rooms.html"]


def test_failures_itemized_not_raised(site_server):
    sink = ListSink()
    job = CrawlJob(
        seeds=(site_server.base_url + "/missing.html",), crawl_date=CRAWL_DATE
    )
    result = run_crawl(job, sink)
    assert result.pages[0].error is not None
    assert result.documents_delivered == 0


def test_result_report_shape(site_server):
    job = CrawlJob(seeds=(site_server.base_url + "/index.html",), crawl_date=CRAWL_DATE)
    payload = run_crawl(job, ListSink()).to_dict()
    assert payload["pagesFetched"] == 3
    assert payload["blocksExtracted"] == 4
    assert payload["parseFailures"] == 0
    assert list(payload["graphs"].values())[0].startswith("urn:crawl:")
    parsed = json.dumps(payload)  # must be JSON-serializable
    assert "urn:crawl:" in parsed


def test_load_seeds():
    text = "# comment\nhttps://a.example/\n\n  https://b.example/page  \n"
    assert load_seeds(text) == ["https://a.example/", "https://b.example/page"]
