"""Crawl annotated sites: fetch pages, extract embedded JSON-LD, deliver
parsed documents to an ingestion sink under a per-site, per-date graph.

Link discovery stays on the seed's host (breadth-first); request spacing
per host honours the configured delay, measured from the completion of
the previous request.  Failures never crash a crawl - they are itemized
in the result.
"""
from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from datetime import date
from concurrent.futures import ThreadPoolExecutor
from typing import Callable
from urllib.parse import urljoin, urlsplit

import requests

_SCRIPT_RE = re.compile(
    r"<script\b([^>]*)>(.*?)</script\s*>", re.IGNORECASE | re.DOTALL
)
_TYPE_ATTR_RE = re.compile(
    r"""\btype\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s>]+))""", re.IGNORECASE
)
_HREF_RE = re.compile(r"""<a\b[^>]*\bhref\s*=\s*(?:"([^"]*)"|'([^']*)')""", re.IGNORECASE)


class FetchError(Exception):
    """A typed fetch failure: network, timeout, redirect-limit, or http-status."""

    def __init__(self, kind: str, message: str, status: int | None = None):
        super().__init__(message)
        self.kind = kind
        self.status = status


@dataclass(frozen=True)
class FetchPolicy:
    timeout: float = 10.0
    max_redirects: int = 5


@dataclass(frozen=True)
class CrawlJob:
    seeds: tuple[str, ...]
    crawl_date: date
    max_pages_per_site: int = 100
    per_host_delay_ms: int = 0

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("a crawl job needs at least one seed URL")
        if self.per_host_delay_ms < 0:
            raise ValueError("per-host delay must be >= 0")


@dataclass
class PageResult:
    url: str
    status: int | None = None
    error: str | None = None
    blocks_extracted: int = 0
    documents_delivered: int = 0
    parse_errors: int = 0


@dataclass
class CrawlResult:
    pages: list[PageResult] = field(default_factory=list)
    graphs: dict[str, str] = field(default_factory=dict)  # host -> graph IRI

    @property
    def pages_fetched(self) -> int:
        return sum(1 for p in self.pages if p.status is not None)

    @property
    def blocks_extracted(self) -> int:
        return sum(p.blocks_extracted for p in self.pages)

    @property
    def documents_delivered(self) -> int:
        return sum(p.documents_delivered for p in self.pages)

    @property
    def parse_failures(self) -> int:
        return sum(p.parse_errors for p in self.pages)

    def to_dict(self) -> dict:
        return {
            "pagesFetched": self.pages_fetched,
            "blocksExtracted": self.blocks_extracted,
            "documentsDelivered": self.documents_delivered,
            "parseFailures": self.parse_failures,
            "graphs": dict(sorted(self.graphs.items())),
            "pages": [
                {
                    "url": p.url,
                    "status": p.status,
                    "error": p.error,
                    "blocks": p.blocks_extracted,
                    "delivered": p.documents_delivered,
                    "parseErrors": p.parse_errors,
                }
                for p in self.pages
            ],
        }


def crawl_graph_iri(host: str, crawl_date: date) -> str:
    return f"urn:crawl:{host}:{crawl_date.isoformat()}"


def extract_jsonld(html: str) -> list[tuple[str, int]]:
    """Contents of every `application/ld+json` script element, in order.

    Returns (raw JSON text, byte offset of the block start); blocks that
    later fail to parse are still returned - the caller decides.
    """
    out: list[tuple[str, int]] = []
    for m in _SCRIPT_RE.finditer(html):
        attrs, body = m.group(1), m.group(2)
        tm = _TYPE_ATTR_RE.search(attrs)
        if not tm:
            continue
        type_value = next(g for g in tm.groups() if g is not None)
        if type_value.strip().lower() != "application/ld+json":
            continue
        byte_offset = len(html[: m.start(2)].encode("utf-8"))
        out.append((body, byte_offset))
    return out


def fetch_page(url: str, policy: FetchPolicy = FetchPolicy()) -> tuple[int, str]:
    """GET a page; 2xx returns (status, body), anything else raises FetchError."""
    split = urlsplit(url)
    if split.scheme not in ("http", "https"):
        raise FetchError("network", f"not an http(s) URL: {url!r}")
    session = requests.Session()
    session.max_redirects = policy.max_redirects
    try:
        resp = session.get(url, timeout=policy.timeout, allow_redirects=True)
    except requests.Timeout as exc:
        raise FetchError("timeout", f"timeout fetching {url}: {exc}") from None
    except requests.TooManyRedirects as exc:
        raise FetchError(
            "redirect-limit", f"more than {policy.max_redirects} redirects at {url}"
        ) from None
    except requests.RequestException as exc:
        raise FetchError("network", f"network failure fetching {url}: {exc}") from None
    finally:
        session.close()
    if not 200 <= resp.status_code < 300:
        raise FetchError(
            "http-status", f"status {resp.status_code} at {url}", status=resp.status_code
        )
    return resp.status_code, resp.text


def _same_host_links(base_url: str, html: str) -> list[str]:
    base_host = urlsplit(base_url).netloc
    links: list[str] = []
    seen: set[str] = set()
    for m in _HREF_RE.finditer(html):
        href = m.group(1) or m.group(2) or ""
        target = urljoin(base_url, href.strip())
        split = urlsplit(target)
        if split.scheme not in ("http", "https") or split.netloc != base_host:
            continue
        cleaned = split._replace(fragment="").geturl()
        if cleaned not in seen:
            seen.add(cleaned)
            links.append(cleaned)
    return links


def _crawl_site(
    host: str,
    seeds: list[str],
    job: CrawlJob,
    sink: Callable[[dict, str], None],
    policy: FetchPolicy,
) -> list[PageResult]:
    graph_iri = crawl_graph_iri(host, job.crawl_date)
    results: list[PageResult] = []
    queue = list(seeds)
    queued: set[str] = set(seeds)
    fetched = 0
    last_completed: float | None = None
    delay = job.per_host_delay_ms / 1000.0
    while queue and fetched < job.max_pages_per_site:
        url = queue.pop(0)
        if last_completed is not None and delay > 0:
            wait = last_completed + delay - time.monotonic()
            if wait > 0:
                time.sleep(wait)
        page = PageResult(url=url)
        try:
            status, body = fetch_page(url, policy)
        except FetchError as exc:
            last_completed = time.monotonic()
            fetched += 1
            page.error = f"{exc.kind}: {exc}"
            page.status = exc.status
            results.append(page)
            continue
        last_completed = time.monotonic()
        fetched += 1
        page.status = status
        blocks = extract_jsonld(body)
        page.blocks_extracted = len(blocks)
        for raw, _offset in blocks:
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError:
                page.parse_errors += 1
                continue
            sink(doc, graph_iri)
            page.documents_delivered += 1
        for link in _same_host_links(url, body):
            if link not in queued:
                queued.add(link)
                queue.append(link)
        results.append(page)
    return results


def run_crawl(
    job: CrawlJob,
    sink: Callable[[dict, str], None],
    policy: FetchPolicy | None = None,
    parallelism: int = 4,
) -> CrawlResult:
    """Crawl every seed's site; deliver parsed blocks to `sink`.

    Sites (hosts) are crawled concurrently up to `parallelism`; requests
    within one host are serialized with the job's per-host delay.  The
    sink must tolerate concurrent delivery.
    """
    policy = policy or FetchPolicy()
    by_host: dict[str, list[str]] = {}
    for seed in job.seeds:
        host = urlsplit(seed).netloc
        if not host:
            raise ValueError(f"seed is not an absolute URL: {seed!r}")
        by_host.setdefault(host, []).append(seed)
    result = CrawlResult()
    for host in by_host:
        result.graphs[host] = crawl_graph_iri(host, job.crawl_date)
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        futures = {
            host: pool.submit(_crawl_site, host, seeds, job, sink, policy)
            for host, seeds in by_host.items()
        }
        for host in by_host:  # deterministic result order: seed-host order
            result.pages.extend(futures[host].result())
    return result


def load_seeds(text: str) -> list[str]:
    """Seed list file: one URL per line, `#` comments and blanks ignored."""
    seeds = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            seeds.append(stripped)
    return seeds
