"""Action broker: a search entry point over the graph plus proxied booking.

Search results are JSON-LD offers, each embedding the owning provider's
booking-API annotation with a broker-issued single-use token; executing
the action posts the payload to the provider's endpoint (a mock
internet booking engine in tests) and maps the response onto a booking
result.  The broker never fabricates confirmations.
"""
from __future__ import annotations

import json
import re
import secrets
import time
from dataclasses import dataclass, field
from datetime import date
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from threading import Lock, Thread
from typing import Any
from urllib.parse import parse_qs, urlsplit

import requests

from . import vocab
from .analytics import entities_in_region
from .jsonld import DEFAULT_SKOLEM_POLICY, SkolemPolicy, quads_to_annotation
from .offers import OfferSpaceError, cents_str, parse_money
from .query import PatternQuery, TriplePattern, Var, evaluate
from .rdf import EXPLICIT, RDF_TYPE, QuadStore, Term, iri

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*://")

P_ITEM_OFFERED = vocab.SCHEMA + "itemOffered"
P_PRICE = vocab.SCHEMA + "price"
P_SELLER = vocab.SCHEMA + "seller"
P_VALID_FROM = vocab.SCHEMA + "validFrom"
P_VALID_THROUGH = vocab.SCHEMA + "validThrough"
P_ELIGIBLE_QUANTITY = vocab.SCHEMA + "eligibleQuantity"
P_VALUE = vocab.SCHEMA + "value"

DEFAULT_TOKEN_TTL_S = 15 * 60


class BrokerError(Exception):
    """Domain failure mapped onto an HTTP status class."""

    def __init__(self, status: int, code: str, message: str, **detail):
        super().__init__(message)
        self.status = status
        self.code = code
        self.detail = detail

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self), **self.detail}


def provider_iri(provider_id: str) -> str:
    return f"urn:provider:{provider_id}"


@dataclass(frozen=True)
class ProviderDescriptor:
    """A provider's booking API, annotated as a schema.org action."""

    provider_id: str
    annotation: dict
    endpoint: str
    method: str
    required_inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    @classmethod
    def from_json(cls, obj: dict, provider_id: str | None = None) -> "ProviderDescriptor":
        if not isinstance(obj, dict):
            raise BrokerError(400, "bad-descriptor", "descriptor must be a JSON object")
        pid = obj.get("providerId", provider_id)
        if not isinstance(pid, str) or not pid:
            raise BrokerError(400, "bad-descriptor", "descriptor needs a providerId")
        action = obj.get("action")
        if not isinstance(action, dict):
            raise BrokerError(400, "bad-descriptor", "descriptor needs an action annotation")
        target = action.get("target")
        if not isinstance(target, dict):
            raise BrokerError(400, "bad-descriptor", "action needs a target entry point")
        endpoint = target.get("urlTemplate")
        if not isinstance(endpoint, str) or not _SCHEME_RE.match(endpoint):
            raise BrokerError(
                400, "bad-descriptor", f"endpoint URL must be absolute, got {endpoint!r}"
            )
        method = str(target.get("httpMethod", "POST")).upper()
        if method not in ("GET", "POST", "PUT"):
            raise BrokerError(400, "bad-descriptor", f"unsupported http method {method!r}")
        required, outputs = [], []
        for spec in _value_specs(action.get("object-input")):
            name = spec.get("valueName")
            if not isinstance(name, str) or not name:
                raise BrokerError(400, "bad-descriptor", "input fields must be named")
            if spec.get("valueRequired", False):
                required.append(name)
        for spec in _value_specs(action.get("result-output")):
            name = spec.get("valueName")
            if isinstance(name, str) and name:
                outputs.append(name)
        if not required:
            raise BrokerError(400, "bad-descriptor", "descriptor names no required inputs")
        return cls(
            provider_id=pid,
            annotation=action,
            endpoint=endpoint,
            method=method,
            required_inputs=tuple(required),
            outputs=tuple(outputs),
        )


def _value_specs(value: Any) -> list[dict]:
    if value is None:
        return []
    items = value if isinstance(value, list) else [value]
    return [v for v in items if isinstance(v, dict)]


class ProviderRegistry:
    """Providers by id; duplicate registration replaces, with an audit entry."""

    def __init__(self):
        self._providers: dict[str, ProviderDescriptor] = {}
        self.audit_log: list[dict] = []
        self._lock = Lock()

    def register(self, descriptor: ProviderDescriptor) -> str:
        with self._lock:
            replaced = descriptor.provider_id in self._providers
            self._providers[descriptor.provider_id] = descriptor
            self.audit_log.append(
                {
                    "event": "replaced" if replaced else "registered",
                    "providerId": descriptor.provider_id,
                    "endpoint": descriptor.endpoint,
                    "at": time.time(),
                }
            )
            return descriptor.provider_id

    def get(self, provider_id: str) -> ProviderDescriptor:
        descriptor = self._providers.get(provider_id)
        if descriptor is None:
            raise BrokerError(404, "unknown-provider", f"no provider {provider_id!r}")
        return descriptor

    def ids(self) -> list[str]:
        return sorted(self._providers)


@dataclass
class _TokenRecord:
    offer_id: str
    provider_id: str
    price_cents: int
    graph_iri: str
    issued_at: float


class TokenTable:
    """Single-use offer tokens with a TTL; redemption consumes the token."""

    def __init__(self, ttl_s: float = DEFAULT_TOKEN_TTL_S):
        self.ttl_s = ttl_s
        self._tokens: dict[str, _TokenRecord] = {}
        self._lock = Lock()

    def issue(self, offer_id: str, provider_id: str, price_cents: int, graph_iri: str) -> str:
        token = secrets.token_urlsafe(32)  # 256 bits
        with self._lock:
            self._tokens[token] = _TokenRecord(
                offer_id, provider_id, price_cents, graph_iri, time.monotonic()
            )
        return token

    def redeem(self, token: str) -> _TokenRecord:
        with self._lock:
            record = self._tokens.pop(token, None)
        if record is None or time.monotonic() - record.issued_at > self.ttl_s:
            raise BrokerError(404, "unknown-token", "token is unknown, used, or expired")
        return record


@dataclass(frozen=True)
class SearchRequest:
    item_type: str = "Offer"
    region: str | None = None
    date_from: date | None = None
    date_to: date | None = None
    persons: int | None = None
    max_price_cents: int | None = None

    @classmethod
    def from_params(cls, params: dict[str, str]) -> "SearchRequest":
        def bad(name, value):
            return BrokerError(400, "bad-request", f"cannot read {name}={value!r}")

        kwargs: dict[str, Any] = {}
        if params.get("type"):
            kwargs["item_type"] = params["type"]
        if params.get("region"):
            kwargs["region"] = params["region"]
        for key, attr in (("from", "date_from"), ("to", "date_to")):
            if params.get(key):
                try:
                    kwargs[attr] = date.fromisoformat(params[key])
                except ValueError:
                    raise bad(key, params[key]) from None
        if params.get("persons"):
            try:
                kwargs["persons"] = int(params["persons"])
            except ValueError:
                raise bad("persons", params["persons"]) from None
        if params.get("maxPrice"):
            try:
                kwargs["max_price_cents"] = parse_money(params["maxPrice"])
            except OfferSpaceError:
                raise bad("maxPrice", params["maxPrice"]) from None
        return cls(**kwargs)


@dataclass(frozen=True)
class BookingResult:
    offer_id: str
    provider_id: str
    confirmation_code: str
    price_cents: int
    status: str  # "confirmed" | "rejected"

    def to_dict(self) -> dict:
        return {
            "offerId": self.offer_id,
            "providerId": self.provider_id,
            "confirmation": self.confirmation_code,
            "price": cents_str(self.price_cents),
            "status": self.status,
        }


def _first_literal(store: QuadStore, subject: Term, predicate: str, graph: Term) -> str | None:
    for q in store.match_quads(subject=subject, predicate=iri(predicate), graph=graph):
        if q.object.is_literal:
            return q.object.value
    return None


def _offer_accommodations(store: QuadStore, offer: Term, graph: Term) -> list[Term]:
    return [
        q.object
        for q in store.match_quads(subject=offer, predicate=iri(P_ITEM_OFFERED), graph=graph)
    ]


def _resolve_provider_id(store: QuadStore, offer: Term, graph: Term) -> str | None:
    for q in store.match_quads(subject=offer, predicate=iri(P_SELLER), graph=graph):
        if q.object.is_iri and q.object.value.startswith("urn:provider:"):
            return q.object.value[len("urn:provider:") :]
    return None


def handle_search(
    store: QuadStore,
    registry: ProviderRegistry,
    tokens: TokenTable,
    request: SearchRequest,
    default_provider_id: str | None = None,
    action_base_url: str = "",
    skolem: SkolemPolicy = DEFAULT_SKOLEM_POLICY,
) -> list[dict]:
    """Offers matching the request, each embedding a tokenized potential action.

    Per offer subject the most recently ingested copy is served.  Offers
    without a resolvable provider (no seller link and no default) are
    returned without a potential action.
    """
    if not vocab.is_class(request.item_type):
        raise BrokerError(400, "unknown-item-type", f"unknown type {request.item_type!r}")
    offer_rows = evaluate(
        store,
        PatternQuery(
            patterns=[
                TriplePattern(Var("o"), iri(RDF_TYPE), iri(vocab.SCHEMA + "Offer"), Var("g"))
            ],
            projection=["o", "g"],
        ),
    )
    latest: dict[Term, Term] = {}  # offer subject -> graph of newest copy
    for row in offer_rows:
        latest[row["o"]] = row["g"]

    wanted_types = {vocab.class_iri(t) for t in vocab.subclasses_or_self(request.item_type)}
    region_entities = (
        entities_in_region(store, request.region) if request.region is not None else None
    )

    results = []
    for offer, graph in latest.items():
        accommodations = _offer_accommodations(store, offer, graph)
        if request.item_type != "Offer":
            typed_ok = any(
                tq.object.is_iri and tq.object.value in wanted_types
                for acc in accommodations
                for tq in store.match_quads(subject=acc, predicate=iri(RDF_TYPE))
            )
            if not typed_ok:
                continue
        if region_entities is not None and not any(
            acc in region_entities for acc in accommodations
        ):
            continue
        if request.date_from is not None or request.date_to is not None:
            valid_from = _first_literal(store, offer, P_VALID_FROM, graph)
            valid_through = _first_literal(store, offer, P_VALID_THROUGH, graph)
            try:
                starts = date.fromisoformat(valid_from) if valid_from else None
                ends = date.fromisoformat(valid_through) if valid_through else None
            except ValueError:
                starts = ends = None
            if request.date_to is not None and starts is not None and starts >= request.date_to:
                continue
            if request.date_from is not None and ends is not None and ends <= request.date_from:
                continue
        if request.persons is not None:
            persons_ok = True
            for eq in store.match_quads(
                subject=offer, predicate=iri(P_ELIGIBLE_QUANTITY), graph=graph
            ):
                value = _first_literal(store, eq.object, P_VALUE, graph)
                persons_ok = value is not None and value == str(request.persons)
            if not persons_ok:
                continue
        price_text = _first_literal(store, offer, P_PRICE, graph)
        price_cents = None
        if price_text is not None:
            try:
                price_cents = parse_money(price_text)
            except OfferSpaceError:
                price_cents = None
        if request.max_price_cents is not None:
            if price_cents is None or price_cents > request.max_price_cents:
                continue

        # publish the explicit annotation; inference-materialized statements stay internal
        slice_quads = [
            x for x in store.match_quads(graph=graph) if store.provenance(x) == EXPLICIT
        ]
        doc = quads_to_annotation(slice_quads, offer, skolem)
        pid = _resolve_provider_id(store, offer, graph) or default_provider_id
        if pid is not None:
            try:
                descriptor = registry.get(pid)
            except BrokerError:
                descriptor = None
            if descriptor is not None:
                token = tokens.issue(
                    offer_id=offer.value,
                    provider_id=descriptor.provider_id,
                    price_cents=price_cents or 0,
                    graph_iri=graph.value,
                )
                action = json.loads(json.dumps(descriptor.annotation))  # deep copy
                action.pop("@context", None)  # nested nodes carry no context
                target = dict(action.get("target", {}))
                target["urlTemplate"] = f"{action_base_url}/action/{token}"
                action["target"] = target
                doc["potentialAction"] = action
        results.append(doc)
    return results


def execute_action(
    registry: ProviderRegistry,
    tokens: TokenTable,
    token: str,
    payload: dict,
    timeout: float = 5.0,
) -> BookingResult:
    """Redeem the token, validate the payload, forward to the provider.

    Tokens are single-use: redemption consumes them even if the provider
    call fails afterwards.
    """
    record = tokens.redeem(token)
    descriptor = registry.get(record.provider_id)
    if not isinstance(payload, dict):
        raise BrokerError(400, "bad-payload", "payload must be a JSON object")
    for name in descriptor.required_inputs:
        if name not in payload:
            raise BrokerError(
                400, "missing-field", f"required field {name} is missing", field=name
            )
    body = dict(payload)
    body.setdefault("offerId", record.offer_id)
    body.setdefault("price", cents_str(record.price_cents))
    try:
        resp = requests.request(
            descriptor.method, descriptor.endpoint, json=body, timeout=timeout
        )
    except requests.RequestException as exc:
        raise BrokerError(
            502,
            "provider-error",
            f"provider {descriptor.provider_id} unreachable: {exc}",
            providerId=descriptor.provider_id,
        ) from None
    if not 200 <= resp.status_code < 300:
        raise BrokerError(
            502,
            "provider-error",
            f"provider {descriptor.provider_id} answered {resp.status_code}",
            providerId=descriptor.provider_id,
        )
    try:
        answer = resp.json()
    except ValueError:
        raise BrokerError(
            502,
            "provider-error",
            f"provider {descriptor.provider_id} returned no JSON",
            providerId=descriptor.provider_id,
        ) from None
    status = str(answer.get("status", "rejected"))
    confirmation = str(answer.get("confirmation", "") or "")
    if status == "confirmed" and not confirmation:
        raise BrokerError(
            502,
            "provider-error",
            f"provider {descriptor.provider_id} confirmed without a confirmation code",
            providerId=descriptor.provider_id,
        )
    try:
        price_cents = parse_money(answer["price"]) if "price" in answer else record.price_cents
    except OfferSpaceError:
        price_cents = record.price_cents
    return BookingResult(
        offer_id=record.offer_id,
        provider_id=descriptor.provider_id,
        confirmation_code=confirmation,
        price_cents=price_cents,
        status="confirmed" if status == "confirmed" else "rejected",
    )


def search_action_entry_point(base_url: str = "") -> dict:
    """The search API's own annotation: the service's hypermedia entry point."""
    return {
        "@context": vocab.SCHEMA,
        "@type": "SearchAction",
        "target": {
            "@type": "EntryPoint",
            "urlTemplate": (
                f"{base_url}/search?type={{type}}&region={{region}}"
                "&from={from}&to={to}&persons={persons}&maxPrice={maxPrice}"
            ),
            "httpMethod": "GET",
            "contentType": "application/ld+json",
        },
    }


# -- HTTP service -----------------------------------------------------------------


class BrokerService:
    """Bundles the store, registry and token table behind the HTTP surface."""

    def __init__(
        self,
        store: QuadStore,
        registry: ProviderRegistry | None = None,
        tokens: TokenTable | None = None,
        default_provider_id: str | None = None,
        action_base_url: str = "",
    ):
        self.store = store
        self.registry = registry or ProviderRegistry()
        self.tokens = tokens or TokenTable()
        self.default_provider_id = default_provider_id
        self.action_base_url = action_base_url

    def search(self, params: dict[str, str]) -> list[dict]:
        request = SearchRequest.from_params(params)
        return handle_search(
            self.store,
            self.registry,
            self.tokens,
            request,
            default_provider_id=self.default_provider_id,
            action_base_url=self.action_base_url,
        )

    def action(self, token: str, payload: dict) -> BookingResult:
        return execute_action(self.registry, self.tokens, token, payload)

    def register(self, provider_id: str, descriptor_json: dict) -> str:
        descriptor = ProviderDescriptor.from_json(descriptor_json, provider_id=provider_id)
        if descriptor.provider_id != provider_id:
            raise BrokerError(
                400,
                "bad-descriptor",
                f"providerId {descriptor.provider_id!r} does not match path {provider_id!r}",
            )
        return self.registry.register(descriptor)


class _BrokerHandler(BaseHTTPRequestHandler):
    service: BrokerService  # set on the server

    def log_message(self, *args):  # keep test output quiet
        pass

    def _send_json(self, status: int, payload, content_type: str = "application/json"):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", 0) or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            parsed = json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            raise BrokerError(400, "bad-payload", "request body must be JSON") from None
        if not isinstance(parsed, dict):
            raise BrokerError(400, "bad-payload", "request body must be a JSON object")
        return parsed

    def _handle(self, method: str):
        service = self.server.service  # type: ignore[attr-defined]
        split = urlsplit(self.path)
        segments = [s for s in split.path.split("/") if s]
        try:
            if method == "GET" and not segments:
                self._send_json(
                    200,
                    search_action_entry_point(service.action_base_url),
                    content_type="application/ld+json",
                )
            elif method == "GET" and segments == ["search"]:
                params = {k: v[0] for k, v in parse_qs(split.query).items()}
                offers = service.search(params)
                self._send_json(200, offers, content_type="application/ld+json")
            elif method == "POST" and len(segments) == 2 and segments[0] == "action":
                payload = self._read_body()
                result = service.action(segments[1], payload)
                self._send_json(200, result.to_dict())
            elif method == "PUT" and len(segments) == 2 and segments[0] == "providers":
                descriptor = self._read_body()
                provider_id = service.register(segments[1], descriptor)
                self._send_json(200, {"providerId": provider_id, "status": "registered"})
            else:
                self._send_json(404, {"error": "not-found", "message": self.path})
        except BrokerError as exc:
            self._send_json(exc.status, exc.to_dict())

    def do_GET(self):
        self._handle("GET")

    def do_POST(self):
        self._handle("POST")

    def do_PUT(self):
        self._handle("PUT")


class BrokerServer:
    """Threaded HTTP server around a BrokerService; start()/stop() lifecycle."""

    def __init__(self, service: BrokerService, host: str = "127.0.0.1", port: int = 0):
        self._httpd = ThreadingHTTPServer((host, port), _BrokerHandler)
        self._httpd.service = service  # type: ignore[attr-defined]
        self._thread: Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "BrokerServer":
        self._thread = Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def serve_forever(self) -> None:
        self._httpd.serve_forever()
