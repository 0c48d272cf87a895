"""A mock internet booking engine for tests and demos.

Serves `POST /mock-ibe/book` and answers `{confirmation, price, status}`.
Behaviour is configurable per instance: confirm, reject, fail with a
server error, or sleep past the caller's timeout.
"""
from __future__ import annotations

import json
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from threading import Lock, Thread


class MockIbe:
    """Threaded mock booking engine; records every received payload."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        confirmation_prefix: str = "IBE",
        mode: str = "confirm",  # confirm | reject | fail | timeout
        delay_s: float = 30.0,  # sleep used by timeout mode
    ):
        self.confirmation_prefix = confirmation_prefix
        self.mode = mode
        self.delay_s = delay_s
        self.bookings: list[dict] = []
        self._counter = 0
        self._lock = Lock()
        self._httpd = ThreadingHTTPServer((host, port), _MockIbeHandler)
        self._httpd.ibe = self  # type: ignore[attr-defined]
        self._thread: Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def book_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/mock-ibe/book"

    def start(self) -> "MockIbe":
        self._thread = Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def _book(self, payload: dict) -> tuple[int, dict]:
        with self._lock:
            self._counter += 1
            counter = self._counter
            self.bookings.append(payload)
        if self.mode == "timeout":
            time.sleep(self.delay_s)
        if self.mode == "fail":
            return 500, {"error": "internal"}
        if self.mode == "reject":
            return 200, {"confirmation": "", "price": payload.get("price"), "status": "rejected"}
        return 200, {
            "confirmation": f"{self.confirmation_prefix}-{counter:04d}",
            "price": payload.get("price"),
            "status": "confirmed",
        }


class _MockIbeHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def do_POST(self):
        ibe: MockIbe = self.server.ibe  # type: ignore[attr-defined]
        if self.path != "/mock-ibe/book":
            self._respond(404, {"error": "not-found"})
            return
        length = int(self.headers.get("Content-Length", 0) or 0)
        try:
            payload = json.loads(self.rfile.read(length).decode("utf-8")) if length else {}
        except (ValueError, UnicodeDecodeError):
            self._respond(400, {"error": "bad-json"})
            return
        status, answer = ibe._book(payload)
        self._respond(status, answer)

    def _respond(self, status: int, payload: dict):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
