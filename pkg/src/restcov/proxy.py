"""Recording HTTP proxy that writes every exchange as a pair of dump files.

Each accepted request gets the next sequence number and is written to
``<n>-request.txt`` before it is forwarded.  The upstream response is relayed
to the client and written to ``<n>-response.txt``.  When the upstream cannot
be reached the client gets a 502 and only the request file exists, which the
ingest stage treats as an orphan.

Plaintext HTTP/1.1 only.  Hop-by-hop headers are dropped from the dumps and
bodies are written de-chunked with an accurate Content-Length.
"""

from __future__ import annotations

import http.client
import logging
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlsplit

from restcov.errors import BindError

log = logging.getLogger(__name__)

HOP_BY_HOP = frozenset(
    {
        "connection",
        "keep-alive",
        "proxy-connection",
        "proxy-authenticate",
        "proxy-authorization",
        "te",
        "trailer",
        "transfer-encoding",
        "upgrade",
    }
)


@dataclass(frozen=True)
class ProxyConfig:
    listen_address: str
    upstream_base: str
    output_dir: Path
    starting_sequence: int = 1
    timeout: float = 30.0


def parse_address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"expected host:port, got {text!r}")
    return host.strip("[]") or "127.0.0.1", int(port)


class SequenceWriter:
    """Hands out sequence ids and writes dump files under one lock."""

    def __init__(self, output_dir: Path, start: int = 1) -> None:
        self.output_dir = Path(output_dir)
        self._next = start
        self._lock = threading.Lock()

    def write_request(self, data: bytes) -> int:
        with self._lock:
            n = self._next
            self._next += 1
            (self.output_dir / f"{n}-request.txt").write_bytes(data)
        return n

    def write_response(self, n: int, data: bytes) -> None:
        with self._lock:
            (self.output_dir / f"{n}-response.txt").write_bytes(data)


def _serialize(start_line: str, headers: list[tuple[str, str]], body: bytes) -> bytes:
    head = start_line + "\r\n" + "".join(f"{k}: {v}\r\n" for k, v in headers) + "\r\n"
    return head.encode("latin-1") + body


def _end_to_end(headers: list[tuple[str, str]], body: bytes, set_length: bool = True) -> list[tuple[str, str]]:
    kept = [(k, v) for k, v in headers if k.lower() not in HOP_BY_HOP and k.lower() != "content-length"]
    if set_length:
        kept.append(("Content-Length", str(len(body))))
    return kept


class _ProxyHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: "_ProxyServer"

    def log_message(self, format: str, *args) -> None:  # noqa: A002 - stdlib signature
        log.debug("%s - %s", self.address_string(), format % args)

    def __getattr__(self, name: str):
        # route every method (including WebDAV/custom verbs) to the same handler
        if name.startswith("do_"):
            return self._exchange
        raise AttributeError(name)

    def _read_body(self) -> bytes:
        if "chunked" in (self.headers.get("Transfer-Encoding") or "").lower():
            chunks = []
            while True:
                size_line = self.rfile.readline()
                size = int(size_line.split(b";", 1)[0].strip() or b"0", 16)
                if size == 0:
                    # discard trailers
                    while self.rfile.readline() not in (b"\r\n", b"\n", b""):
                        pass
                    break
                chunks.append(self.rfile.read(size))
                self.rfile.readline()
            return b"".join(chunks)
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length > 0 else b""

    def _origin_target(self) -> str:
        if self.path.startswith("/"):
            return self.path
        parts = urlsplit(self.path)
        return (parts.path or "/") + (f"?{parts.query}" if parts.query else "")

    def _exchange(self) -> None:
        cfg = self.server.config
        body = self._read_body()
        target = self._origin_target()
        framed = "Content-Length" in self.headers or "Transfer-Encoding" in self.headers
        req_headers = _end_to_end(list(self.headers.items()), body, set_length=framed)
        n = self.server.writer.write_request(
            _serialize(f"{self.command} {target} {self.request_version}", req_headers, body)
        )

        upstream = urlsplit(cfg.upstream_base)
        conn_cls = http.client.HTTPSConnection if upstream.scheme == "https" else http.client.HTTPConnection
        conn = conn_cls(upstream.hostname, upstream.port, timeout=cfg.timeout)
        try:
            conn.putrequest(
                self.command,
                upstream.path.rstrip("/") + target,
                skip_host=True,
                skip_accept_encoding=True,
            )
            for k, v in req_headers:
                conn.putheader(k, v)
            conn.endheaders(body if body else None)
            resp = conn.getresponse()
            resp_body = resp.read()
            resp_headers = resp.getheaders()
            status, reason, version = resp.status, resp.reason, resp.version
        except (OSError, http.client.HTTPException) as exc:
            log.warning("exchange %d: upstream failure: %s", n, exc)
            self._send_bad_gateway(str(exc))
            return
        finally:
            conn.close()

        is_head = self.command == "HEAD"
        out_headers = _end_to_end(resp_headers, resp_body, set_length=not is_head)
        if is_head:
            out_headers += [(k, v) for k, v in resp_headers if k.lower() == "content-length"]
        version_text = "HTTP/1.0" if version == 10 else "HTTP/1.1"
        self.server.writer.write_response(
            n, _serialize(f"{version_text} {status} {reason}", out_headers, resp_body)
        )

        self.send_response_only(status, reason)
        for k, v in out_headers:
            self.send_header(k, v)
        self.end_headers()
        if not is_head:
            self.wfile.write(resp_body)

    def _send_bad_gateway(self, detail: str) -> None:
        payload = f"upstream failure: {detail}\n".encode()
        self.send_response_only(502, "Bad Gateway")
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(payload)


class _ProxyServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, config: ProxyConfig) -> None:
        self.config = config
        self.writer = SequenceWriter(config.output_dir, config.starting_sequence)
        super().__init__(parse_address(config.listen_address), _ProxyHandler)


class CaptureProxy:
    """Programmatic handle on a running proxy (used by tests and demos)."""

    def __init__(self, config: ProxyConfig) -> None:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".restcov-write-probe"
        try:
            probe.write_bytes(b"")
            probe.unlink()
        except OSError as exc:
            raise BindError(f"output directory {out} is not writable: {exc}") from exc
        try:
            self._server = _ProxyServer(config)
        except OSError as exc:
            raise BindError(f"cannot listen on {config.listen_address}: {exc}") from exc
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self._server.server_address[:2]
        return host, port

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def start(self) -> "CaptureProxy":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self) -> "CaptureProxy":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def serve(config: ProxyConfig) -> None:
    proxy = CaptureProxy(config)
    host, port = proxy.address
    log.info("recording %s via %s:%d into %s", config.upstream_base, host, port, config.output_dir)
    try:
        proxy.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        proxy._server.server_close()
