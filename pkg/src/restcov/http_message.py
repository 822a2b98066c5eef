"""Parsing of plain-text HTTP/1.x dumps into request and response records.

Bodies are always kept as raw bytes.  A structured payload tree is derived
on top only when the declared content type is JSON.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator
from urllib.parse import parse_qs, urlsplit

from restcov.errors import MalformedRequest, MalformedResponse
from restcov.spec_model import normalize_media_type

_REQUEST_LINE = re.compile(rb"^([!#$%&'*+.^_`|~0-9A-Za-z-]+) +(\S+) +HTTP/(\d)\.(\d)$")
_STATUS_LINE = re.compile(rb"^HTTP/(\d)\.(\d) +(\d{3})(?: (.*))?$")
_STRUCTURED_TYPES = ("application/json",)


class Headers:
    """Ordered multimap of header fields with case-insensitive lookup."""

    def __init__(self, items: Iterable[tuple[str, str]] = ()) -> None:
        self._items: list[tuple[str, str]] = [(str(k), str(v)) for k, v in items]

    def get(self, name: str, default: str | None = None) -> str | None:
        name = name.lower()
        for k, v in self._items:
            if k.lower() == name:
                return v
        return default

    def get_all(self, name: str) -> list[str]:
        name = name.lower()
        return [v for k, v in self._items if k.lower() == name]

    def names(self) -> list[str]:
        return list(dict.fromkeys(k.lower() for k, _ in self._items))

    def items(self) -> list[tuple[str, str]]:
        return list(self._items)

    def __contains__(self, name: object) -> bool:
        return isinstance(name, str) and self.get(name) is not None

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Headers):
            return NotImplemented
        return self._items == other._items

    def __repr__(self) -> str:
        return f"Headers({self._items!r})"


@dataclass
class ParseTally:
    """Counts of messages and payloads that could not be parsed."""

    requests: int = 0
    responses: int = 0
    bodies: int = 0
    messages: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.requests + self.responses + self.bodies


@dataclass(eq=True)
class HttpRequestRecord:
    method: str
    raw_path: str
    query_parameters: dict[str, list[str]] = field(default_factory=dict)
    headers: Headers = field(default_factory=Headers)
    body: bytes = b""
    structured_body: Any = None
    http_version: str = "1.1"

    @property
    def content_type(self) -> str | None:
        return normalize_media_type(self.headers.get("content-type"))

    @property
    def cookies(self) -> dict[str, list[str]]:
        jar: dict[str, list[str]] = {}
        for header in self.headers.get_all("cookie"):
            for pair in header.split(";"):
                name, sep, value = pair.strip().partition("=")
                if sep and name:
                    jar.setdefault(name, []).append(value)
        return jar


@dataclass(eq=True)
class HttpResponseRecord:
    status_code: int
    reason: str = ""
    headers: Headers = field(default_factory=Headers)
    body: bytes = b""
    structured_body: Any = None
    http_version: str = "1.1"

    @property
    def content_type(self) -> str | None:
        return normalize_media_type(self.headers.get("content-type"))


def _split_message(data: bytes) -> tuple[bytes, list[bytes], bytes]:
    """Split into start line, header lines and body; tolerates bare LF line endings."""
    crlf = data.find(b"\r\n\r\n")
    lf = data.find(b"\n\n")
    if crlf != -1 and (lf == -1 or crlf <= lf):
        head, body = data[:crlf], data[crlf + 4 :]
    elif lf != -1:
        head, body = data[:lf], data[lf + 2 :]
    else:
        head, body = data, b""
    lines = [ln.rstrip(b"\r") for ln in head.split(b"\n")]
    # tolerate leading blank lines before the start line
    while lines and not lines[0]:
        lines.pop(0)
    if not lines:
        return b"", [], body
    return lines[0], lines[1:], body


def _parse_headers(lines: list[bytes]) -> Headers:
    items: list[tuple[str, str]] = []
    for raw in lines:
        line = raw.decode("latin-1")
        if line[:1] in (" ", "\t") and items:
            # obsolete line folding
            name, value = items[-1]
            items[-1] = (name, value + " " + line.strip())
            continue
        name, sep, value = line.partition(":")
        if not sep or not name.strip():
            continue
        items.append((name.strip(), value.strip()))
    return Headers(items)


def dechunk(body: bytes) -> bytes:
    """Decode a chunked transfer-coded body; a truncated stream keeps what was read."""
    out = bytearray()
    pos = 0
    while pos < len(body):
        eol = body.find(b"\n", pos)
        if eol == -1:
            break
        size_text = body[pos:eol].split(b";", 1)[0].strip()
        try:
            size = int(size_text, 16)
        except ValueError:
            break
        if size == 0:
            break
        start = eol + 1
        out += body[start : start + size]
        pos = start + size
        if body[pos : pos + 2] == b"\r\n":
            pos += 2
        elif body[pos : pos + 1] == b"\n":
            pos += 1
    return bytes(out)


def _body(headers: Headers, body: bytes) -> bytes:
    encodings = ",".join(headers.get_all("transfer-encoding")).lower()
    if "chunked" in encodings:
        return dechunk(body)
    return body


def parse_body(
    body: bytes, declared_content_type: str | None, tally: ParseTally | None = None
) -> Any:
    """Structured payload for supported types, else None (a JSON ``null`` body also yields None)."""
    media_type = normalize_media_type(declared_content_type)
    if media_type not in _STRUCTURED_TYPES or not body:
        return None
    try:
        return json.loads(body.decode("utf-8-sig"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        if tally is not None:
            tally.bodies += 1
            tally.messages.append(f"unparseable {media_type} body: {exc}")
        return None


def split_target(target: str) -> tuple[str, dict[str, list[str]]]:
    """Split a request target (origin or absolute form) into path and query multimap."""
    if target.startswith("/"):
        path, _, query = target.partition("?")
        path = path.split("#", 1)[0]
    else:
        parts = urlsplit(target)
        if not parts.scheme or not parts.netloc:
            raise MalformedRequest(f"unsupported request target {target!r}")
        path, query = parts.path or "/", parts.query
    return path or "/", parse_qs(query, keep_blank_values=True)


def parse_request(data: bytes, tally: ParseTally | None = None) -> HttpRequestRecord:
    start, header_lines, body = _split_message(data)
    m = _REQUEST_LINE.match(start)
    if not m:
        raise MalformedRequest(f"invalid request line {start[:80]!r}")
    method = m.group(1).decode("ascii").upper()
    target = m.group(2).decode("latin-1")
    if target == "*":
        raise MalformedRequest("asterisk-form request target has no path")
    path, query = split_target(target)
    headers = _parse_headers(header_lines)
    body = _body(headers, body)
    return HttpRequestRecord(
        method=method,
        raw_path=path,
        query_parameters=query,
        headers=headers,
        body=body,
        structured_body=parse_body(body, headers.get("content-type"), tally),
        http_version=f"{m.group(3).decode()}.{m.group(4).decode()}",
    )


def parse_response(data: bytes, tally: ParseTally | None = None) -> HttpResponseRecord:
    start, header_lines, body = _split_message(data)
    m = _STATUS_LINE.match(start)
    if not m:
        raise MalformedResponse(f"invalid status line {start[:80]!r}")
    code = int(m.group(3))
    if not 100 <= code <= 599:
        raise MalformedResponse(f"status code {code} out of range")
    headers = _parse_headers(header_lines)
    body = _body(headers, body)
    return HttpResponseRecord(
        status_code=code,
        reason=(m.group(4) or b"").decode("latin-1"),
        headers=headers,
        body=body,
        structured_body=parse_body(body, headers.get("content-type"), tally),
        http_version=f"{m.group(1).decode()}.{m.group(2).decode()}",
    )
