"""Single-file SQLite store for parsed interactions.

The file carries a ``format_version`` in its ``meta`` table; readers refuse
files written by a newer format.  Writes go to a sibling temp file that is
renamed into place, so a failed write never leaves a half-written store.
"""

from __future__ import annotations

import json
import os
import sqlite3
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from restcov.errors import DuplicateSequenceId, StoreReadError, StoreVersionMismatch, StoreWriteError
from restcov.http_message import Headers, HttpRequestRecord, HttpResponseRecord
from restcov.ingest import HttpInteraction
from restcov.matching import Classification

FORMAT_VERSION = 1

_SCHEMA = """\
CREATE TABLE meta (
    key   TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE interactions (
    sequence_id      INTEGER PRIMARY KEY,
    req_method       TEXT NOT NULL,
    req_path         TEXT NOT NULL,
    req_query        TEXT NOT NULL,
    req_headers      TEXT NOT NULL,
    req_body         BLOB NOT NULL,
    req_structured   TEXT,
    req_version      TEXT NOT NULL,
    resp_status      INTEGER,
    resp_reason      TEXT,
    resp_headers     TEXT,
    resp_body        BLOB,
    resp_structured  TEXT,
    resp_version     TEXT,
    match_template   TEXT,
    match_method     TEXT,
    method_supported INTEGER,
    path_parameters  TEXT
);
CREATE INDEX idx_interactions_template ON interactions(match_template, match_method);
"""


@dataclass
class InteractionStore:
    path: Path
    format_version: int = FORMAT_VERSION
    fingerprint: str = ""
    interactions: list[HttpInteraction] = field(default_factory=list)


def _dump_tree(tree: Any) -> str | None:
    return None if tree is None else json.dumps(tree)


def _load_tree(text: str | None) -> Any:
    return None if text is None else json.loads(text)


def _row(it: HttpInteraction) -> tuple:
    req, resp, match = it.request, it.response, it.match
    return (
        it.sequence_id,
        req.method,
        req.raw_path,
        json.dumps(req.query_parameters),
        json.dumps(req.headers.items()),
        bytes(req.body),
        _dump_tree(req.structured_body),
        req.http_version,
        resp.status_code if resp else None,
        resp.reason if resp else None,
        json.dumps(resp.headers.items()) if resp else None,
        bytes(resp.body) if resp else None,
        _dump_tree(resp.structured_body) if resp else None,
        resp.http_version if resp else None,
        match.template if match else None,
        match.method if match else None,
        int(match.method_supported) if match else None,
        json.dumps(match.path_parameters) if match else None,
    )


def _interaction(row: sqlite3.Row) -> HttpInteraction:
    request = HttpRequestRecord(
        method=row["req_method"],
        raw_path=row["req_path"],
        query_parameters=json.loads(row["req_query"]),
        headers=Headers(json.loads(row["req_headers"])),
        body=bytes(row["req_body"]),
        structured_body=_load_tree(row["req_structured"]),
        http_version=row["req_version"],
    )
    response = None
    if row["resp_status"] is not None:
        response = HttpResponseRecord(
            status_code=row["resp_status"],
            reason=row["resp_reason"],
            headers=Headers(json.loads(row["resp_headers"])),
            body=bytes(row["resp_body"]),
            structured_body=_load_tree(row["resp_structured"]),
            http_version=row["resp_version"],
        )
    match = None
    if row["match_template"] is not None:
        match = Classification(
            template=row["match_template"],
            method=row["match_method"],
            method_supported=bool(row["method_supported"]),
            path_parameters=json.loads(row["path_parameters"]),
        )
    return HttpInteraction(row["sequence_id"], request, response, match)


def persist_interactions(
    store_path: str | Path,
    interactions: Sequence[HttpInteraction],
    fingerprint: str = "",
) -> InteractionStore:
    store_path = Path(store_path)
    seen: set[int] = set()
    for it in interactions:
        if it.sequence_id in seen:
            raise DuplicateSequenceId(it.sequence_id)
        seen.add(it.sequence_id)

    ordered = sorted(interactions, key=lambda it: it.sequence_id)
    tmp_name = None
    try:
        fd, tmp_name = tempfile.mkstemp(prefix=store_path.name + ".", dir=store_path.parent or ".")
        os.close(fd)
        conn = sqlite3.connect(tmp_name)
        try:
            with conn:
                conn.executescript(_SCHEMA)
                conn.executemany(
                    "INSERT INTO meta(key, value) VALUES (?, ?)",
                    [("format_version", str(FORMAT_VERSION)), ("fingerprint", fingerprint)],
                )
                conn.executemany(
                    f"INSERT INTO interactions VALUES ({', '.join('?' * 18)})",
                    [_row(it) for it in ordered],
                )
        finally:
            conn.close()
        os.replace(tmp_name, store_path)
    except (OSError, sqlite3.Error) as exc:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise StoreWriteError(f"cannot write store {store_path}: {exc}") from exc
    return InteractionStore(store_path, FORMAT_VERSION, fingerprint, list(ordered))


def load_store(store_path: str | Path) -> InteractionStore:
    store_path = Path(store_path)
    if not store_path.is_file():
        raise StoreReadError(f"store not found: {store_path}")
    try:
        conn = sqlite3.connect(store_path.resolve().as_uri() + "?mode=ro", uri=True)
    except sqlite3.Error as exc:
        raise StoreReadError(f"cannot open store {store_path}: {exc}") from exc
    conn.row_factory = sqlite3.Row
    try:
        meta = dict(conn.execute("SELECT key, value FROM meta").fetchall())
        version = int(meta.get("format_version", "0"))
        if version > FORMAT_VERSION:
            raise StoreVersionMismatch(
                f"{store_path} has format version {version}; this build reads up to {FORMAT_VERSION}"
            )
        if version < 1:
            raise StoreReadError(f"{store_path} has no valid format version")
        rows = conn.execute("SELECT * FROM interactions ORDER BY sequence_id").fetchall()
        interactions = [_interaction(r) for r in rows]
    except (sqlite3.Error, ValueError, KeyError, TypeError) as exc:
        raise StoreReadError(f"cannot read store {store_path}: {exc}") from exc
    finally:
        conn.close()
    return InteractionStore(store_path, version, meta.get("fingerprint", ""), interactions)


def load_interactions(store_path: str | Path) -> list[HttpInteraction]:
    return load_store(store_path).interactions
