import sqlite3

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from restcov.errors import DuplicateSequenceId, StoreReadError, StoreVersionMismatch, StoreWriteError
from restcov.http_message import Headers, HttpRequestRecord, HttpResponseRecord
from restcov.ingest import HttpInteraction
from restcov.matching import Classification
from restcov.store import load_interactions, load_store, persist_interactions
from strategies import corpora


def test_petstore_round_trip(tmp_path, petstore_ingest):
    db = tmp_path / "db.sqlite"
    persist_interactions(db, petstore_ingest.interactions, fingerprint=petstore_ingest.fingerprint)
    loaded = load_interactions(db)
    assert loaded == petstore_ingest.interactions
    assert len({it.match.key for it in loaded}) == 3
    assert load_store(db).fingerprint == petstore_ingest.fingerprint


def test_empty_store(tmp_path):
    db = tmp_path / "empty.sqlite"
    persist_interactions(db, [])
    assert load_interactions(db) == []


def test_duplicate_rejected_before_write(tmp_path):
    db = tmp_path / "dup.sqlite"
    req = HttpRequestRecord("GET", "/")
    with pytest.raises(DuplicateSequenceId):
        persist_interactions(db, [HttpInteraction(1, req), HttpInteraction(1, req)])
    assert not db.exists()


def test_overwrite(tmp_path):
    db = tmp_path / "db.sqlite"
    persist_interactions(db, [HttpInteraction(1, HttpRequestRecord("GET", "/a"))])
    persist_interactions(db, [HttpInteraction(2, HttpRequestRecord("GET", "/b"))])
    assert [it.sequence_id for it in load_interactions(db)] == [2]


def test_missing_file(tmp_path):
    with pytest.raises(StoreReadError):
        load_interactions(tmp_path / "missing.sqlite")


def test_newer_version(tmp_path):
    db = tmp_path / "db.sqlite"
    persist_interactions(db, [])
    with sqlite3.connect(db) as conn:
        conn.execute("UPDATE meta SET value = '99' WHERE key = 'format_version'")
    with pytest.raises(StoreVersionMismatch):
        load_interactions(db)


def test_not_a_store(tmp_path):
    db = tmp_path / "junk.sqlite"
    db.write_bytes(b"this is not sqlite")
    with pytest.raises(StoreReadError):
        load_interactions(db)


def test_unwritable_location(tmp_path):
    with pytest.raises(StoreWriteError):
        persist_interactions(tmp_path / "no" / "such" / "dir" / "db.sqlite", [])


def test_ordering_by_sequence(tmp_path):
    db = tmp_path / "db.sqlite"
    its = [HttpInteraction(n, HttpRequestRecord("GET", f"/{n}")) for n in (5, 1, 3)]
    persist_interactions(db, its)
    assert [it.sequence_id for it in load_interactions(db)] == [1, 3, 5]


def test_binary_and_structured_fidelity(tmp_path):
    db = tmp_path / "db.sqlite"
    it = HttpInteraction(
        7,
        HttpRequestRecord(
            "PUT",
            "/img/1",
            {"a": ["1", "2"], "é": [""]},
            Headers([("Content-Type", "image/jpeg"), ("X-A", "1"), ("x-a", "2")]),
            body=bytes(range(256)),
        ),
        HttpResponseRecord(201, "Created", Headers([("Content-Type", "application/json")]), b'{"k": [1, 2.5, null]}',
                           structured_body={"k": [1, 2.5, None]}),
        Classification("/img/{id}", "put", True, {"id": "1"}),
    )
    persist_interactions(db, [it])
    assert load_interactions(db) == [it]


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(corpora(max_interactions=20), st.binary(max_size=64))
def test_round_trip_property(tmp_path, corpus, body):
    _, interactions = corpus
    for it in interactions:
        it.request.body = body
    db = tmp_path / "prop.sqlite"
    persist_interactions(db, interactions)
    assert load_interactions(db) == interactions
