"""Dump-directory scanning and assembly of matched interactions.

Dumps follow the ``<n>-request.txt`` / ``<n>-response.txt`` convention.
A malformed request skips its pair; a malformed or missing response leaves
an orphan request, which still feeds the input metrics.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from restcov.errors import DirectoryNotFound, DuplicateSequenceId, MalformedRequest, MalformedResponse
from restcov.http_message import (
    HttpRequestRecord,
    HttpResponseRecord,
    ParseTally,
    parse_request,
    parse_response,
)
from restcov.matching import Classification, classify_interaction
from restcov.spec_model import ApiSpecification

log = logging.getLogger(__name__)

DUMP_NAME = re.compile(r"^(\d+)-(request|response)\.txt$")


@dataclass(eq=True)
class HttpInteraction:
    sequence_id: int
    request: HttpRequestRecord
    response: HttpResponseRecord | None = None
    match: Classification | None = None

    @property
    def is_orphan(self) -> bool:
        return self.response is None

    @property
    def extracted_path_parameters(self) -> dict[str, str]:
        return dict(self.match.path_parameters) if self.match else {}


class DumpEntry(NamedTuple):
    sequence_id: int
    request: bytes
    response: bytes | None


@dataclass
class IngestResult:
    interactions: list[HttpInteraction] = field(default_factory=list)
    tally: ParseTally = field(default_factory=ParseTally)
    request_files: int = 0
    fingerprint: str = ""


def scan_dump_directory(directory: str | Path) -> list[DumpEntry]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DirectoryNotFound(f"dump directory not found: {directory}")
    found: dict[tuple[int, str], Path] = {}
    for entry in directory.iterdir():
        m = DUMP_NAME.match(entry.name)
        if not m or not entry.is_file():
            continue
        key = (int(m.group(1)), m.group(2))
        if key in found:
            raise DuplicateSequenceId(key[0], f"{found[key].name} and {entry.name}")
        found[key] = entry

    entries = []
    for (n, role), path in sorted(found.items()):
        if role == "response":
            if (n, "request") not in found:
                log.warning("response dump %s has no matching request; skipped", path.name)
            continue
        response = found.get((n, "response"))
        entries.append(DumpEntry(n, path.read_bytes(), response.read_bytes() if response else None))
    return entries


def fingerprint_directory(directory: str | Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(Path(directory).iterdir()):
        if path.is_file() and DUMP_NAME.match(path.name):
            digest.update(path.name.encode())
            digest.update(b"\0")
            digest.update(hashlib.sha256(path.read_bytes()).digest())
    return digest.hexdigest()


def build_interaction(
    entry: DumpEntry, spec: ApiSpecification, tally: ParseTally | None = None
) -> HttpInteraction:
    """Parse and classify one dump pair; raises MalformedRequest for an unusable request."""
    request = parse_request(entry.request, tally)
    response = None
    if entry.response is not None:
        try:
            response = parse_response(entry.response, tally)
        except MalformedResponse as exc:
            if tally is not None:
                tally.responses += 1
                tally.messages.append(f"{entry.sequence_id}-response.txt: {exc}")
    return HttpInteraction(
        sequence_id=entry.sequence_id,
        request=request,
        response=response,
        match=classify_interaction(request, spec),
    )


def ingest_directory(directory: str | Path, spec: ApiSpecification) -> IngestResult:
    entries = scan_dump_directory(directory)
    result = IngestResult(request_files=len(entries), fingerprint=fingerprint_directory(directory))
    for entry in entries:
        try:
            result.interactions.append(build_interaction(entry, spec, result.tally))
        except MalformedRequest as exc:
            result.tally.requests += 1
            result.tally.messages.append(f"{entry.sequence_id}-request.txt: {exc}")
            log.warning("skipping %d-request.txt: %s", entry.sequence_id, exc)
    return result
