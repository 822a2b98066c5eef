from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from restcov import PETSTORE_DIR
from restcov.ingest import ingest_directory
from restcov.spec_model import build_inventory, load_specification

TESTS_DIR = Path(__file__).parent
EXPECTED_DIR = TESTS_DIR / "fixtures" / "petstore_expected"

# make tests/oracle.py and tests/strategies.py importable
sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture(scope="session")
def petstore_spec_path() -> Path:
    return PETSTORE_DIR / "petstore.json"


@pytest.fixture(scope="session")
def petstore_dumps() -> Path:
    return PETSTORE_DIR / "dumps"


@pytest.fixture(scope="session")
def petstore_spec(petstore_spec_path):
    return load_specification(petstore_spec_path)


@pytest.fixture(scope="session")
def petstore_inventory(petstore_spec):
    return build_inventory(petstore_spec)


@pytest.fixture(scope="session")
def petstore_ingest(petstore_dumps, petstore_spec):
    return ingest_directory(petstore_dumps, petstore_spec)


@pytest.fixture(scope="session")
def expected_reports() -> dict[str, dict]:
    return {p.stem: json.loads(p.read_text()) for p in EXPECTED_DIR.glob("*.json")}


@pytest.fixture
def write_spec(tmp_path):
    def _write(document: dict, name: str = "spec.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path

    return _write


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title}")
