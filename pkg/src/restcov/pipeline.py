"""The two pipeline stages: data collection and statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from restcov.ingest import IngestResult, ingest_directory
from restcov.metrics import CoverageReport, compute_coverage
from restcov.reports import write_reports
from restcov.spec_model import build_inventory, load_specification
from restcov.store import load_interactions, persist_interactions


@dataclass
class StatisticsResult:
    report: CoverageReport
    files: list[Path] = field(default_factory=list)


def collect(specification: str | Path, dumps_dir: str | Path, db_path: str | Path) -> IngestResult:
    """Parse every dump pair, match it against the spec and persist the interactions."""
    spec = load_specification(specification)
    result = ingest_directory(dumps_dir, spec)
    persist_interactions(db_path, result.interactions, fingerprint=result.fingerprint)
    return result


def statistics(
    specification: str | Path, db_path: str | Path, reports_dir: str | Path
) -> StatisticsResult:
    spec = load_specification(specification)
    report = compute_coverage(build_inventory(spec), load_interactions(db_path))
    return StatisticsResult(report, write_reports(report, reports_dir))
