"""Black-box REST API test coverage from an OpenAPI document and recorded HTTP traffic."""

from pathlib import Path

from restcov.ingest import HttpInteraction, ingest_directory, scan_dump_directory
from restcov.matching import classify_interaction, match_path, strip_server_prefix
from restcov.metrics import METRIC_NAMES, CoverageReport, MetricResult, compute_coverage, compute_tcl
from restcov.reports import write_detail_reports, write_reports, write_stats_report
from restcov.spec_model import ApiSpecification, build_inventory, load_specification
from restcov.store import load_interactions, persist_interactions

__version__ = "0.1.0"

# Pet Store example shipped with the package: petstore.json plus dumps/.
PETSTORE_DIR = Path(__file__).parent / "data" / "petstore"

__all__ = [
    "METRIC_NAMES",
    "PETSTORE_DIR",
    "ApiSpecification",
    "CoverageReport",
    "HttpInteraction",
    "MetricResult",
    "build_inventory",
    "classify_interaction",
    "compute_coverage",
    "compute_tcl",
    "ingest_directory",
    "load_interactions",
    "load_specification",
    "match_path",
    "persist_interactions",
    "scan_dump_directory",
    "strip_server_prefix",
    "write_detail_reports",
    "write_reports",
    "write_stats_report",
]
