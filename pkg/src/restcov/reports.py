"""JSON serialization of a :class:`CoverageReport`.

Output is deterministic: paths sort lexicographically, methods follow the
fixed order get, post, put, delete, patch, head, options, and every file is
written atomically via a temp file and rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable

from restcov.errors import ReportWriteError
from restcov.metrics import METRIC_NAMES, CoverageReport, MetricResult
from restcov.spec_model import STATUS_CLASSES, method_sort_key

SECTIONS = ("documentedAndTested", "documentedAndNotTested", "notDocumentedAndTested")


def stats_document(report: CoverageReport) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    for name in METRIC_NAMES:
        r = report[name]
        doc[name] = {
            "raw": {
                "documented": r.documented,
                "documentedAndTested": r.documented_and_tested,
                "totalTested": r.total_tested,
            },
            "rate": r.rate,
        }
    doc["TCL"] = report.tcl
    doc["tclCapped"] = report.tcl_capped
    return doc


def _methods_map(pairs: Iterable[tuple[str, str]]) -> dict[str, list[str]]:
    grouped: dict[str, set[str]] = {}
    for path, method in pairs:
        grouped.setdefault(path, set()).add(method)
    return {p: sorted(grouped[p], key=method_sort_key) for p in sorted(grouped)}


def _nested(elements: Iterable[tuple], leaf_key=None) -> dict[str, dict[str, list]]:
    """``{path: {method: [leaf, ...]}}`` from ``(path, method, leaf)`` triples."""
    grouped: dict[str, dict[str, set]] = {}
    for path, method, leaf in elements:
        grouped.setdefault(path, {}).setdefault(method, set()).add(leaf)
    return {
        p: {m: sorted(grouped[p][m], key=leaf_key) for m in sorted(grouped[p], key=method_sort_key)}
        for p in sorted(grouped)
    }


def _values_map(elements: Iterable[tuple[str, str, str, str]]) -> dict:
    grouped: dict[str, dict[str, dict[str, set[str]]]] = {}
    for path, method, name, value in elements:
        grouped.setdefault(path, {}).setdefault(method, {}).setdefault(name, set()).add(value)
    return {
        p: {
            m: {n: sorted(grouped[p][m][n]) for n in sorted(grouped[p][m])}
            for m in sorted(grouped[p], key=method_sort_key)
        }
        for p in sorted(grouped)
    }


def _section(result: MetricResult, elements: frozenset) -> dict:
    name = result.metric_name
    if name == "pathCoverage":
        return {p: list(result.path_methods.get(p, ())) for p in sorted(elements)}
    if name == "operationCoverage":
        return _methods_map(elements)
    if name == "parameterValueCoverage":
        return _values_map(elements)
    if name == "statusCodeClassCoverage":
        return _nested(elements, leaf_key=lambda c: (STATUS_CLASSES.index(c), c))
    return _nested(elements)


def detail_document(result: MetricResult) -> dict[str, Any]:
    return {
        "documentedAndTested": _section(result, result.documented_and_tested_detail),
        "documentedAndNotTested": _section(result, result.documented_and_not_tested_detail),
        "notDocumentedAndTested": _section(result, result.not_documented_and_tested_detail),
    }


def _write_json(path: Path, document: Any) -> Path:
    tmp_name = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=path.name + ".", dir=path.parent)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(document, fh, indent=2)
            fh.write("\n")
        os.replace(tmp_name, path)
    except OSError as exc:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise ReportWriteError(f"cannot write {path}: {exc}") from exc
    return path


def write_stats_report(report: CoverageReport, out_dir: str | Path) -> Path:
    return _write_json(Path(out_dir) / "stats.json", stats_document(report))


def write_detail_reports(report: CoverageReport, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    return [
        _write_json(out_dir / f"{name}.json", detail_document(report[name])) for name in METRIC_NAMES
    ]


def write_reports(report: CoverageReport, out_dir: str | Path) -> list[Path]:
    return [write_stats_report(report, out_dir), *write_detail_reports(report, out_dir)]
