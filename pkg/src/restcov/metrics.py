"""The eight coverage metrics and the Test Coverage Level.

Every metric compares an inventory element set (the documented elements)
with the elements exercised by recorded interactions.  Input metrics look at
every interaction, orphans included; output metrics only at interactions
that received a response.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from restcov.ingest import HttpInteraction
from restcov.spec_model import TestableElementInventory, method_sort_key

METRIC_NAMES = (
    "pathCoverage",
    "operationCoverage",
    "parameterCoverage",
    "parameterValueCoverage",
    "requestContentTypeCoverage",
    "statusCodeClassCoverage",
    "statusCodeCoverage",
    "responseContentTypeCoverage",
)

# Cumulative requirements: reaching level k needs every metric listed up to k.
TCL_LADDER = (
    ("pathCoverage",),
    ("operationCoverage",),
    ("requestContentTypeCoverage", "responseContentTypeCoverage"),
    ("parameterCoverage", "statusCodeClassCoverage"),
    ("statusCodeCoverage",),
)
MAX_TCL = len(TCL_LADDER)


@dataclass(frozen=True)
class MetricResult:
    metric_name: str
    documented_and_tested_detail: frozenset
    documented_and_not_tested_detail: frozenset
    not_documented_and_tested_detail: frozenset
    # path metric only: exercised (or, for untested paths, documented) methods per path
    path_methods: Mapping[str, tuple[str, ...]] = field(default_factory=dict, compare=False)

    @property
    def documented(self) -> int:
        return len(self.documented_and_tested_detail) + len(self.documented_and_not_tested_detail)

    @property
    def documented_and_tested(self) -> int:
        return len(self.documented_and_tested_detail)

    @property
    def total_tested(self) -> int:
        return len(self.documented_and_tested_detail) + len(self.not_documented_and_tested_detail)

    @property
    def rate(self) -> float:
        # an empty denominator counts as fully covered
        if self.documented == 0:
            return 1.0
        return self.documented_and_tested / self.documented


@dataclass(frozen=True)
class CoverageReport:
    results: Mapping[str, MetricResult]
    tcl: int

    @property
    def tcl_capped(self) -> bool:
        return self.tcl == MAX_TCL

    def __getitem__(self, name: str) -> MetricResult:
        return self.results[name]


def _result(
    name: str,
    documented: Iterable[Hashable],
    exercised: Iterable[Hashable],
    **extra,
) -> MetricResult:
    documented = frozenset(documented)
    exercised = frozenset(exercised)
    return MetricResult(
        metric_name=name,
        documented_and_tested_detail=documented & exercised,
        documented_and_not_tested_detail=documented - exercised,
        not_documented_and_tested_detail=exercised - documented,
        **extra,
    )


def _with_response(interactions: Sequence[HttpInteraction]) -> Iterable[HttpInteraction]:
    return (it for it in interactions if it.response is not None and it.match is not None)


def _sorted_methods(methods: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(methods), key=method_sort_key))


# ---------------------------------------------------------------------------
# Input metrics
# ---------------------------------------------------------------------------


def path_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> MetricResult:
    exercised: dict[str, set[str]] = {}
    for it in interactions:
        # unmatched requests are keyed by the path exactly as sent
        key = it.match.template if it.match else it.request.raw_path
        exercised.setdefault(key, set()).add(it.request.method.lower())
    methods = {p: _sorted_methods(ms) for p, ms in exercised.items()}
    for p in inventory.paths - exercised.keys():
        methods[p] = inventory.methods_by_path.get(p, ())
    return _result("pathCoverage", inventory.paths, exercised, path_methods=methods)


def operation_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> MetricResult:
    exercised = {it.match.key for it in interactions if it.match}
    return _result("operationCoverage", inventory.operations, exercised)


def supplied_parameters(it: HttpInteraction) -> dict[str, dict[str, list[str]]]:
    """Parameter values an interaction supplies, per location (header names lower-cased)."""
    req = it.request
    headers: dict[str, list[str]] = {}
    for name, value in req.headers:
        headers.setdefault(name.lower(), []).append(value)
    return {
        "path": {k: [v] for k, v in it.extracted_path_parameters.items()},
        "query": {k: list(v) for k, v in req.query_parameters.items()},
        "header": headers,
        "cookie": req.cookies,
    }


def _lookup(supplied: dict[str, dict[str, list[str]]], location: str, name: str) -> list[str] | None:
    if location == "header":
        name = name.lower()
    return supplied.get(location, {}).get(name)


def parameter_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> MetricResult:
    by_operation: dict[tuple[str, str], list[tuple[str, frozenset[str]]]] = {}
    for (t, m, name), locations in inventory.parameter_locations.items():
        by_operation.setdefault((t, m), []).append((name, locations))

    exercised = set()
    for it in interactions:
        if not it.match:
            continue
        t, m = it.match.key
        supplied = supplied_parameters(it)
        for name, locations in by_operation.get((t, m), ()):
            if any(_lookup(supplied, loc, name) is not None for loc in locations):
                exercised.add((t, m, name))
        # undocumented parameters are only recognisable in the path and query string
        for loc in ("path", "query"):
            for name in supplied[loc]:
                if (t, m, name) not in inventory.parameters:
                    exercised.add((t, m, name))
    return _result("parameterCoverage", inventory.parameters, exercised)


def _split_values(raw: str, domain: frozenset[str]) -> list[str]:
    if raw in domain or "," not in raw:
        return [raw]
    return raw.split(",")  # csv-serialized array


def parameter_value_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> MetricResult:
    domains: dict[tuple[str, str, str], set[str]] = {}
    for t, m, name, value in inventory.parameter_values:
        domains.setdefault((t, m, name), set()).add(value)

    exercised = set()
    for it in interactions:
        if not it.match:
            continue
        t, m = it.match.key
        supplied = supplied_parameters(it)
        for (pt, pm, name), domain in domains.items():
            if (pt, pm) != (t, m):
                continue
            boolean = domain == {"true", "false"}
            frozen = frozenset(domain)
            for loc in inventory.parameter_locations.get((t, m, name), ()):
                for raw in _lookup(supplied, loc, name) or ():
                    for value in _split_values(raw, frozen):
                        if boolean and value.lower() in domain:
                            value = value.lower()
                        exercised.add((t, m, name, value))
    return _result("parameterValueCoverage", inventory.parameter_values, exercised)


def request_content_type_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> MetricResult:
    exercised = set()
    for it in interactions:
        if not it.match or it.match.key in inventory.request_wildcard_operations:
            continue
        content_type = it.request.content_type
        if content_type:
            exercised.add((*it.match.key, content_type))
    return _result("requestContentTypeCoverage", inventory.request_content_types, exercised)


# ---------------------------------------------------------------------------
# Output metrics
# ---------------------------------------------------------------------------


def status_class(code: int) -> str | None:
    if 200 <= code <= 299:
        return "correct"
    if 400 <= code <= 599:
        return "erroneous"
    return None


def status_code_class_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> MetricResult:
    exercised = set()
    for it in _with_response(interactions):
        cls = status_class(it.response.status_code)
        if cls:
            exercised.add((*it.match.key, cls))
    return _result("statusCodeClassCoverage", inventory.status_code_classes, exercised)


def status_code_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> MetricResult:
    exercised = {(*it.match.key, it.response.status_code) for it in _with_response(interactions)}
    return _result("statusCodeCoverage", inventory.status_codes, exercised)


def response_content_type_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> MetricResult:
    exercised = set()
    for it in _with_response(interactions):
        if it.match.key in inventory.response_wildcard_operations:
            continue
        content_type = it.response.content_type
        if content_type:
            exercised.add((*it.match.key, content_type))
    return _result("responseContentTypeCoverage", inventory.response_content_types, exercised)


METRICS: dict[str, Callable[[TestableElementInventory, Sequence[HttpInteraction]], MetricResult]] = {
    "pathCoverage": path_coverage,
    "operationCoverage": operation_coverage,
    "parameterCoverage": parameter_coverage,
    "parameterValueCoverage": parameter_value_coverage,
    "requestContentTypeCoverage": request_content_type_coverage,
    "statusCodeClassCoverage": status_code_class_coverage,
    "statusCodeCoverage": status_code_coverage,
    "responseContentTypeCoverage": response_content_type_coverage,
}


def compute_tcl(results: Mapping[str, MetricResult]) -> int:
    missing = [n for n in METRIC_NAMES if n not in results]
    if missing:
        raise ValueError(f"missing metric results: {', '.join(missing)}")
    level = 0
    for requirements in TCL_LADDER:
        if not all(results[name].rate == 1.0 for name in requirements):
            break
        level += 1
    return level


def compute_coverage(
    inventory: TestableElementInventory, interactions: Sequence[HttpInteraction]
) -> CoverageReport:
    results = {name: METRICS[name](inventory, interactions) for name in METRIC_NAMES}
    return CoverageReport(results=results, tcl=compute_tcl(results))
