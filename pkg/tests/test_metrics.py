"""Metric examples on hand-built inputs; the random-corpus checks live in test_acceptance."""

from dataclasses import replace

import pytest

from restcov.http_message import Headers, HttpRequestRecord, HttpResponseRecord
from restcov.ingest import HttpInteraction
from restcov.matching import classify_interaction
from restcov.metrics import (
    METRIC_NAMES,
    MetricResult,
    compute_coverage,
    compute_tcl,
    operation_coverage,
    parameter_coverage,
    parameter_value_coverage,
    path_coverage,
    request_content_type_coverage,
    response_content_type_coverage,
    status_code_class_coverage,
    status_code_coverage,
)
from restcov.spec_model import build_inventory, parse_specification


def interaction(spec, n, method, target, headers=(), status=None, response_headers=()):
    path, _, query = target.partition("?")
    from urllib.parse import parse_qs

    req = HttpRequestRecord(method, path, parse_qs(query, keep_blank_values=True), Headers(headers))
    resp = HttpResponseRecord(status, headers=Headers(response_headers)) if status else None
    return HttpInteraction(n, req, resp, classify_interaction(req, spec))


@pytest.fixture
def petstore(petstore_spec, petstore_inventory, petstore_ingest):
    return petstore_spec, petstore_inventory, petstore_ingest.interactions


class TestPetStore:
    def test_path(self, petstore):
        _, inv, its = petstore
        r = path_coverage(inv, its)
        assert (r.documented, r.documented_and_tested, r.rate) == (4, 1, 0.25)

    def test_operation(self, petstore):
        _, inv, its = petstore
        r = operation_coverage(inv, its)
        assert (r.documented, r.documented_and_tested, r.total_tested) == (7, 2, 3)
        assert r.rate == 0.2857142857142857
        assert r.not_documented_and_tested_detail == {("/pet", "patch")}

    def test_parameter_nothing_exercised(self, petstore):
        _, inv, its = petstore
        assert parameter_coverage(inv, its).documented_and_tested == 0

    def test_status_code_class(self, petstore):
        _, inv, its = petstore
        r = status_code_class_coverage(inv, its)
        assert (r.documented, r.documented_and_tested) == (14, 3)
        assert ("/pet", "get", "correct") in r.documented_and_tested_detail
        assert ("/pet", "get", "erroneous") in r.documented_and_not_tested_detail
        assert {("/pet", "post", "correct"), ("/pet", "post", "erroneous")} <= r.documented_and_tested_detail

    def test_status_code(self, petstore):
        _, inv, its = petstore
        r = status_code_coverage(inv, its)
        post_tested = {c for t, m, c in r.documented_and_tested_detail if m == "post"}
        post_extra = {c for t, m, c in r.not_documented_and_tested_detail if m == "post"}
        assert post_tested == {200}
        assert post_extra == {500}
        assert ("/pet", "patch", 405) in r.not_documented_and_tested_detail

    def test_request_content_type(self, petstore):
        _, inv, its = petstore
        r = request_content_type_coverage(inv, its)
        post = {e for e in r.documented_and_tested_detail | r.documented_and_not_tested_detail if e[1] == "post"}
        assert len(post) == 2
        assert {e for e in r.documented_and_tested_detail if e[1] == "post"} == {("/pet", "post", "application/json")}

    def test_response_content_type(self, petstore):
        _, inv, its = petstore
        r = response_content_type_coverage(inv, its)
        get = {e for e in r.documented_and_tested_detail if e[:2] == ("/pet", "get")}
        assert get == {("/pet", "get", "application/json")}
        assert ("/pet", "get", "application/xml") in r.documented_and_not_tested_detail

    def test_tcl(self, petstore):
        _, inv, its = petstore
        report = compute_coverage(inv, its)
        assert report.tcl == 0
        assert report.tcl_capped is False

    def test_zero_interactions(self, petstore):
        _, inv, _ = petstore
        report = compute_coverage(inv, [])
        assert all(report[n].documented_and_tested == 0 for n in METRIC_NAMES)
        assert report["operationCoverage"].documented_and_not_tested_detail == inv.operations
        assert report["pathCoverage"].rate == 0

    def test_find_by_status_parameter(self, petstore):
        spec, inv, _ = petstore
        it = interaction(spec, 1, "GET", "/v2/pet/findByStatus?status=sold")
        assert ("/pet/findByStatus", "get", "status") in parameter_coverage(inv, [it]).documented_and_tested_detail
        values = parameter_value_coverage(inv, [it])
        assert values.documented_and_tested_detail == {("/pet/findByStatus", "get", "status", "sold")}
        assert (values.documented_and_tested, values.documented) == (1, 3)

    def test_out_of_domain_value(self, petstore):
        spec, inv, _ = petstore
        it = interaction(spec, 1, "GET", "/v2/pet/findByStatus?status=unknown")
        r = parameter_value_coverage(inv, [it])
        assert r.documented_and_tested == 0
        assert r.total_tested == 1

    def test_csv_array_values(self, petstore):
        spec, inv, _ = petstore
        it = interaction(spec, 1, "GET", "/v2/pet/findByStatus?status=sold,pending")
        assert parameter_value_coverage(inv, [it]).documented_and_tested == 2

    def test_header_parameter(self, petstore):
        spec, inv, _ = petstore
        it = interaction(spec, 1, "DELETE", "/v2/pet/3", headers=[("API_KEY", "k")])
        tested = parameter_coverage(inv, [it]).documented_and_tested_detail
        assert tested == {("/pet/{petId}", "delete", "petId"), ("/pet/{petId}", "delete", "api_key")}

    def test_undocumented_query_parameter(self, petstore):
        spec, inv, _ = petstore
        it = interaction(spec, 1, "GET", "/v2/pet?limit=3")
        r = parameter_coverage(inv, [it])
        assert r.not_documented_and_tested_detail == {("/pet", "get", "limit")}

    def test_every_path_once_is_full(self, petstore):
        spec, inv, _ = petstore
        its = [
            interaction(spec, i, "GET", p)
            for i, p in enumerate(["/v2/pet", "/v2/pet/findByStatus", "/v2/pet/findByTags", "/v2/pet/1"])
        ]
        assert path_coverage(inv, its).rate == 1.0

    def test_unmatched_path_counts_only_for_paths(self, petstore):
        spec, inv, _ = petstore
        it = interaction(spec, 1, "GET", "/unknown", headers=[("Content-Type", "text/plain")], status=200)
        report = compute_coverage(inv, [it])
        assert report["pathCoverage"].not_documented_and_tested_detail == {"/unknown"}
        assert all(report[n].total_tested == 0 for n in METRIC_NAMES if n != "pathCoverage")


SMALL = parse_specification(
    {
        "openapi": "3.0.0",
        "paths": {
            "/w": {
                "post": {
                    "parameters": [{"name": "verbose", "in": "query", "schema": {"type": "boolean"}}],
                    "requestBody": {"content": {"application/*": {}}},
                    "responses": {"200": {"content": {"*/*": {}}}, "302": {}},
                },
                "get": {
                    "requestBody": {"content": {"application/json": {}}},
                    "responses": {"200": {"content": {"application/json": {}}}},
                },
            }
        },
    }
)
SMALL_INV = build_inventory(SMALL)


def test_boolean_values_case_insensitive():
    its = [interaction(SMALL, 1, "POST", "/w?verbose=TRUE"), interaction(SMALL, 2, "POST", "/w?verbose=false")]
    r = parameter_value_coverage(SMALL_INV, its)
    assert r.documented_and_tested_detail == {("/w", "post", "verbose", "true"), ("/w", "post", "verbose", "false")}


def test_wildcard_operation_contributes_nothing():
    its = [
        interaction(SMALL, 1, "POST", "/w", headers=[("Content-Type", "application/json")], status=200,
                    response_headers=[("Content-Type", "text/html")]),
    ]
    req = request_content_type_coverage(SMALL_INV, its)
    resp = response_content_type_coverage(SMALL_INV, its)
    assert req.documented == 1 and req.total_tested == 0
    assert resp.documented == 1 and resp.total_tested == 0


def test_charset_stripped():
    it = interaction(SMALL, 1, "GET", "/w", headers=[("Content-Type", "application/json; charset=utf-8")])
    assert request_content_type_coverage(SMALL_INV, [it]).documented_and_tested == 1


def test_response_without_content_type():
    it = interaction(SMALL, 1, "GET", "/w", status=200)
    assert response_content_type_coverage(SMALL_INV, [it]).total_tested == 0


def test_redirect_has_no_class_but_counts_as_code():
    it = interaction(SMALL, 1, "POST", "/w", status=302)
    assert status_code_class_coverage(SMALL_INV, [it]).total_tested == 0
    assert status_code_coverage(SMALL_INV, [it]).documented_and_tested_detail == {("/w", "post", 302)}


def test_orphans_ignored_by_output_metrics():
    it = interaction(SMALL, 1, "GET", "/w")
    assert status_code_class_coverage(SMALL_INV, [it]).documented_and_tested == 0
    assert operation_coverage(SMALL_INV, [it]).documented_and_tested == 1


def test_vacuous_rate():
    spec = parse_specification({"openapi": "3.0.0", "paths": {"/a": {"get": {}}}})
    r = parameter_coverage(build_inventory(spec), [])
    assert (r.documented, r.total_tested, r.rate) == (0, 0, 1.0)


def _results(rates):
    """MetricResults whose rate is 1.0 when the flag is set, 0.0 otherwise."""
    return {
        name: MetricResult(name, frozenset(), frozenset() if full else frozenset({"x"}), frozenset())
        for name, full in zip(METRIC_NAMES, rates)
    }


@pytest.mark.parametrize(
    "full, expected",
    [
        ([True] * 8, 5),
        ([False] * 8, 0),
        ([True, False] + [True] * 6, 1),
        ([True, True, True, True, False, True, True, True], 2),  # request content types missing
        ([True, True, False, True, True, True, True, True], 3),  # parameter coverage missing
        ([True, True, True, True, True, True, False, True], 4),  # status codes missing
        ([True, True, True, False, True, True, True, True], 5),  # parameter values are not on the ladder
    ],
)
def test_tcl_ladder(full, expected):
    results = _results(full)
    assert compute_tcl(results) == expected


def test_tcl_cut_at_operation():
    results = _results([True] * 8)
    results["operationCoverage"] = MetricResult(
        "operationCoverage", frozenset(range(9)), frozenset({"x"}), frozenset()
    )
    assert results["operationCoverage"].rate == 0.9
    assert compute_tcl(results) == 1


def test_tcl_requires_all_results():
    with pytest.raises(ValueError):
        compute_tcl({})


def test_full_coverage_sets_capped_flag():
    spec = parse_specification(
        {"openapi": "3.0.0", "paths": {"/a": {"get": {"responses": {"200": {}, "404": {}}}}}}
    )
    inv = build_inventory(spec)
    its = [interaction(spec, 1, "GET", "/a", status=200), interaction(spec, 2, "GET", "/a", status=404)]
    report = compute_coverage(inv, its)
    assert report.tcl == 5
    assert report.tcl_capped is True
