"""OpenAPI loading and the inventory of testable API elements.

Swagger 2.0 and OpenAPI 3.x documents are both normalized into a single
:class:`ApiSpecification`.  :func:`build_inventory` then flattens the model
into the element sets that act as denominators for every coverage metric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping
from urllib.parse import urlsplit

import yaml

from restcov.errors import SpecNotFound, SpecParseError, SpecSemanticError

# Fixed method order used wherever methods are listed.
METHOD_ORDER = ("get", "post", "put", "delete", "patch", "head", "options")
STATUS_CLASSES = ("correct", "erroneous")
PARAMETER_LOCATIONS = ("path", "query", "header", "cookie")

OperationKey = tuple[str, str]  # (template, lower-case method)


def method_sort_key(method: str) -> tuple[int, str]:
    method = method.lower()
    if method in METHOD_ORDER:
        return (METHOD_ORDER.index(method), method)
    return (len(METHOD_ORDER), method)


def normalize_media_type(value: str | None) -> str | None:
    """Strip media-type parameters and lower-case ``type/subtype``.

    >>> normalize_media_type("Application/JSON; charset=utf-8")
    'application/json'
    """
    if value is None:
        return None
    base = value.split(";", 1)[0].strip().lower()
    return base or None


def is_wildcard(media_type: str) -> bool:
    return "*" in media_type


def value_text(value: Any) -> str:
    """Render an admissible parameter value the way it appears on the wire."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def normalize_path(path: str) -> str:
    if len(path) > 1 and path.endswith("/"):
        path = path.rstrip("/") or "/"
    return path


@dataclass(frozen=True)
class ParameterDescriptor:
    name: str
    location: str
    # None means an unbounded domain.
    domain: tuple[str, ...] | None = None
    required: bool = False

    @property
    def is_finite(self) -> bool:
        return self.domain is not None


@dataclass(frozen=True)
class OperationDescriptor:
    method: str
    parameters: tuple[ParameterDescriptor, ...] = ()
    request_content_types: tuple[str, ...] = ()
    documented_status_codes: tuple[int | str, ...] = ()
    response_content_types: tuple[str, ...] = ()


@dataclass(frozen=True)
class PathTemplate:
    template: str
    operations: tuple[OperationDescriptor, ...]

    @property
    def segments(self) -> tuple[tuple[bool, str], ...]:
        """``(is_parameter, text)`` per segment; parameter text is the bare name."""
        return split_template(self.template)

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(text for is_param, text in self.segments if is_param)

    def operation(self, method: str) -> OperationDescriptor | None:
        method = method.lower()
        for op in self.operations:
            if op.method == method:
                return op
        return None


def split_template(template: str) -> tuple[tuple[bool, str], ...]:
    if template == "/":
        return ()
    out = []
    for seg in template.strip("/").split("/"):
        if len(seg) > 2 and seg.startswith("{") and seg.endswith("}"):
            out.append((True, seg[1:-1]))
        else:
            out.append((False, seg))
    return tuple(out)


@dataclass(frozen=True)
class ApiSpecification:
    title: str = ""
    server_prefixes: tuple[str, ...] = ()
    paths: tuple[PathTemplate, ...] = ()

    def template(self, template: str) -> PathTemplate | None:
        for p in self.paths:
            if p.template == template:
                return p
        return None


@dataclass(frozen=True)
class TestableElementInventory:
    paths: frozenset[str]
    operations: frozenset[OperationKey]
    parameters: frozenset[tuple[str, str, str]]
    parameter_values: frozenset[tuple[str, str, str, str]]
    request_content_types: frozenset[tuple[str, str, str]]
    status_codes: frozenset[tuple[str, str, int]]
    status_code_classes: frozenset[tuple[str, str, str]]
    response_content_types: frozenset[tuple[str, str, str]]
    # (template, method, name) -> locations the parameter is declared in
    parameter_locations: Mapping[tuple[str, str, str], frozenset[str]] = field(
        default_factory=dict, compare=False
    )
    # template -> documented methods, used by the path metric report
    methods_by_path: Mapping[str, tuple[str, ...]] = field(default_factory=dict, compare=False)
    # operations whose consume/produce list contains a wildcard
    request_wildcard_operations: frozenset[OperationKey] = frozenset()
    response_wildcard_operations: frozenset[OperationKey] = frozenset()

    __test__ = False  # keep pytest from collecting this class


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def load_specification(file_path: str | Path) -> ApiSpecification:
    path = Path(file_path)
    if not path.is_file():
        raise SpecNotFound(f"OpenAPI specification not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() == ".json":
            document = json.loads(text)
        else:
            document = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise SpecParseError(f"{path}: {exc}") from exc
    return parse_specification(document)


def parse_specification(document: Any) -> ApiSpecification:
    """Normalize an already-decoded OpenAPI document."""
    if not isinstance(document, dict):
        raise SpecParseError("OpenAPI document must be a mapping at the top level")
    paths_obj = document.get("paths") or {}
    if not isinstance(paths_obj, dict):
        raise SpecParseError("'paths' must be a mapping")

    resolver = _RefResolver(document)
    is_v2 = "swagger" in document
    info = document.get("info") or {}
    title = info.get("title", "") if isinstance(info, dict) else ""

    templates: dict[str, list[OperationDescriptor]] = {}
    for raw_template, item in paths_obj.items():
        if not isinstance(raw_template, str) or not raw_template.startswith("/"):
            continue  # vendor extensions such as "x-foo"
        item = resolver.resolve(item)
        if not isinstance(item, dict):
            raise SpecParseError(f"path item {raw_template!r} must be a mapping")
        template = normalize_path(raw_template)
        names = [t for is_param, t in split_template(template) if is_param]
        if len(names) != len(set(names)):
            raise SpecSemanticError(f"repeated path parameter name in {raw_template!r}")
        ops = templates.setdefault(template, [])
        for key, op_obj in item.items():
            method = str(key).lower()
            if method not in METHOD_ORDER:
                continue
            if any(op.method == method for op in ops):
                raise SpecSemanticError(f"duplicate operation {method.upper()} {template}")
            op_obj = resolver.resolve(op_obj)
            if not isinstance(op_obj, dict):
                raise SpecParseError(f"operation {method.upper()} {template} must be a mapping")
            build = _build_operation_v2 if is_v2 else _build_operation_v3
            ops.append(build(document, resolver, method, item, op_obj))

    paths = tuple(
        PathTemplate(template=t, operations=tuple(ops)) for t, ops in templates.items() if ops
    )
    return ApiSpecification(
        title=str(title),
        server_prefixes=_server_prefixes(document, is_v2),
        paths=paths,
    )


def _server_prefixes(document: dict, is_v2: bool) -> tuple[str, ...]:
    raw: list[str] = []
    if is_v2:
        base = document.get("basePath")
        if isinstance(base, str):
            raw.append(base)
    else:
        for server in document.get("servers") or ():
            if not isinstance(server, dict) or not isinstance(server.get("url"), str):
                continue
            url = server["url"]
            for name, var in (server.get("variables") or {}).items():
                if isinstance(var, dict) and "default" in var:
                    url = url.replace("{" + name + "}", str(var["default"]))
            raw.append(urlsplit(url).path)
    prefixes = []
    for p in raw:
        p = "/" + p.strip("/")
        if p != "/" and p not in prefixes:
            prefixes.append(p)
    return tuple(prefixes)


class _RefResolver:
    """Resolves local ``#/...`` JSON pointers; remote references are left untouched."""

    def __init__(self, document: dict) -> None:
        self.document = document

    def resolve(self, node: Any) -> Any:
        seen = set()
        while isinstance(node, dict) and isinstance(node.get("$ref"), str):
            ref = node["$ref"]
            if not ref.startswith("#") or ref in seen:
                return node
            seen.add(ref)
            node = self._lookup(ref)
        return node

    def _lookup(self, ref: str) -> Any:
        target: Any = self.document
        for part in ref[1:].split("/"):
            if not part:
                continue
            part = part.replace("~1", "/").replace("~0", "~")
            if isinstance(target, dict) and part in target:
                target = target[part]
            elif isinstance(target, list) and part.isdigit() and int(part) < len(target):
                target = target[int(part)]
            else:
                raise SpecParseError(f"unresolvable reference {ref!r}")
        return target


def _merged_parameters(resolver: _RefResolver, item: dict, op: dict) -> list[dict]:
    # operation-level declarations override path-level ones with the same (name, in)
    merged: dict[tuple[str, str], dict] = {}
    for source in (item.get("parameters") or (), op.get("parameters") or ()):
        for p in source:
            p = resolver.resolve(p)
            if isinstance(p, dict) and "name" in p and "in" in p:
                merged[(str(p["name"]), str(p["in"]))] = p
    return list(merged.values())


def _domain(resolver: _RefResolver, schema: Any) -> tuple[str, ...] | None:
    schema = resolver.resolve(schema)
    if not isinstance(schema, dict):
        return None
    if schema.get("type") == "array":
        return _domain(resolver, schema.get("items"))
    if schema.get("type") == "boolean":
        return ("true", "false")
    enum = schema.get("enum")
    if isinstance(enum, list):
        values = list(dict.fromkeys(value_text(v) for v in enum if v is not None))
        if values:
            return tuple(values)
    return None


def _parameter(resolver: _RefResolver, p: dict, is_v2: bool) -> ParameterDescriptor | None:
    location = p["in"]
    if location not in PARAMETER_LOCATIONS:
        return None  # body / formData belong to body-property coverage
    schema = p if is_v2 else p.get("schema")
    return ParameterDescriptor(
        name=str(p["name"]),
        location=location,
        domain=_domain(resolver, schema),
        required=bool(p.get("required", location == "path")),
    )


def _status_codes(responses: Any) -> tuple[int | str, ...]:
    codes: list[int | str] = []
    for key in responses or {}:
        text = str(key).strip()
        if text == "default":
            codes.append("default")
        elif text.isdigit() and 100 <= int(text) <= 599:
            codes.append(int(text))
        # range keys such as "2XX" are not individual codes and are skipped
    return tuple(codes)


def _media_list(values: Iterable[Any]) -> tuple[str, ...]:
    out = []
    for v in values:
        mt = normalize_media_type(str(v))
        if mt and mt not in out:
            out.append(mt)
    return tuple(out)


def _build_operation_v2(
    document: dict, resolver: _RefResolver, method: str, item: dict, op: dict
) -> OperationDescriptor:
    raw_params = _merged_parameters(resolver, item, op)
    params = tuple(
        d for d in (_parameter(resolver, p, True) for p in raw_params) if d is not None
    )
    has_body = any(p["in"] in ("body", "formData") for p in raw_params)
    consumes = op.get("consumes", document.get("consumes")) or ()
    produces = op.get("produces", document.get("produces")) or ()
    return OperationDescriptor(
        method=method,
        parameters=params,
        request_content_types=_media_list(consumes) if has_body else (),
        documented_status_codes=_status_codes(op.get("responses")),
        response_content_types=_media_list(produces),
    )


def _build_operation_v3(
    document: dict, resolver: _RefResolver, method: str, item: dict, op: dict
) -> OperationDescriptor:
    params = tuple(
        d
        for d in (_parameter(resolver, p, False) for p in _merged_parameters(resolver, item, op))
        if d is not None
    )
    body = resolver.resolve(op.get("requestBody")) or {}
    request_types = _media_list((body.get("content") or {}).keys()) if isinstance(body, dict) else ()
    response_types: list[str] = []
    responses = op.get("responses") or {}
    for response in responses.values():
        response = resolver.resolve(response)
        if isinstance(response, dict):
            response_types.extend((response.get("content") or {}).keys())
    return OperationDescriptor(
        method=method,
        parameters=params,
        request_content_types=request_types,
        documented_status_codes=_status_codes(responses),
        response_content_types=_media_list(response_types),
    )


# ---------------------------------------------------------------------------
# Inventory
# ---------------------------------------------------------------------------


def build_inventory(spec: ApiSpecification) -> TestableElementInventory:
    paths: set[str] = set()
    operations: set[OperationKey] = set()
    parameters: set[tuple[str, str, str]] = set()
    values: set[tuple[str, str, str, str]] = set()
    req_types: set[tuple[str, str, str]] = set()
    codes: set[tuple[str, str, int]] = set()
    classes: set[tuple[str, str, str]] = set()
    resp_types: set[tuple[str, str, str]] = set()
    locations: dict[tuple[str, str, str], set[str]] = {}
    methods_by_path: dict[str, tuple[str, ...]] = {}
    req_wild: set[OperationKey] = set()
    resp_wild: set[OperationKey] = set()

    for path in spec.paths:
        t = path.template
        paths.add(t)
        methods_by_path[t] = tuple(sorted((op.method for op in path.operations), key=method_sort_key))
        for op in path.operations:
            m = op.method
            operations.add((t, m))
            for p in op.parameters:
                parameters.add((t, m, p.name))
                locations.setdefault((t, m, p.name), set()).add(p.location)
                for v in p.domain or ():
                    values.add((t, m, p.name, v))
            if any(is_wildcard(mt) for mt in op.request_content_types):
                req_wild.add((t, m))
            else:
                req_types.update((t, m, mt) for mt in op.request_content_types)
            if any(is_wildcard(mt) for mt in op.response_content_types):
                resp_wild.add((t, m))
            else:
                resp_types.update((t, m, mt) for mt in op.response_content_types)
            codes.update((t, m, c) for c in op.documented_status_codes if c != "default")
            classes.update((t, m, c) for c in STATUS_CLASSES)

    return TestableElementInventory(
        paths=frozenset(paths),
        operations=frozenset(operations),
        parameters=frozenset(parameters),
        parameter_values=frozenset(values),
        request_content_types=frozenset(req_types),
        status_codes=frozenset(codes),
        status_code_classes=frozenset(classes),
        response_content_types=frozenset(resp_types),
        parameter_locations={k: frozenset(v) for k, v in locations.items()},
        methods_by_path=methods_by_path,
        request_wildcard_operations=frozenset(req_wild),
        response_wildcard_operations=frozenset(resp_wild),
    )
