"""Resolution of concrete request paths to OpenAPI path templates.

When several templates match a path, the most specific one wins: scanning
segments left to right, a static segment beats a parameter at the first
position where the candidates differ.  Candidates with identical shapes
(``/a/{x}`` vs ``/a/{y}``) are ordered by template text and a warning is
logged, since the document itself is ambiguous there.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from urllib.parse import unquote

from restcov.http_message import HttpRequestRecord
from restcov.spec_model import ApiSpecification, PathTemplate, normalize_path

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchResult:
    template: PathTemplate
    method_supported: bool = False
    extracted_parameters: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Classification:
    """The operation key an interaction is attributed to."""

    template: str
    method: str
    method_supported: bool
    path_parameters: dict[str, str] = field(default_factory=dict)

    @property
    def key(self) -> tuple[str, str]:
        return (self.template, self.method)


def strip_server_prefix(raw_path: str, spec: ApiSpecification | tuple[str, ...]) -> str:
    prefixes = spec.server_prefixes if isinstance(spec, ApiSpecification) else spec
    best = ""
    for prefix in prefixes:
        prefix = prefix.rstrip("/")
        if not prefix:
            continue
        if (raw_path == prefix or raw_path.startswith(prefix + "/")) and len(prefix) > len(best):
            best = prefix
    if not best:
        return raw_path
    return raw_path[len(best) :] or "/"


def _concrete_segments(path: str) -> list[str]:
    path = normalize_path(path)
    if path == "/":
        return []
    return path[1:].split("/")


def _bind(template: PathTemplate, segments: list[str]) -> dict[str, str] | None:
    shape = template.segments
    if len(shape) != len(segments):
        return None
    bound: dict[str, str] = {}
    for (is_param, text), seg in zip(shape, segments):
        if is_param:
            if not seg:
                return None
            bound[text] = unquote(seg)
        elif seg != text and unquote(seg) != text:
            return None
    return bound


def _specificity(template: PathTemplate) -> tuple[tuple[int, ...], str]:
    return tuple(1 if is_param else 0 for is_param, _ in template.segments), template.template


def match_path(path: str, spec: ApiSpecification, method: str | None = None) -> MatchResult | None:
    segments = _concrete_segments(path)
    candidates = []
    for template in spec.paths:
        bound = _bind(template, segments)
        if bound is not None:
            candidates.append((_specificity(template), template, bound))
    if not candidates:
        return None
    candidates.sort(key=lambda c: c[0])
    (shape, _), template, bound = candidates[0]
    if len(candidates) > 1 and candidates[1][0][0] == shape:
        log.warning(
            "ambiguous templates for %s: %s; choosing %s",
            path,
            ", ".join(c[1].template for c in candidates if c[0][0] == shape),
            template.template,
        )
    supported = method is not None and template.operation(method) is not None
    return MatchResult(template=template, method_supported=supported, extracted_parameters=bound)


def classify_interaction(
    request: HttpRequestRecord, spec: ApiSpecification
) -> Classification | None:
    path = strip_server_prefix(request.raw_path, spec)
    result = match_path(path, spec, request.method)
    if result is None:
        return None
    return Classification(
        template=result.template.template,
        method=request.method.lower(),
        method_supported=result.method_supported,
        path_parameters=result.extracted_parameters,
    )
