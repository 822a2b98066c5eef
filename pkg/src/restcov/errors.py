"""Exception hierarchy shared across the pipeline stages."""

from __future__ import annotations


class RestCovError(Exception):
    """Base class for every error raised by restcov."""


class SpecError(RestCovError):
    pass


class SpecNotFound(SpecError, FileNotFoundError):
    pass


class SpecParseError(SpecError):
    """The document is not valid JSON/YAML or not an OpenAPI object."""


class SpecSemanticError(SpecError):
    """The document parses but violates a structural rule (e.g. duplicate operation)."""


class IngestError(RestCovError):
    pass


class DirectoryNotFound(IngestError):
    pass


class DuplicateSequenceId(IngestError):
    def __init__(self, sequence_id: int, detail: str = "") -> None:
        self.sequence_id = sequence_id
        msg = f"duplicate sequence id {sequence_id}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class MalformedMessage(IngestError):
    pass


class MalformedRequest(MalformedMessage):
    pass


class MalformedResponse(MalformedMessage):
    pass


class StoreError(RestCovError):
    pass


class StoreWriteError(StoreError):
    pass


class StoreReadError(StoreError):
    pass


class StoreVersionMismatch(StoreReadError):
    pass


class ReportWriteError(RestCovError):
    pass


class ConfigError(RestCovError):
    pass


class ConfigNotFound(ConfigError):
    pass


class ConfigParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    def __init__(self, key: str, message: str) -> None:
        self.key = key
        super().__init__(f"{key}: {message}")


class BindError(RestCovError):
    pass
