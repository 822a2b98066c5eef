"""Tool configuration file (``config.json``)."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from restcov.errors import ConfigNotFound, ConfigParseError, ConfigValidationError

log = logging.getLogger(__name__)

MODULES = ("all", "dataCollection", "statistics")
PATH_KEYS = ("specification", "dumpsDir", "reportsDir", "dbPath")
REQUIRED_KEYS = {
    "dataCollection": ("specification", "dumpsDir", "dbPath"),
    "statistics": ("specification", "reportsDir", "dbPath"),
    "all": PATH_KEYS,
}


@dataclass(frozen=True)
class ToolConfig:
    modules: str
    specification: Path | None = None
    dumps_dir: Path | None = None
    reports_dir: Path | None = None
    db_path: Path | None = None

    @property
    def runs_data_collection(self) -> bool:
        return self.modules in ("all", "dataCollection")

    @property
    def runs_statistics(self) -> bool:
        return self.modules in ("all", "statistics")


def load_config(path: str | Path) -> ToolConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigNotFound(f"configuration file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigParseError(f"{path}: top level must be a JSON object")

    modules = raw.get("modules")
    if modules not in MODULES:
        raise ConfigValidationError("modules", f"expected one of {', '.join(MODULES)}, got {modules!r}")

    values: dict[str, Path | None] = {}
    for key in PATH_KEYS:
        value = raw.get(key)
        if value is None:
            if key in REQUIRED_KEYS[modules]:
                raise ConfigValidationError(key, f"required when modules is {modules!r}")
            values[key] = None
            continue
        if not isinstance(value, str) or not value:
            raise ConfigValidationError(key, "must be a non-empty path string")
        p = Path(value).expanduser()
        if not p.is_absolute():
            log.warning("%s is relative (%s); resolving against %s", key, value, path.parent)
            p = (path.parent / p).resolve()
        values[key] = p

    return ToolConfig(
        modules=modules,
        specification=values["specification"],
        dumps_dir=values["dumpsDir"],
        reports_dir=values["reportsDir"],
        db_path=values["dbPath"],
    )
