"""Command-line entry point.

    restcov [config-path]
    restcov proxy --listen HOST:PORT --upstream URL --out DIR [--start N]
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence, TextIO

from restcov.config import ToolConfig, load_config
from restcov.errors import (
    BindError,
    ConfigError,
    IngestError,
    ReportWriteError,
    SpecError,
    StoreError,
)
from restcov.metrics import METRIC_NAMES, CoverageReport
from restcov.pipeline import collect, statistics
from restcov.proxy import ProxyConfig, serve

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SPEC = 2
EXIT_INGEST = 3
EXIT_STORE = 4
EXIT_REPORT = 5

log = logging.getLogger("restcov")


def format_summary(report: CoverageReport, parse_failures: int | None = None) -> str:
    lines = [f"{'metric':<30} {'tested':>8} {'documented':>10} {'rate':>7}"]
    for name in METRIC_NAMES:
        r = report[name]
        lines.append(
            f"{name:<30} {r.documented_and_tested:>8} {r.documented:>10} {r.rate * 100:>6.1f}%"
        )
    capped = " (capped: levels 6-7 need metrics not computed here)" if report.tcl_capped else ""
    lines.append(f"TCL: {report.tcl}{capped}")
    if parse_failures is not None:
        lines.append(f"parse failures: {parse_failures}")
    return "\n".join(lines)


def run(config: ToolConfig, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parse_failures = None
    try:
        if config.runs_data_collection:
            ingest = collect(config.specification, config.dumps_dir, config.db_path)
            parse_failures = ingest.tally.total
            print(
                f"collected {len(ingest.interactions)} of {ingest.request_files} requests "
                f"into {config.db_path}",
                file=out,
            )
        if config.runs_statistics:
            result = statistics(config.specification, config.db_path, config.reports_dir)
            print(format_summary(result.report, parse_failures), file=out)
            print(f"reports written to {config.reports_dir}", file=out)
        elif parse_failures is not None:
            print(f"parse failures: {parse_failures}", file=out)
    except SpecError as exc:
        log.error("specification error: %s", exc)
        return EXIT_SPEC
    except StoreError as exc:
        log.error("store error: %s", exc)
        return EXIT_STORE
    except (IngestError, OSError) as exc:
        log.error("ingestion error: %s", exc)
        return EXIT_INGEST
    except ReportWriteError as exc:
        log.error("report error: %s", exc)
        return EXIT_REPORT
    return EXIT_OK


def _proxy_main(argv: Sequence[str]) -> int:
    parser = argparse.ArgumentParser(prog="restcov proxy", description="Record HTTP traffic as dump files.")
    parser.add_argument("--listen", required=True, help="host:port to bind")
    parser.add_argument("--upstream", required=True, help="base URL of the API under test")
    parser.add_argument("--out", required=True, type=Path, help="directory for dump files")
    parser.add_argument("--start", type=int, default=1, help="first sequence id (default 1)")
    parser.add_argument("--timeout", type=float, default=30.0, help="upstream timeout in seconds")
    args = parser.parse_args(argv)
    try:
        serve(ProxyConfig(args.listen, args.upstream, args.out, args.start, args.timeout))
    except (BindError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    if argv and argv[0] == "proxy":
        return _proxy_main(argv[1:])

    parser = argparse.ArgumentParser(prog="restcov", description="REST API test coverage from recorded traffic.")
    parser.add_argument("config", nargs="?", default="config.json", help="configuration file (default ./config.json)")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
