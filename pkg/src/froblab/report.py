"""CSV and JSON output for experiment runs.

A run produces a one-row summary table and a detail table (one row per
prime for the experiment commands, one row per check for ``verify``).
With an output path ``run.csv`` the files are

* ``run.csv``: summary, columns :data:`SUMMARY_COLUMNS`;
* ``run.primes.csv``: detail rows (header only when there are no primes);
* ``run.json``: sidecar with the config echo, library versions, envelope
  constants, threshold flags and run-specific extras.

Numbers are written with 12 significant digits and missing values as
empty cells, so a fixed config yields the same bytes on every rerun once
timing columns are disabled.
"""

from __future__ import annotations

import csv
import io
import json
import os
import platform
from dataclasses import dataclass, field

SUMMARY_COLUMNS = ("command", "f", "g", "A", "B", "x", "target", "empirical_average",
                   "main_term", "ratio", "envelope", "threshold_ok", "wall_time_ms")
PRIME_COLUMNS = ("p", "count", "class_count", "max_trace", "elapsed_us")


@dataclass
class RunReport:
    summary: dict
    detail_columns: tuple
    detail_rows: list
    extra: dict = field(default_factory=dict)
    threshold_flags: dict = field(default_factory=dict)
    ok: bool = True


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value != value:
            return "nan"
        return format(value, ".12g")
    return str(value)


def _table(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def summary_csv(report: RunReport) -> str:
    return _table(SUMMARY_COLUMNS, [[report.summary.get(c) for c in SUMMARY_COLUMNS]])


def detail_csv(report: RunReport) -> str:
    return _table(report.detail_columns, report.detail_rows)


def versions() -> dict:
    import numpy
    import scipy

    from . import __version__
    return {"froblab": __version__, "numpy": numpy.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _jsonable(value):
    if isinstance(value, float) and value != value:
        return None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def sidecar(report: RunReport, config) -> dict:
    return _jsonable({
        "config": config.to_dict(),
        "versions": versions(),
        "constants": config.constants,
        "threshold_flags": report.threshold_flags,
        "summary": report.summary,
        "extra": report.extra,
    })


def detail_path(path: str) -> str:
    stem, _ = os.path.splitext(path)
    return stem + ".primes.csv"


def sidecar_path(path: str) -> str:
    stem, _ = os.path.splitext(path)
    return stem + ".json"


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"output: cannot write {path} ({exc.strerror})") from exc


def emit_csv(report: RunReport, config, path: str) -> list[str]:
    """Write summary, detail and sidecar files; return the paths written."""
    paths = [path, detail_path(path), sidecar_path(path)]
    if len(set(paths)) < 3:
        raise OSError(f"output: {path} would collide with its sidecar; use a .csv name")
    _write(paths[0], summary_csv(report))
    _write(paths[1], detail_csv(report))
    _write(paths[2], json.dumps(sidecar(report, config), indent=2, sort_keys=True,
                                ensure_ascii=False) + "\n")
    return paths


def emit_json(report: RunReport, config, path: str) -> list[str]:
    """One JSON document holding provenance, summary and detail rows."""
    doc = sidecar(report, config)
    doc["detail"] = {"columns": list(report.detail_columns),
                     "rows": _jsonable(report.detail_rows)}
    _write(path, json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return [path]
