"""Tabular reports and their CSV / JSON serialisations."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import QcorrError

SCHEMA_VERSION = 1
SIG_DIGITS = 12


class ReportIOError(QcorrError, OSError):
    pass


def round_sig(x: float) -> float | None:
    """Round to 12 significant digits; NaN becomes ``None``."""
    if math.isnan(x):
        return None
    if x == 0:
        return 0.0
    return float(f"{x:.{SIG_DIGITS}g}")


def _clean(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float) or hasattr(value, "__float__"):
        return round_sig(float(value))
    raise TypeError(f"unsupported report value {value!r}")


@dataclass
class Check:
    name: str
    holds: bool
    detail: str = ""


@dataclass
class Report:
    """Rows of values under named columns, plus pass/fail checks.

    Floats are rounded to 12 significant digits as rows are added, so the
    in-memory report is exactly what either serialisation carries.
    """

    kind: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append([_clean(v) for v in values])

    def add_check(self, name: str, holds: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(holds), detail))

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)

    def failed_checks(self) -> list[Check]:
        return [c for c in self.checks if not c.holds]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "meta": self.meta,
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "checks": [{"name": c.name, "holds": c.holds, "detail": c.detail} for c in self.checks],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema_version {data.get('schema_version')!r}")
        return cls(
            kind=data["kind"],
            columns=list(data["columns"]),
            rows=[list(r) for r in data["rows"]],
            checks=[Check(c["name"], c["holds"], c.get("detail", "")) for c in data["checks"]],
            meta=dict(data.get("meta", {})),
        )


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{SIG_DIGITS}g}"
    return str(value)


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, allow_nan=False) + "\n"


def render(report: Report, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(report)
    if fmt == "json":
        return to_json(report)
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(report: Report, fmt: str = "csv", destination: str | Path | None = None) -> str:
    """Serialise ``report`` and write it to ``destination`` (stdout when ``None``)."""
    text = render(report, fmt)
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
        return text
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {destination}: {exc}") from exc
    return text
