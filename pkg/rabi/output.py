from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from rabi.models import Parity

FORMATS = ("csv", "json")


@dataclass
class Table:
    header: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)

    def add(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(list(values))


def format_number(value: float) -> str:
    return f"{value:.17g}"


def _cell(value: Any) -> str:
    if isinstance(value, Parity):
        return value.label
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def _json_cell(value: Any) -> Any:
    if isinstance(value, Parity):
        return value.label
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float):
        # same value as the CSV text; JSON has no literal for nan or inf
        return None if not math.isfinite(value) else float(format_number(value))
    return value


def render_csv(table: Table) -> str:
    buffer = io.StringIO()
    for key, value in table.header.items():
        buffer.write(f"# {key}={_cell(value)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def render_json(table: Table) -> str:
    payload = {
        "header": {key: _json_cell(value) for key, value in table.header.items()},
        "columns": table.columns,
        "rows": [[_json_cell(v) for v in row] for row in table.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(table)
    if fmt == "json":
        return render_json(table)
    raise ValueError(f"unknown output format {fmt!r}")


def write_table(table: Table, fmt: str, out: str | Path | None = None) -> None:
    text = render(table, fmt)
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8")
