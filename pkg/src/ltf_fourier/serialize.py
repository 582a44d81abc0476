"""Record emission and parsing: CSV and JSONL, byte-stable.

Floats are written with 17 significant digits so binary64 values survive
a round trip exactly; emit(parse(emit(x))) is byte-identical.  CSV rows
follow the fixed column order in RECORD_COLUMNS; the per-coordinate array
is embedded as a JSON array in its cell.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .harness import RECORD_COLUMNS, ExperimentRecord

FORMATS = ("csv", "jsonl")


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return format(float(x), ".17g")


def dumps_json(obj) -> str:
    """JSON with full-precision floats and insertion-ordered keys."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        parts = []
        for key, value in obj.items():
            if not isinstance(key, str):
                raise ValueError(f"JSON object keys must be strings, got {key!r}")
            parts.append(f"{json.dumps(key)}:{dumps_json(value)}")
        return "{" + ",".join(parts) + "}"
    raise ValueError(f"cannot serialize {type(obj).__name__}")


def _cell(value, kind: str) -> str:
    if value is None:
        if not kind.startswith("opt_"):
            raise ValueError(f"unexpected missing value for kind {kind}")
        return ""
    base = kind.removeprefix("opt_")
    if base == "float":
        return format_float(value)
    if base == "int":
        return str(int(value))
    if base == "bool":
        return "true" if value else "false"
    if base == "str":
        return str(value)
    if base == "float_list":
        return dumps_json(list(value))
    raise ValueError(f"unknown column kind {kind}")


def _uncell(text: str, kind: str):
    if text == "" and kind.startswith("opt_"):
        return None
    base = kind.removeprefix("opt_")
    if base == "float":
        return float(text)
    if base == "int":
        return int(text)
    if base == "bool":
        if text not in ("true", "false"):
            raise ValueError(f"invalid boolean cell {text!r}")
        return text == "true"
    if base == "str":
        return text
    if base == "float_list":
        values = json.loads(text)
        return [float(v) for v in values]
    raise ValueError(f"unknown column kind {kind}")


def records_to_csv(records) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([name for name, _ in RECORD_COLUMNS])
    for record in records:
        data = record.to_dict()
        writer.writerow([_cell(data[name], kind) for name, kind in RECORD_COLUMNS])
    return out.getvalue()


def records_to_jsonl(records) -> str:
    lines = []
    for record in records:
        data = record.to_dict()
        lines.append(dumps_json({name: _round_trip_safe(data[name]) for name, _ in RECORD_COLUMNS}))
    return "\n".join(lines) + ("\n" if lines else "")


def _round_trip_safe(value):
    return list(value) if isinstance(value, tuple) else value


def emit_records(records, path, fmt: str) -> Path:
    """Write records to path in the given format; returns the path."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    text = records_to_csv(records) if fmt == "csv" else records_to_jsonl(records)
    path = Path(path)
    path.write_text(text)
    return path


def parse_records(path, fmt: str | None = None) -> list[ExperimentRecord]:
    """Read records back; fmt defaults from the file suffix."""
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower().lstrip(".")
        fmt = {"csv": "csv", "jsonl": "jsonl", "ndjson": "jsonl"}.get(suffix)
        if fmt is None:
            raise ValueError(f"cannot infer format from suffix of {path}; pass fmt")
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    text = path.read_text()
    if fmt == "jsonl":
        records = []
        for line in text.splitlines():
            if not line.strip():
                continue
            records.append(ExperimentRecord.from_dict(json.loads(line)))
        return records
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    header = rows[0]
    expected = [name for name, _ in RECORD_COLUMNS]
    if header != expected:
        raise ValueError("CSV header does not match the record schema")
    records = []
    for row in rows[1:]:
        if len(row) != len(RECORD_COLUMNS):
            raise ValueError(f"CSV row has {len(row)} cells, expected {len(RECORD_COLUMNS)}")
        data = {
            name: _uncell(cell, kind) for (name, kind), cell in zip(RECORD_COLUMNS, row)
        }
        records.append(ExperimentRecord.from_dict(data))
    return records
