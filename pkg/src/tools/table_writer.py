"""Deterministic CSV and JSON rendering of sweep tables."""

import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Optional

from src.models.run_config import SweepTable

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 9


def format_number(value: float) -> str:
    """Fixed 9-significant-digit rendering, locale independent."""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = f"{value:.{SIGNIFICANT_DIGITS}g}"
    return "0" if text == "-0" else text


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return format_number(float(value))
    return str(value)


def _json_value(value: Any) -> Any:
    """Round floats to the CSV precision and map non-finite numbers to null."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, float)):
        number = float(value)
        if not math.isfinite(number):
            return None
        return float(format_number(number))
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return str(value)


def to_csv(table: SweepTable) -> str:
    """Metadata as leading '# key: value' lines, then the header and rows."""
    buffer = io.StringIO()
    for key in sorted(table.meta):
        value = json.dumps(_json_value(table.meta[key]), sort_keys=True, ensure_ascii=False)
        buffer.write(f"# {key}: {value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    writer.writerows([_cell(v) for v in row] for row in table.rows)
    return buffer.getvalue()


def to_json(table: SweepTable) -> str:
    """Table object with 'meta' and 'rows' (one object per row, columns in order)."""
    document = {
        "meta": _json_value(table.meta),
        "rows": [dict(zip(table.columns, _json_value(row))) for row in table.rows],
    }
    return json.dumps(document, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def render(table: SweepTable, fmt: str = "csv") -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"unknown output format '{fmt}'")


def write_table(table: SweepTable, path: Optional[str] = None, fmt: str = "csv") -> str:
    """
    Write a table to a file, or to stdout when no path is given.

    Returns:
        The rendered text
    """
    text = render(table, fmt)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return text

    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info(f"Wrote {len(table.rows)} rows to {out}")
    return text
