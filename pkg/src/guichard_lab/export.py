"""Writers for the CSV, JSON and gnuplot outputs.

Floats are written with 17 significant digits in every format.
"""
from __future__ import annotations

import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    return f"{float(value):.17g}"


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower()
    if isinstance(value, (int, str)):
        return str(value)
    return format_float(value)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def gnuplot_text(columns: Sequence[str], rows: Iterable[Sequence[Any]], header: Optional[dict] = None) -> str:
    """Whitespace-separated table with ``#`` comment lines (header entries, then column names)."""
    buf = io.StringIO()
    for key, value in (header or {}).items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    buf.write("# " + " ".join(columns) + "\n")
    for row in rows:
        buf.write(" ".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _json_float(value: float) -> str:
    if not math.isfinite(value):
        return json.dumps(value)
    text = format_float(value)
    # keep floats distinguishable from ints on read-back
    return text if any(ch in text for ch in ".en") else text + ".0"


def _json_value(value: Any, level: int) -> str:
    pad, end = "  " * (level + 1), "  " * level
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(value[k], level + 1)}" for k in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        return "[\n" + ",\n".join(pad + _json_value(v, level + 1) for v in value) + "\n" + end + "]"
    if isinstance(value, float):
        return _json_float(value)
    return json.dumps(value)


def json_text(data: Any) -> str:
    """Indented JSON with sorted keys; floats carry 17 significant digits like the tables."""
    return _json_value(data, 0) + "\n"


def write_text(text: str, out: Optional[Path]) -> None:
    """Write to ``out``, or to stdout when no path is given."""
    if out is None:
        print(text, end="")
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8", newline="\n")
    logger.info(f"Wrote {out}")
