"""Deterministic report serialization for the command-line tools.

JSON is emitted with a fixed layout: dict insertion order, floats at 17
significant digits (round-trip exact for doubles), non-finite numbers as
null. Identical report objects therefore serialize to identical bytes,
which the golden-file tests rely on.
"""
from __future__ import annotations

import json
import math
from typing import Any, Sequence


def format_number(value: float) -> str:
    """17-significant-digit decimal form; integral floats keep a '.0'."""
    text = format(float(value), ".17g")
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def _encode(obj: Any, pieces: list[str]) -> None:
    if obj is None:
        pieces.append("null")
    elif obj is True:
        pieces.append("true")
    elif obj is False:
        pieces.append("false")
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj))
    elif isinstance(obj, int):
        pieces.append(str(obj))
    elif isinstance(obj, float):
        pieces.append(format_number(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, dict):
        pieces.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                pieces.append(", ")
            pieces.append(json.dumps(str(key)))
            pieces.append(": ")
            _encode(value, pieces)
        pieces.append("}")
    elif isinstance(obj, (list, tuple)):
        pieces.append("[")
        for i, value in enumerate(obj):
            if i:
                pieces.append(", ")
            _encode(value, pieces)
        pieces.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def dumps(obj: Any) -> str:
    """Serialize a report structure to deterministic JSON (trailing newline)."""
    pieces: list[str] = []
    _encode(obj, pieces)
    pieces.append("\n")
    return "".join(pieces)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_number(value) if math.isfinite(value) else ""
    return str(value)


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    """CSV with a header row; numeric cells formatted exactly as in JSON."""
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            text = _cell(row.get(col))
            if any(ch in text for ch in ",\"\n"):
                text = '"' + text.replace('"', '""') + '"'
            cells.append(text)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
