"""
Deterministic JSON and CSV output.

Floats are written with 17 significant digits so that files round-trip
bit-exactly and reports are byte-identical across runs.
"""
import csv
import io
import json
import math
from typing import Any, Iterable, List, Sequence

import numpy as np
from pydantic import BaseModel


def format_float(value: float) -> str:
    """Format a float as a locale-independent decimal with 17 significant digits."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"Cannot serialize non-finite value {value!r}")
    text = format(value, ".17g")
    if text == "-0":
        text = "0"
    return text


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(obj, BaseModel):
        obj = obj.model_dump(mode="python")
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(key), ensure_ascii=False)}: {_encode(value, indent, level + 1)}"
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [f"{pad}{_encode(value, indent, level + 1)}" for value in obj]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"Object of type {type(obj).__name__} is not serializable")


def dumps_canonical(obj: Any, indent: int = 2) -> str:
    """
    Serialize to JSON with fixed float formatting and insertion key order.

    Args:
        obj: dicts, lists, scalars, numpy values or pydantic models
        indent: spaces per nesting level

    Returns:
        JSON text terminated by a newline
    """
    return _encode(obj, indent, 0) + "\n"


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows as comma-separated text with LF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([_csv_cell(cell) for cell in row])
    return buffer.getvalue()


def _csv_cell(cell: Any) -> str:
    if isinstance(cell, (bool, np.bool_)):
        return "true" if cell else "false"
    if isinstance(cell, (float, np.floating)):
        return format_float(cell)
    return str(cell)


def read_csv(text: str) -> List[List[str]]:
    """Parse CSV text written by write_csv."""
    return [row for row in csv.reader(io.StringIO(text))]
