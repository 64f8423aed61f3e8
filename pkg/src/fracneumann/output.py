"""Deterministic text artifacts: JSON with fixed float format, CSV, gnuplot."""
from __future__ import annotations

import json
import math
import os


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return _encode(obj.tolist(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    """JSON text with insertion key order and floats at 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def write_text(path: str, text: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def csv_table(header, columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(v if isinstance(v, str) else format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"


def gnuplot_script(csv_name: str, xcol: int, ycols: list, title: str, logy: bool = False) -> str:
    lines = ["set datafile separator ','", "set key autotitle columnhead",
             f"set title '{title}'"]
    if logy:
        lines.append("set logscale y")
    plots = [f"'{csv_name}' using {xcol}:{c} with linespoints" for c in ycols]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"
