"""Deterministic JSON and CSV writers for CLI reports."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = f"{x:.17g}"
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def to_json(obj: Any, indent: int = 2) -> str:
    """Serialize with every real written to 17 significant digits."""
    out: list[str] = []

    def emit(o: Any, level: int) -> None:
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, (bool, np.bool_)):
            out.append("true" if o else "false")
        elif o is None:
            out.append("null")
        elif isinstance(o, (int, np.integer)):
            out.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            out.append(_fmt_float(float(o)))
        elif isinstance(o, (str, Fraction)):
            out.append(json.dumps(str(o)))
        elif isinstance(o, dict):
            if not o:
                out.append("{}")
                return
            out.append("{\n")
            for i, (k, v) in enumerate(o.items()):
                out.append(f"{pad}{json.dumps(str(k))}: ")
                emit(v, level + 1)
                out.append(",\n" if i < len(o) - 1 else "\n")
            out.append(end + "}")
        elif isinstance(o, (list, tuple, np.ndarray)):
            items = list(o)
            if not items:
                out.append("[]")
                return
            if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
                out.append("[")
                for i, v in enumerate(items):
                    emit(v, level + 1)
                    if i < len(items) - 1:
                        out.append(", ")
                out.append("]")
                return
            out.append("[\n")
            for i, v in enumerate(items):
                out.append(pad)
                emit(v, level + 1)
                out.append(",\n" if i < len(items) - 1 else "\n")
            out.append(end + "]")
        else:
            raise TypeError(f"cannot serialize {type(o).__name__}")

    emit(obj, 0)
    return "".join(out) + "\n"


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(float(v)) else f"{float(v):.17g}"
    return str(v)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()
