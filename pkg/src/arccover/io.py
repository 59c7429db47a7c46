"""Deterministic CSV/JSON writers shared by the result types and the CLI."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from . import __version__

__all__ = ["fmt_float", "csv_text", "json_text", "metadata"]


def fmt_float(x) -> str:
    """17 significant digits, so every float survives a text round trip."""
    if x is None:
        return ""
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def metadata(config: dict | None = None) -> dict:
    meta = {"tool": "arccover", "version": __version__}
    if config:
        meta.update(config)
    return meta


def csv_text(header, rows, meta: dict | None = None) -> str:
    buf = io.StringIO()
    if meta is not None:
        buf.write("# " + json.dumps(meta, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_float(v) for v in row])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, np.generic):
        obj = obj.item()
    # strict JSON has no inf/nan
    if isinstance(obj, float) and not math.isfinite(obj):
        return fmt_float(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def json_text(payload: dict, meta: dict | None = None) -> str:
    doc = {"metadata": meta} if meta is not None else {}
    doc.update(payload)
    return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"
