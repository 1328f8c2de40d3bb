import csv
import io
import json
import math
from typing import Any, List, Sequence

import numpy as np
from pydantic import BaseModel

from vexleb.core.config import settings
from vexleb.schemas.reports import BlowupSeries, ComparisonReport, RatioReport, SandwichReport


def format_float(x: float, digits: int = None) -> str:
    digits = digits or settings.float_digits
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, f".{digits}g")


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return _plain(value.model_dump())
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def dumps(value: Any, indent: int = 2) -> str:
    """JSON text with every float at a fixed number of significant digits; key order is preserved."""
    return _emit(_plain(value), 0, indent) + "\n"


def _emit(value: Any, depth: int, indent: int) -> str:
    value = _plain(value)
    pad, inner = " " * (indent * depth), " " * (indent * (depth + 1))
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (int, str)):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_emit(v, depth + 1, indent)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_emit(v, depth + 1, indent) for v in value) + "]"
        items = [inner + _emit(v, depth + 1, indent) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def _table(header: Sequence[str], rows: List[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v).strip('"') if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def to_csv(report: Any) -> str:
    """Plot data: (tau, A_tau) series, (trial, ratio) tables, or flat key/value pairs."""
    if isinstance(report, BlowupSeries):
        return _table(["tau", "A_tau", "lower_bound"], list(zip(report.taus, report.values, report.lower_bounds)))
    if isinstance(report, SandwichReport):
        report = report.ratios
    if isinstance(report, RatioReport):
        labels = report.labels or [str(i) for i in range(len(report.ratios))]
        return _table(["trial", "ratio"], list(zip(labels, report.ratios)))
    if isinstance(report, ComparisonReport):
        return _table(["shift_samples", "constant"], list(zip(report.shift_samples, report.constants)))
    flat = _plain(report)
    if not isinstance(flat, dict):
        raise TypeError(f"No CSV layout for {type(report).__name__}")
    return _table(["key", "value"], [(k, v if isinstance(v, (int, float, str)) else json.dumps(_plain(v), sort_keys=True, default=str))
                                     for k, v in flat.items()])
