"""
Grid-function files.

Line 1 is a JSON header {"dim": 2, "x": [lo, hi, n], "y": [lo, hi, n]} (1-D omits "y"),
optionally with "kind": "exponent" or "kind": "order". The remaining text holds the
cell values, whitespace separated, row-major with y outer.
"""
import json
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from vexleb.core.errors import DomainError, UsageError
from vexleb.schemas.dyadic import DyadicTree
from vexleb.schemas.grid import ExponentField, Grid1D, Grid2D, GridFunction, grid_shape

KINDS = ("function", "exponent", "order")


def _axis(spec, name: str) -> Grid1D:
    if not isinstance(spec, list) or len(spec) != 3:
        raise DomainError(f"Header field '{name}' must be [lo, hi, n]")
    return Grid1D(lo=float(spec[0]), hi=float(spec[1]), n=int(spec[2]))


def parse_header(line: str) -> dict:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as e:
        raise DomainError(f"Malformed grid-function header: {e}")
    if not isinstance(header, dict) or header.get("dim") not in (1, 2):
        raise DomainError("Header must be a JSON object with dim 1 or 2")
    kind = header.get("kind", "function")
    if kind not in KINDS:
        raise DomainError(f"Unknown kind '{kind}'; expected one of {KINDS}")
    return header


def read_grid_function(path: Union[str, Path]) -> Union[GridFunction, ExponentField]:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"Input file not found: {path}")
    text = path.read_text()
    first, _, body = text.partition("\n")
    header = parse_header(first)
    try:
        x = _axis(header.get("x"), "x")
        grid = Grid2D(x=x, y=_axis(header.get("y"), "y")) if header["dim"] == 2 else x
    except ValidationError as e:
        raise DomainError(f"Invalid grid in header: {e.errors()[0]['msg']}")
    try:
        values = np.array(body.split(), dtype=float)
    except ValueError as e:
        raise DomainError(f"Non-numeric cell value in {path}: {e}")
    shape = grid_shape(grid)
    if values.size != int(np.prod(shape)):
        raise DomainError(f"{path} holds {values.size} values, grid needs {int(np.prod(shape))}")
    base = GridFunction(grid=grid, values=values.reshape(shape))
    kind = header.get("kind", "function")
    return base if kind == "function" else ExponentField.of(base, kind=kind)


def format_header(data: Union[GridFunction, ExponentField]) -> str:
    base = data.base if isinstance(data, ExponentField) else data
    grid = base.grid
    if isinstance(grid, Grid2D):
        header = {"dim": 2, "x": [grid.x.lo, grid.x.hi, grid.x.n], "y": [grid.y.lo, grid.y.hi, grid.y.n]}
    else:
        header = {"dim": 1, "x": [grid.lo, grid.hi, grid.n]}
    if isinstance(data, ExponentField):
        header["kind"] = data.kind
    return json.dumps(header)


def dumps_grid_function(data: Union[GridFunction, ExponentField]) -> str:
    base = data.base if isinstance(data, ExponentField) else data
    rows = np.atleast_2d(base.values)
    lines = [format_header(data)]
    lines += [" ".join(format(float(v), ".17g") for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_grid_function(data: Union[GridFunction, ExponentField], path: Union[str, Path]):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_grid_function(data))


def read_tree(path: Union[str, Path]) -> DyadicTree:
    """Tree file: {"root": [lo, hi], "depth": d, "coefficients": [level-order values]}."""
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"Tree file not found: {path}")
    try:
        data = json.loads(path.read_text())
        lo, hi = (float(x) for x in data["root"])
        return DyadicTree(lo=lo, length=hi - lo, depth=int(data["depth"]), coefficients=data["coefficients"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise DomainError(f"Malformed tree file {path}: {e}")
