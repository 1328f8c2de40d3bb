import math
from typing import Callable, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from vexleb.core.errors import DomainError, ExponentRangeError

# Relative slack (in cells) used when snapping coordinates to cell boundaries
SNAP_EPS = 1e-9


class Grid1D(BaseModel):
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    n: int

    @field_validator('n')
    @classmethod
    def validate_n(cls, v):
        if v < 1:
            raise ValueError('Cell count must be at least 1')
        return v

    @model_validator(mode='after')
    def validate_bounds(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValueError('Grid requires finite lo < hi')
        return self

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.n

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def midpoints(self) -> np.ndarray:
        return self.lo + (np.arange(self.n) + 0.5) * self.h

    def edges(self) -> np.ndarray:
        return self.lo + np.arange(self.n + 1) * self.h

    def edge(self, k: int) -> float:
        return self.lo + k * self.h

    def cell_of(self, x: float) -> int:
        """Index of the cell containing x (right edge belongs to the last cell)."""
        if x < self.lo - SNAP_EPS * self.h or x > self.hi + SNAP_EPS * self.h:
            raise DomainError(f"Point {x} lies outside [{self.lo}, {self.hi}]")
        return min(max(int(math.floor((x - self.lo) / self.h)), 0), self.n - 1)

    def cell_range(self, a: float, b: float) -> Tuple[int, int]:
        """Smallest run of cells [i0, i1) covering [a, b]."""
        if a > b:
            raise DomainError(f"Empty interval [{a}, {b}]")
        slack = SNAP_EPS * self.h
        if a < self.lo - slack or b > self.hi + slack:
            raise DomainError(f"Interval [{a}, {b}] leaves the grid domain [{self.lo}, {self.hi}]")
        i0 = int(math.floor((a - self.lo) / self.h + SNAP_EPS))
        i1 = int(math.ceil((b - self.lo) / self.h - SNAP_EPS))
        i0 = min(max(i0, 0), self.n)
        i1 = min(max(i1, i0), self.n)
        return i0, i1


class Grid2D(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: Grid1D
    y: Grid1D

    @property
    def shape(self) -> Tuple[int, int]:
        # values are stored row-major with y outer
        return (self.y.n, self.x.n)

    @property
    def cell_measure(self) -> float:
        return self.x.h * self.y.h

    @classmethod
    def square(cls, lo: float, hi: float, n: int) -> "Grid2D":
        axis = Grid1D(lo=lo, hi=hi, n=n)
        return cls(x=axis, y=axis)


Grid = Union[Grid1D, Grid2D]


def grid_shape(grid: Grid) -> Tuple[int, ...]:
    return grid.shape if isinstance(grid, Grid2D) else (grid.n,)


def grid_cell_measure(grid: Grid) -> float:
    return grid.cell_measure if isinstance(grid, Grid2D) else grid.h


class Rectangle(BaseModel):
    """Axis-aligned region. On 1-D grids only the x extent is used."""

    model_config = ConfigDict(frozen=True)

    x0: float
    x1: float
    y0: float = 0.0
    y1: float = 1.0

    @model_validator(mode='after')
    def validate_extent(self):
        if not self.x0 < self.x1 or not self.y0 < self.y1:
            raise ValueError('Rectangle requires x0 < x1 and y0 < y1')
        return self

    @classmethod
    def interval(cls, a: float, b: float) -> "Rectangle":
        return cls(x0=a, x1=b)

    @classmethod
    def of_grid(cls, grid: Grid) -> "Rectangle":
        if isinstance(grid, Grid2D):
            return cls(x0=grid.x.lo, x1=grid.x.hi, y0=grid.y.lo, y1=grid.y.hi)
        return cls(x0=grid.lo, x1=grid.hi)

    def as_list(self, dim: int = 2) -> list:
        return [self.x0, self.x1, self.y0, self.y1] if dim == 2 else [self.x0, self.x1]

    def slices(self, grid: Grid) -> Tuple[slice, ...]:
        """Index slices of the snapped region, in array order."""
        if isinstance(grid, Grid2D):
            i0, i1 = grid.x.cell_range(self.x0, self.x1)
            j0, j1 = grid.y.cell_range(self.y0, self.y1)
            return (slice(j0, j1), slice(i0, i1))
        i0, i1 = grid.cell_range(self.x0, self.x1)
        return (slice(i0, i1),)


class GridFunction(BaseModel):
    """Cellwise-constant function: one midpoint sample per cell."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Union[Grid1D, Grid2D]
    values: np.ndarray

    @field_validator('values', mode='before')
    @classmethod
    def validate_values(cls, v):
        arr = np.array(v, dtype=float, copy=True)
        arr.flags.writeable = False
        return arr

    @model_validator(mode='after')
    def validate_shape(self):
        expected = grid_shape(self.grid)
        if self.values.shape != expected:
            raise DomainError(f"Expected {expected} cell values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Grid function values must be finite")
        return self

    @property
    def dim(self) -> int:
        return 2 if isinstance(self.grid, Grid2D) else 1

    @property
    def cell_measure(self) -> float:
        return grid_cell_measure(self.grid)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable) -> "GridFunction":
        """Sample fn at cell midpoints; 2-D callables receive (X, Y) mesh arrays."""
        if isinstance(grid, Grid2D):
            X, Y = np.meshgrid(grid.x.midpoints(), grid.y.midpoints())
            values = np.broadcast_to(np.asarray(fn(X, Y), dtype=float), grid.shape)
        else:
            values = np.broadcast_to(np.asarray(fn(grid.midpoints()), dtype=float), (grid.n,))
        return cls(grid=grid, values=values)

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid=grid, values=np.full(grid_shape(grid), float(c)))

    @classmethod
    def indicator(cls, grid: Grid, region: "Rectangle", c: float = 1.0) -> "GridFunction":
        values = np.zeros(grid_shape(grid))
        values[region.slices(grid)] = c
        return cls(grid=grid, values=values)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(grid=self.grid, values=values)

    def abs(self) -> "GridFunction":
        return self.with_values(np.abs(self.values))

    def _operand(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise DomainError("Grid functions live on different grids")
            return other.values
        return float(other)

    def __mul__(self, other) -> "GridFunction":
        return self.with_values(self.values * self._operand(other))

    __rmul__ = __mul__

    def __add__(self, other) -> "GridFunction":
        return self.with_values(self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other) -> "GridFunction":
        return self.with_values(self.values - self._operand(other))

    def power(self, exponent: float) -> "GridFunction":
        with np.errstate(divide='ignore'):
            return self.with_values(np.power(self.values, exponent))


class ExponentField(BaseModel):
    """
    A grid function read as an exponent.

    kind "exponent" is a Lebesgue exponent p(.) with 1 < p_- <= p_+ < inf;
    kind "order" is a fractional order alpha(.) with 0 <= alpha_- <= alpha_+ < 1.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: GridFunction
    pminus: float
    pplus: float
    kind: Literal['exponent', 'order'] = 'exponent'

    @model_validator(mode='before')
    @classmethod
    def fill_bounds(cls, data):
        if isinstance(data, dict) and isinstance(data.get('base'), GridFunction):
            values = data['base'].values
            data.setdefault('pminus', float(values.min()))
            data.setdefault('pplus', float(values.max()))
        return data

    @model_validator(mode='after')
    def validate_range(self):
        values = self.base.values
        if self.pminus != float(values.min()) or self.pplus != float(values.max()):
            raise ValueError('pminus/pplus must equal the extreme cell values')
        if self.kind == 'exponent':
            if not (self.pminus > 1.0 and self.pplus < math.inf):
                raise ExponentRangeError(f"Exponent values must satisfy 1 < p(x) < inf, got [{self.pminus}, {self.pplus}]")
        else:
            if not (self.pminus >= 0.0 and self.pplus < 1.0):
                raise ExponentRangeError(f"Order values must satisfy 0 <= alpha(x) < 1, got [{self.pminus}, {self.pplus}]")
        return self

    @classmethod
    def of(cls, base: GridFunction, kind: str = 'exponent') -> "ExponentField":
        return cls(base=base, kind=kind)

    @classmethod
    def constant(cls, grid: Grid, value: float, kind: str = 'exponent') -> "ExponentField":
        return cls(base=GridFunction.constant(grid, value), kind=kind)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable, kind: str = 'exponent') -> "ExponentField":
        return cls(base=GridFunction.from_callable(grid, fn), kind=kind)

    @property
    def grid(self) -> Grid:
        return self.base.grid

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def is_constant(self) -> bool:
        return self.pminus == self.pplus

    def value_at(self, point: Tuple[float, ...]) -> float:
        grid = self.grid
        if isinstance(grid, Grid2D):
            return float(self.values[grid.y.cell_of(point[1]), grid.x.cell_of(point[0])])
        return float(self.values[grid.cell_of(point[0])])


def as_exponent_field(p: Union[float, ExponentField], grid: Grid, kind: str = 'exponent') -> ExponentField:
    """Promote a constant to a field on `grid`; fields must already live there."""
    if isinstance(p, ExponentField):
        if p.grid != grid:
            raise DomainError("Exponent field and function live on different grids")
        return p
    return ExponentField.constant(grid, float(p), kind=kind)


def order_values(alpha: Union[float, ExponentField, None], axis: Grid1D, name: str = 'alpha') -> np.ndarray:
    """Per-cell fractional orders along one axis."""
    if alpha is None:
        return np.zeros(axis.n)
    if isinstance(alpha, ExponentField):
        if alpha.grid != axis:
            raise DomainError(f"{name} must be a 1-D field on the matching axis")
        if alpha.kind != 'order':
            raise ExponentRangeError(f"{name} must be an order field (0 <= {name} < 1)")
        return np.asarray(alpha.values)
    value = float(alpha)
    if not 0.0 <= value < 1.0:
        raise ExponentRangeError(f"{name} = {value} outside [0, 1)")
    return np.full(axis.n, value)
