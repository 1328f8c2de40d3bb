from typing import Optional, Tuple

import numpy as np

from vexleb.core.errors import DomainError, ExponentRangeError
from vexleb.schemas.grid import ExponentField, Grid, Grid1D, Rectangle, GridFunction


def cell_range(axis: Grid1D, a: float, b: float) -> Tuple[int, int]:
    return axis.cell_range(a, b)


def region_slices(grid: Grid, region: Optional[Rectangle]) -> Tuple[slice, ...]:
    return (region or Rectangle.of_grid(grid)).slices(grid)


def prefix_sums(f: GridFunction) -> np.ndarray:
    """
    Zero-padded cumulative integrals.

    1-D: P[k] = integral over the first k cells.
    2-D: P[j, i] = integral over cells with row < j and column < i.
    """
    weighted = f.values * f.cell_measure
    if f.dim == 1:
        return np.concatenate(([0.0], np.cumsum(weighted)))
    P = np.zeros((weighted.shape[0] + 1, weighted.shape[1] + 1))
    P[1:, 1:] = np.cumsum(np.cumsum(weighted, axis=0), axis=1)
    return P


def suffix_sums_2d(values: np.ndarray) -> np.ndarray:
    """T[j, i] = sum of values[j:, i:], padded with a zero last row and column."""
    T = np.zeros((values.shape[0] + 1, values.shape[1] + 1))
    T[:-1, :-1] = np.cumsum(np.cumsum(values[::-1, ::-1], axis=0), axis=1)[::-1, ::-1]
    return T


def box_sum(P: np.ndarray, j0: int, j1: int, i0: int, i1: int) -> float:
    return float(P[j1, i1] - P[j0, i1] - P[j1, i0] + P[j0, i0])


def integrate(f: GridFunction, region: Optional[Rectangle] = None) -> float:
    """Midpoint-rule integral of f over the snapped region."""
    sl = region_slices(f.grid, region)
    return float(np.sum(f.values[sl])) * f.cell_measure


def conjugate_exponent(p: ExponentField) -> ExponentField:
    if p.kind != 'exponent' or p.pminus <= 1.0:
        raise ExponentRangeError(f"Conjugate exponent needs p(x) > 1, got p_- = {p.pminus}")
    values = p.values / (p.values - 1.0)
    return ExponentField.of(p.base.with_values(values))


def conjugate(p: float) -> float:
    if p <= 1.0:
        raise ExponentRangeError(f"Conjugate exponent needs p > 1, got {p}")
    return p / (p - 1.0)


def range_bounds(p: ExponentField, region: Optional[Rectangle] = None) -> Tuple[float, float]:
    """(min, max) of p over the cells meeting the region."""
    block = p.values[region_slices(p.grid, region)]
    if block.size == 0:
        raise DomainError("Region contains no cells")
    return float(block.min()), float(block.max())
