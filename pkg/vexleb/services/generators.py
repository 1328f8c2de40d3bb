"""
Versioned test-function generators.

Every generator is deterministic given its arguments; random families derive one
stream per trial from (seed, trial) so results do not depend on evaluation order.
Bump settings.generator_version whenever a family's output changes.
"""
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from vexleb.core.config import settings
from vexleb.core.errors import ParameterError
from vexleb.core.quadrature import conjugate
from vexleb.schemas.grid import Grid, Grid1D, Grid2D, GridFunction, grid_shape

Labeled = Tuple[str, GridFunction]

FAMILIES = ("random", "indicators", "power", "necessity")

DEFAULT_EPS = (0.02, 0.05, 0.1, 0.2)
DEFAULT_DELTAS = (1e-4, 1e-3, 1e-2)


def generator_version() -> str:
    return settings.generator_version


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def random_positive(grid: Grid, seed: int, trial: int) -> GridFunction:
    """Cellwise exp of standard normals."""
    return GridFunction(grid=grid, values=np.exp(trial_rng(seed, trial).standard_normal(grid_shape(grid))))


def random_family(grid: Grid, trials: int, seed: int) -> List[Labeled]:
    return [(f"random:{t}", random_positive(grid, seed, t)) for t in range(trials)]


def edge_indices(n: int, count: int) -> List[int]:
    return sorted({max(1, int(round(j * n / count))) for j in range(1, count + 1)})


def interval_indicators(grid: Grid1D, count: int = 16) -> List[Labeled]:
    """chi_[lo, x_k] at `count` evenly spaced right edges."""
    out = []
    for k in edge_indices(grid.n, count):
        values = np.zeros(grid.n)
        values[:k] = 1.0
        out.append((f"indicator:x={grid.edge(k):.6g}", GridFunction(grid=grid, values=values)))
    return out


def corner_indicators(grid: Grid2D, count: int = 4) -> List[Labeled]:
    """chi_[lo, a) x [lo, b) over a count x count set of corners."""
    out = []
    for j in edge_indices(grid.y.n, count):
        for i in edge_indices(grid.x.n, count):
            values = np.zeros(grid.shape)
            values[:j, :i] = 1.0
            out.append((f"indicator:a={grid.x.edge(i):.6g},b={grid.y.edge(j):.6g}", GridFunction(grid=grid, values=values)))
    return out


def power_bumps(grid: Grid1D, p: float, eps: Sequence[float] = DEFAULT_EPS, deltas: Sequence[float] = DEFAULT_DELTAS) -> List[Labeled]:
    """
    x^{-1/p + eps} chi_[delta, 1] near the origin, plus the same power on [delta, hi]
    when the grid reaches past 1.

    On grids starting at or beyond 1 the support is the whole grid and both signs of
    eps are used, since there is no singular end to approach.
    """
    x = grid.midpoints()
    out = []
    if grid.lo < 1.0:
        if np.any(x <= 0):
            raise ParameterError("Power bumps need positive midpoints")
        for e in eps:
            for d in deltas:
                start = x >= max(d, grid.lo)
                support = start & (x <= 1.0)
                if not np.any(support):
                    continue
                out.append((f"power:eps={e:g},delta={d:g}", GridFunction(grid=grid, values=np.where(support, x ** (-1.0 / p + e), 0.0))))
                if grid.hi > 1.0:
                    out.append((f"power:eps={e:g},delta={d:g},tail", GridFunction(grid=grid, values=np.where(start, x ** (-1.0 / p + e), 0.0))))
    else:
        for e in eps:
            for sign in (1.0, -1.0):
                values = x ** (-1.0 / p + sign * e)
                out.append((f"power:eps={sign * e:g}", GridFunction(grid=grid, values=values)))
    return out


def necessity_1d(w: GridFunction, p: float, count: int = 16, extra_edges: Iterable[int] = ()) -> List[Labeled]:
    """w^{1-p'} chi_[lo, x_k], the test functions behind the Muckenhoupt lower bound."""
    grid: Grid1D = w.grid
    with np.errstate(divide='ignore'):
        sigma = np.power(w.values, 1.0 - conjugate(p))
    if not np.all(np.isfinite(sigma)):
        return []
    out = []
    for k in sorted(set(edge_indices(grid.n, count)) | {k for k in extra_edges if 0 < k <= grid.n}):
        values = np.zeros(grid.n)
        values[:k] = sigma[:k]
        out.append((f"necessity:x={grid.edge(k):.6g}", GridFunction(grid=grid, values=values)))
    return out


def necessity_2d(w1: GridFunction, w2: GridFunction, p: float, i: int, j: int) -> GridFunction:
    """w^{-p'} chi_{[lo, a) x [lo, b)} with a, b the i-th and j-th edges."""
    pp = conjugate(p)
    sigma = np.outer(w2.values ** -pp, w1.values ** -pp)
    values = np.zeros_like(sigma)
    values[:j, :i] = sigma[:j, :i]
    return GridFunction(grid=Grid2D(x=w1.grid, y=w2.grid), values=values)
