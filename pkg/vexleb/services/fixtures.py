"""Named fixtures shared by the experiment drivers, the CLI and the sample-file script."""
from typing import Callable, Dict, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from vexleb.core.errors import UsageError
from vexleb.schemas.grid import ExponentField, Grid1D, Grid2D, GridFunction


class PowerWeightFixture(BaseModel):
    """Hardy-operator fixture v = x^v_power, w = x^w_power (measure weights) on [lo, hi]."""

    model_config = ConfigDict(frozen=True)

    name: str
    p: float
    q: float
    v_power: float
    w_power: float
    lo: float = 1.0
    hi: float = 100.0

    def build(self, n: int, scale: float = 1.0) -> Tuple[GridFunction, GridFunction]:
        """Weights on [lo, lo + scale (hi - lo)] with the cell width of the n-cell base grid."""
        cells = int(round(n * scale))
        grid = Grid1D(lo=self.lo, hi=self.lo + scale * (self.hi - self.lo), n=cells)
        v = GridFunction.from_callable(grid, lambda x: x ** self.v_power)
        w = GridFunction.from_callable(grid, lambda x: x ** self.w_power)
        return v, w


HARDY_FIXTURES: Dict[str, PowerWeightFixture] = {
    "inverse_square": PowerWeightFixture(name="inverse_square", p=2.0, q=2.0, v_power=-2.0, w_power=0.0),
    "cubic_tail": PowerWeightFixture(name="cubic_tail", p=2.0, q=4.0, v_power=-3.0, w_power=0.0),
    "weighted_source": PowerWeightFixture(name="weighted_source", p=3.0, q=3.0, v_power=-2.0, w_power=1.0),
    # starts near the singular end, where A_M approaches 1
    "inverse_square_origin": PowerWeightFixture(name="inverse_square_origin", p=2.0, q=2.0, v_power=-2.0, w_power=0.0, lo=0.01),
    # v = 1 has a non-integrable tail: A_M grows linearly with the truncation edge
    "fat_tail": PowerWeightFixture(name="fat_tail", p=2.0, q=2.0, v_power=0.0, w_power=0.0),
}


class TwoWeightData(BaseModel):
    """v on a 2-D grid with product weight w = w1(x) w2(y)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    v: GridFunction
    w1: GridFunction
    w2: GridFunction
    p: float
    q: Union[float, ExponentField]

    @property
    def grid(self) -> Grid2D:
        return self.v.grid

    def product_weight(self) -> GridFunction:
        return GridFunction(grid=self.grid, values=np.outer(self.w2.values, self.w1.values))


def unit_square_weights(n: int) -> TwoWeightData:
    grid = Grid2D.square(0.0, 1.0, n)
    return TwoWeightData(v=GridFunction.constant(grid, 1.0), w1=GridFunction.constant(grid.x, 1.0),
                         w2=GridFunction.constant(grid.y, 1.0), p=2.0, q=2.0)


def split_q_weights(n: int) -> TwoWeightData:
    """Unit weights with q = 2 below y = 1/2 and 3 above."""
    grid = Grid2D.square(0.0, 1.0, n)
    q = ExponentField.from_callable(grid, lambda X, Y: np.where(Y < 0.5, 2.0, 3.0))
    return TwoWeightData(v=GridFunction.constant(grid, 1.0), w1=GridFunction.constant(grid.x, 1.0),
                         w2=GridFunction.constant(grid.y, 1.0), p=2.0, q=q)


THEOREM31_FIXTURES: Dict[str, Callable[[int], TwoWeightData]] = {
    "unit": unit_square_weights,
    "split_q": split_q_weights,
}


def cor35_exponent(n: int) -> ExponentField:
    """3 on [1,2]^2 and 2 elsewhere on [0,2]^2."""
    grid = Grid2D.square(0.0, 2.0, n)
    return ExponentField.from_callable(grid, lambda X, Y: np.where((X >= 1.0) & (Y >= 1.0), 3.0, 2.0))


def cor35_weight(n: int) -> GridFunction:
    grid = Grid2D.square(0.0, 2.0, n)
    return GridFunction.from_callable(grid, lambda X, Y: 1.0 / (X * Y))


def two_valued_exponent(n: int, low: float, high: float, split: float = 0.5) -> ExponentField:
    """`low` below the line y = split, `high` above it, on [0,1]^2."""
    grid = Grid2D.square(0.0, 1.0, n)
    return ExponentField.from_callable(grid, lambda X, Y: np.where(Y < split, low, high))


def comparison_functions(n: int) -> Dict[str, GridFunction]:
    """Inputs for the shifted-lattice comparison on [0,1]^2."""
    grid = Grid2D.square(0.0, 1.0, n)
    aligned = GridFunction.from_callable(grid, lambda X, Y: ((X < 0.5) & (Y < 0.5)).astype(float))
    straddling = GridFunction.from_callable(
        grid, lambda X, Y: ((X > 0.375) & (X < 0.625) & (Y > 0.375) & (Y < 0.625)).astype(float))
    smooth = GridFunction.from_callable(grid, lambda X, Y: 1.0 + X * Y)
    return {"aligned_square": aligned, "straddling_square": straddling, "smooth": smooth}


def lookup(table: dict, name: str, what: str):
    if name not in table:
        raise UsageError(f"Unknown {what} '{name}'; valid names: {', '.join(sorted(table))}")
    return table[name]
