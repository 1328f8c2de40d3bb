import logging
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from vexleb.core.errors import DimensionError, DomainError, NonConvergenceError, ParameterError
from vexleb.core.quadrature import box_sum, prefix_sums
from vexleb.schemas.grid import ExponentField, Grid2D, GridFunction, as_exponent_field, order_values
from vexleb.services.families import Interval, RectFamily
from vexleb.services.norms import NormService

logger = logging.getLogger(__name__)

Order = Union[float, ExponentField, None]

COMPANION_VARIANTS = ('m1', 'm2', 'max', 'pbar', 'constant-q')


def _half_cumsum(values: np.ndarray, axis: int = -1) -> np.ndarray:
    # integral from the left edge up to each cell midpoint
    return np.cumsum(values, axis=axis) - 0.5 * values


def _check_fractional(av: np.ndarray, name: str):
    lo, hi = float(av.min()), float(av.max())
    if hi >= 1.0 or lo < 0.0 or (lo == 0.0 and hi > 0.0):
        raise ParameterError(f"{name} must satisfy 0 < {name}_- <= {name}_+ < 1 or vanish identically, got [{lo}, {hi}]")


def _require_dim(f: GridFunction, dim: int):
    if f.dim != dim:
        raise DimensionError(f"Operator expects a {dim}-D grid function, got {f.dim}-D")


class OperatorService:
    """Hardy-type integral operators and fractional maximal operators on grids."""

    def __init__(self, norms: Optional[NormService] = None):
        self.norms = norms or NormService()

    def hardy1(self, f: GridFunction) -> GridFunction:
        _require_dim(f, 1)
        return f.with_values(_half_cumsum(f.values) * f.grid.h)

    def hardy_average(self, f: GridFunction) -> GridFunction:
        _require_dim(f, 1)
        x = f.grid.midpoints()
        if np.any(x <= 0):
            raise DomainError("Hardy averages need a grid with positive midpoints")
        return f.with_values(self.hardy1(f).values / x)

    def hardy2(self, f: GridFunction) -> GridFunction:
        _require_dim(f, 2)
        grid = f.grid
        inner = _half_cumsum(f.values, axis=1) * grid.x.h
        return f.with_values(_half_cumsum(inner, axis=0) * grid.y.h)

    def double_average(self, f: GridFunction) -> GridFunction:
        _require_dim(f, 2)
        grid = f.grid
        x, y = grid.x.midpoints(), grid.y.midpoints()
        if np.any(x <= 0) or np.any(y <= 0):
            raise DomainError("Double averages need a grid with positive midpoints")
        return f.with_values(self.hardy2(f).values / np.outer(y, x))

    def fractional_maximal_1d(self, f: GridFunction, alpha: Order = 0.0, family: Optional[RectFamily] = None) -> GridFunction:
        _require_dim(f, 1)
        av = order_values(alpha, f.grid, 'alpha')
        _check_fractional(av, 'alpha')
        family = family or RectFamily.all_aligned()
        P = prefix_sums(f.abs())
        out = np.zeros(f.grid.n)
        for i0, i1, length in family.intervals(f.grid):
            s = P[i1] - P[i0]
            if s > 0:
                np.maximum(out[i0:i1], s * length ** (av[i0:i1] - 1.0), out=out[i0:i1])
        return f.with_values(out)

    def strong_fractional_maximal(self, f: GridFunction, alpha: Order = 0.0, beta: Order = 0.0, family: Optional[RectFamily] = None) -> GridFunction:
        """sup over family rectangles R = I x J containing the point of |I|^{alpha(x)-1} |J|^{beta(y)-1} int_R |f|."""
        _require_dim(f, 2)
        grid = f.grid
        av = order_values(alpha, grid.x, 'alpha')
        bv = order_values(beta, grid.y, 'beta')
        _check_fractional(av, 'alpha')
        _check_fractional(bv, 'beta')
        xs, ys = (family or RectFamily.all_aligned()).rectangles(grid)
        P = prefix_sums(f.abs())
        out = np.zeros(grid.shape)
        y_factors = [(j0, j1, ly ** (bv[j0:j1] - 1.0)) for j0, j1, ly in ys]
        for i0, i1, lx in xs:
            ax = lx ** (av[i0:i1] - 1.0)
            for j0, j1, by in y_factors:
                s = box_sum(P, j0, j1, i0, i1)
                if s > 0:
                    target = out[j0:j1, i0:i1]
                    np.maximum(target, s * np.outer(by, ax), out=target)
        return f.with_values(out)

    def rectangle_norms(self, v: GridFunction, q: Union[float, ExponentField], alpha: Order, beta: Order,
                        family: Optional[RectFamily] = None, closed_form: bool = True) -> Iterator[Tuple[Interval, Interval, float]]:
        """Yield (I, J, ||v |I|^alpha(.) |J|^beta(.)||_{q(.)(I x J)}) over the family."""
        _require_dim(v, 2)
        grid = v.grid
        q = as_exponent_field(q, grid)
        av = order_values(alpha, grid.x, 'alpha')
        bv = order_values(beta, grid.y, 'beta')
        xs, ys = (family or RectFamily.all_aligned()).rectangles(grid)
        vabs, qv, cell = np.abs(v.values), q.values, grid.cell_measure
        q0 = q.pminus if q.is_constant else None
        for I in xs:
            i0, i1, lx = I
            xa = lx ** av[i0:i1]
            for J in ys:
                j0, j1, ly = J
                block = vabs[j0:j1, i0:i1] * np.outer(ly ** bv[j0:j1], xa)
                if closed_form and q0 is not None:
                    norm = (float(np.sum(block ** q0)) * cell) ** (1.0 / q0)
                else:
                    try:
                        norm = self.norms.norm_of_samples(block, qv[j0:j1, i0:i1], cell).value
                    except NonConvergenceError as e:
                        raise e.with_rectangle([grid.x.edge(i0), grid.x.edge(i1), grid.y.edge(j0), grid.y.edge(j1)])
                yield I, J, norm

    def companion_maximal(self, v: GridFunction, p: Union[float, ExponentField], q: Union[float, ExponentField],
                          alpha: Order, beta: Order, variant: str = 'm1', family: Optional[RectFamily] = None,
                          closed_form: bool = True) -> GridFunction:
        """
        Weighted companions of the strong fractional maximal operator.

        m1 scales by |R|^{-1/p_-}, m2 by |R|^{-1/p_+}, max takes the larger,
        pbar picks p_- for |R| <= 1 and p_+ otherwise. constant-q is the upper
        form |I|^{alpha - 1/p_-} |J|^{beta - 1/p_-} (int_R v^{q(.)})^{1/q_+}
        for constant orders.
        """
        if variant not in COMPANION_VARIANTS:
            raise ParameterError(f"Unknown companion variant '{variant}'; expected one of {COMPANION_VARIANTS}")
        _require_dim(v, 2)
        grid: Grid2D = v.grid
        p = as_exponent_field(p, grid)
        q = as_exponent_field(q, grid)
        pm, pp = p.pminus, p.pplus
        out = np.zeros(grid.shape)

        if variant == 'constant-q':
            av = order_values(alpha, grid.x, 'alpha')
            bv = order_values(beta, grid.y, 'beta')
            if av.min() != av.max() or bv.min() != bv.max():
                raise ParameterError("The constant-q companion needs constant alpha and beta")
            a0, b0 = float(av[0]), float(bv[0])
            xs, ys = (family or RectFamily.all_aligned()).rectangles(grid)
            with np.errstate(divide='ignore'):
                P = prefix_sums(v.with_values(np.power(np.abs(v.values), q.values)))
            for i0, i1, lx in xs:
                for j0, j1, ly in ys:
                    mass = box_sum(P, j0, j1, i0, i1)
                    if mass > 0:
                        value = lx ** (a0 - 1.0 / pm) * ly ** (b0 - 1.0 / pm) * mass ** (1.0 / q.pplus)
                        target = out[j0:j1, i0:i1]
                        np.maximum(target, value, out=target)
            return v.with_values(out)

        for (i0, i1, lx), (j0, j1, ly), norm in self.rectangle_norms(v, q, alpha, beta, family, closed_form):
            area = lx * ly
            if variant == 'm1':
                value = area ** (-1.0 / pm) * norm
            elif variant == 'm2':
                value = area ** (-1.0 / pp) * norm
            elif variant == 'max':
                value = max(area ** (-1.0 / pm), area ** (-1.0 / pp)) * norm
            else:
                value = area ** (-1.0 / (pm if area <= 1.0 else pp)) * norm
            target = out[j0:j1, i0:i1]
            np.maximum(target, value, out=target)
        return v.with_values(out)
