import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from vexleb.core.config import settings
from vexleb.core.errors import DimensionError, DomainError, InfiniteMassError, ParameterError, RangeError
from vexleb.core.quadrature import conjugate, conjugate_exponent, range_bounds, suffix_sums_2d
from vexleb.schemas.grid import (
    ExponentField, Grid, Grid1D, Grid2D, GridFunction, Rectangle, as_exponent_field, order_values,
)
from vexleb.schemas.reports import ConditionReport, PartitionSequence
from vexleb.services.families import RectFamily
from vexleb.services.norms import NormService
from vexleb.services.operators import OperatorService
from vexleb.utils.logging import log_condition, log_numeric_warning

logger = logging.getLogger(__name__)

Exponent = Union[float, ExponentField]
Order = Union[float, ExponentField]

# Above this many distinct exponents in a scan box, tail norms fall back to per-corner bisection
MAX_MOMENT_TERMS = 16

# Cumulative-mass slope (in log-log units) treated as a non-integrable left-edge singularity
SINGULAR_SLOPE = 0.95


def _tail_1d(values: np.ndarray, h: float) -> np.ndarray:
    """T[k] = sum_{i >= k} values[i] * h, k = 0..m."""
    return np.concatenate((np.cumsum(values[::-1])[::-1], [0.0])) * h


def _head_1d(values: np.ndarray, h: float) -> np.ndarray:
    """P[k] = sum_{i < k} values[i] * h, k = 0..m."""
    return np.concatenate(([0.0], np.cumsum(values))) * h


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # 0 * inf counts as 0: an empty factor makes the term vacuous
    with np.errstate(invalid='ignore'):
        out = a * b
    out[(a == 0) | (b == 0)] = 0.0
    return out


def _growth(base: float, refined: float) -> float:
    if base == refined:
        return 0.0
    if base == 0 or not math.isfinite(refined) or not math.isfinite(base):
        return math.inf
    return refined / base - 1.0


def _check_exponent_pair(p: float, q: float):
    if not 1.0 < p:
        raise ParameterError(f"Exponent p = {p} must exceed 1")
    if p > q:
        raise ParameterError(f"p = {p} exceeds q = {q}; need 1 < p <= q < inf")
    if not math.isfinite(q):
        raise ParameterError("q must be finite")


def _check_nonnegative(f: GridFunction, name: str):
    if np.any(f.values < 0):
        raise ParameterError(f"Weight {name} must be non-negative")


def _check_positive(f: GridFunction, name: str):
    if np.any(f.values <= 0):
        raise DomainError(f"Weight {name} must be positive")


def _require_dim(f: GridFunction, dim: int, name: str):
    if f.dim != dim:
        raise DimensionError(f"{name} must be a {dim}-D grid function")


def _check_window(lo: float, hi: float, lower: float, upper: float, name: str, strict_lower: bool = True):
    """lower < lo <= hi < upper, naming the violated side."""
    if (lo <= lower) if strict_lower else (lo < lower):
        raise ParameterError(f"Window violated: need {name}_- {'>' if strict_lower else '>='} {lower:.6g}, got {lo:.6g}")
    if hi >= upper:
        raise ParameterError(f"Window violated: need {name}_+ < {upper:.6g}, got {hi:.6g}")


class ConditionService:
    """Supremum-type weight conditions and exponent-class tests, each returning a ConditionReport."""

    def __init__(self, norms: Optional[NormService] = None, operators: Optional[OperatorService] = None,
                 finite_growth: Optional[float] = None, nonfinite_growth: Optional[float] = None,
                 refine_factor: Optional[int] = None):
        self.norms = norms or NormService()
        self.operators = operators or OperatorService(self.norms)
        self.finite_growth = settings.finite_growth if finite_growth is None else finite_growth
        self.nonfinite_growth = settings.nonfinite_growth if nonfinite_growth is None else nonfinite_growth
        self.refine_factor = refine_factor or settings.refine_factor

    # ------------------------------------------------------------------ helpers

    def _report(self, name: str, value: float, arg: dict, grid: Grid, box: Optional[Rectangle], details: Optional[dict] = None,
                finite: Optional[bool] = None) -> ConditionReport:
        is_2d = isinstance(grid, Grid2D)
        report = ConditionReport(
            name=name,
            value=float(value),
            arg=arg,
            resolution=[grid.x.n, grid.y.n] if is_2d else [grid.n],
            truncation=(box or Rectangle.of_grid(grid)).as_list(2 if is_2d else 1),
            finite=finite,
            details=details or {},
        )
        log_condition(report, level="DEBUG")
        return report

    def _rect_arg(self, grid: Grid2D, I, J) -> dict:
        return {"rectangle": [grid.x.edge(I[0]), grid.x.edge(I[1]), grid.y.edge(J[0]), grid.y.edge(J[1])],
                "lengths": [I[2], J[2]]}

    def _tail_norms(self, values: np.ndarray, exponents: np.ndarray, cell: float) -> np.ndarray:
        """T[j, i] = ||v||_{q(.)} over cells [j:, i:] of the block, padded with zeros."""
        a = np.abs(values)
        uniq = np.unique(exponents)
        if uniq.size == 1:
            e = float(uniq[0])
            return (suffix_sums_2d(a ** e) * cell) ** (1.0 / e)

        ny, nx = a.shape
        T = np.zeros((ny + 1, nx + 1))
        if uniq.size <= MAX_MOMENT_TERMS:
            moments = np.stack([suffix_sums_2d(np.where(exponents == e, a ** e, 0.0)) * cell for e in uniq])
            for j in range(ny):
                for i in range(nx):
                    T[j, i] = self.norms.norm_from_moments(moments[:, j, i], uniq).value
            return T

        logger.debug(f"{uniq.size} distinct exponents; tail norms use per-corner bisection")
        for j in range(ny):
            for i in range(nx):
                T[j, i] = self.norms.norm_of_samples(a[j:, i:], exponents[j:, i:], cell).value
        return T

    def _indicator_norm(self, field: np.ndarray, constant: Optional[float], I, J, cell: float, cache: Dict) -> float:
        count = (I[1] - I[0]) * (J[1] - J[0])
        if constant is not None:
            return (count * cell) ** (1.0 / constant)
        uniq, counts = np.unique(field[J[0]:J[1], I[0]:I[1]], return_counts=True)
        key = (uniq.tobytes(), counts.tobytes())
        if key not in cache:
            if uniq.size == 1:
                cache[key] = (count * cell) ** (1.0 / float(uniq[0]))
            else:
                cache[key] = self.norms.norm_from_moments(counts * cell, uniq).value
        return cache[key]

    # ------------------------------------------------------------------ Hardy (1-D)

    def muckenhoupt_am(self, v: GridFunction, w: GridFunction, p: float, q: float, box: Optional[Rectangle] = None) -> ConditionReport:
        """sup_x (int_x^X v)^{1/q} (int_0^x w^{1-p'})^{1/p'} over grid edges in the box."""
        _check_exponent_pair(p, q)
        _require_dim(v, 1, "v")
        if w.grid != v.grid:
            raise DomainError("v and w live on different grids")
        _check_nonnegative(v, "v")
        _check_nonnegative(w, "w")
        grid: Grid1D = v.grid
        pp = conjugate(p)
        (sl,) = (box or Rectangle.of_grid(grid)).slices(grid)
        vv, ww = v.values[sl], w.values[sl]
        with np.errstate(divide='ignore'):
            sigma = np.power(ww, 1.0 - pp)
        V = _tail_1d(vv, grid.h)
        W = _head_1d(sigma, grid.h)
        terms = _product(V ** (1.0 / q), W ** (1.0 / pp))
        k = int(np.argmax(terms))
        return self._report("A_M", terms[k], {"x": grid.edge(sl.start + k)}, grid, box,
                            {"p": p, "q": q, "tail": float(V[k]), "head": float(W[k])})

    def persson_stepanov_aps(self, v: GridFunction, w: GridFunction, p: float, q: float, box: Optional[Rectangle] = None) -> ConditionReport:
        """sup_x W(x)^{-1/p} (int_0^x v W^q)^{1/q}, W(x) = int_0^x w^{1-p'}."""
        _check_exponent_pair(p, q)
        _require_dim(v, 1, "v")
        if w.grid != v.grid:
            raise DomainError("v and w live on different grids")
        _check_nonnegative(v, "v")
        _check_nonnegative(w, "w")
        grid: Grid1D = v.grid
        pp = conjugate(p)
        (sl,) = (box or Rectangle.of_grid(grid)).slices(grid)
        vv, ww = v.values[sl], w.values[sl]
        with np.errstate(divide='ignore'):
            sigma = np.power(ww, 1.0 - pp)
        W = _head_1d(sigma, grid.h)
        W_mid = W[:-1] + 0.5 * sigma * grid.h
        inner = _head_1d(_product(vv, W_mid ** q), grid.h)
        terms = np.zeros_like(W)
        # W = 0 points are vacuous
        live = (W > 0) & np.isfinite(W)
        terms[live] = W[live] ** (-1.0 / p) * inner[live] ** (1.0 / q)
        k = int(np.argmax(terms))
        return self._report("A_PS", terms[k], {"x": grid.edge(sl.start + k)}, grid, box, {"p": p, "q": q})

    # ------------------------------------------------------------------ Hardy (2-D)

    def muckenhoupt_a1(self, V: GridFunction, W: GridFunction, p: float, q: float, box: Optional[Rectangle] = None) -> ConditionReport:
        """sup_{a,b} (int_{[a,X]x[b,Y]} V)^{1/q} (int_{[0,a]x[0,b]} W^{1-p'})^{1/p'} for measure weights V, W."""
        _check_exponent_pair(p, q)
        _require_dim(V, 2, "V")
        if W.grid != V.grid:
            raise DomainError("V and W live on different grids")
        _check_nonnegative(V, "V")
        _check_nonnegative(W, "W")
        grid: Grid2D = V.grid
        pp = conjugate(p)
        sy, sx = (box or Rectangle.of_grid(grid)).slices(grid)
        cell = grid.cell_measure
        with np.errstate(divide='ignore'):
            sigma = np.power(W.values[sy, sx], 1.0 - pp)
        tail = suffix_sums_2d(V.values[sy, sx]) * cell
        head = np.zeros_like(tail)
        head[1:, 1:] = np.cumsum(np.cumsum(sigma, axis=0), axis=1) * cell
        terms = _product(tail ** (1.0 / q), head ** (1.0 / pp))
        j, i = np.unravel_index(int(np.argmax(terms)), terms.shape)
        return self._report("A_1", terms[j, i], {"a": grid.x.edge(sx.start + i), "b": grid.y.edge(sy.start + j)}, grid, box,
                            {"p": p, "q": q})

    def condition_b(self, v: GridFunction, w1: GridFunction, w2: GridFunction, p: Exponent, q: Exponent,
                    box: Optional[Rectangle] = None, bounded: bool = False) -> ConditionReport:
        """
        sup_{a,b} ||v chi_[a,X]x[b,Y]||_{q(.)} ||w^{-1} chi_[0,a)x[0,b)||_{p'} for w = w1(x) w2(y).

        A variable p enters through p_-. With bounded=True the
        tail rectangle stops at the box corner (a0, b0) rather than a truncation edge;
        the computation is identical, only the report name differs.
        """
        _require_dim(v, 2, "v")
        grid: Grid2D = v.grid
        q = as_exponent_field(q, grid)
        pe = p.pminus if isinstance(p, ExponentField) else float(p)
        if not 1.0 < pe <= q.pminus:
            raise ParameterError(f"Exponent ordering violated: need 1 < p <= q_- (p = {pe}, q_- = {q.pminus})")
        if w1.dim != 1 or w1.grid != grid.x or w2.dim != 1 or w2.grid != grid.y:
            raise DomainError("w1 and w2 must be 1-D weights on the x and y axes of v's grid")
        _check_positive(w1, "w1")
        _check_positive(w2, "w2")
        _check_nonnegative(v, "v")
        pp = conjugate(pe)
        sy, sx = (box or Rectangle.of_grid(grid)).slices(grid)
        S1 = _head_1d(w1.values[sx] ** -pp, grid.x.h)
        S2 = _head_1d(w2.values[sy] ** -pp, grid.y.h)
        second = np.outer(S2, S1) ** (1.0 / pp)
        first = self._tail_norms(v.values[sy, sx], q.values[sy, sx], grid.cell_measure)
        terms = _product(first, second)
        j, i = np.unravel_index(int(np.argmax(terms)), terms.shape)
        name = "B_bounded" if bounded else ("B_variable_p" if isinstance(p, ExponentField) else "B")
        return self._report(name, terms[j, i], {"a": grid.x.edge(sx.start + i), "b": grid.y.edge(sy.start + j)}, grid, box,
                            {"p": pe, "tail_norm": float(first[j, i]), "weight_norm": float(second[j, i])})

    def trace_condition_31(self, v: GridFunction, p: Exponent, q: Exponent, box: Optional[Rectangle] = None,
                           anchor: Optional[Tuple[float, float]] = None) -> ConditionReport:
        """condition_b with unit weights; a variable p is read at `anchor` (default: the lower-left corner)."""
        _require_dim(v, 2, "v")
        grid: Grid2D = v.grid
        if isinstance(p, ExponentField):
            if p.grid != grid:
                raise DomainError("p must live on v's grid")
            anchor = anchor or (grid.x.lo, grid.y.lo)
            pe = p.value_at(anchor)
        else:
            pe = float(p)
        ones_x = GridFunction.constant(grid.x, 1.0)
        ones_y = GridFunction.constant(grid.y, 1.0)
        report = self.condition_b(v, ones_x, ones_y, pe, q, box)
        details = dict(report.details, anchor=list(anchor) if anchor else None)
        return report.model_copy(update={"name": "trace_unit_weight", "details": details})

    # ------------------------------------------------------------------ rectangle families (2-D)

    def rectangle_condition_ar(self, p: ExponentField, q: Optional[ExponentField], alpha: float,
                               family: Optional[RectFamily] = None) -> ConditionReport:
        """sup_R |R|^{alpha-1} ||chi_R||_{q(.)} ||chi_R||_{p'(.)}."""
        if p.dim != 2:
            raise DimensionError("p must be a 2-D exponent field")
        grid: Grid2D = p.grid
        if not 0.0 <= alpha < 1.0 or alpha * p.pplus >= 1.0:
            raise ParameterError(f"alpha * p_+ = {alpha * p.pplus} must be < 1 for q = p / (1 - alpha p) to exist")
        expected = p.values / (1.0 - alpha * p.values)
        if q is None:
            q = ExponentField.of(p.base.with_values(expected))
        else:
            if q.grid != grid:
                raise DomainError("p and q live on different grids")
            mismatch = float(np.max(np.abs(q.values - expected)))
            if mismatch > 1e-9:
                log_numeric_warning("exponent_inconsistency", {"max_deviation": mismatch, "alpha": alpha})
        pprime = conjugate_exponent(p)
        cell = grid.cell_measure
        q_const = q.pminus if q.is_constant else None
        pp_const = pprime.pminus if pprime.is_constant else None
        q_cache, pp_cache = {}, {}

        xs, ys = (family or RectFamily.all_aligned()).rectangles(grid)
        best, best_arg = -1.0, None
        for I in xs:
            for J in ys:
                area = I[2] * J[2]
                value = (area ** (alpha - 1.0)
                         * self._indicator_norm(q.values, q_const, I, J, cell, q_cache)
                         * self._indicator_norm(pprime.values, pp_const, I, J, cell, pp_cache))
                if value > best:
                    best, best_arg = value, (I, J)
        if best_arg is None:
            raise ParameterError("Rectangle family is empty on this grid")
        return self._report("A_R", best, self._rect_arg(grid, *best_arg), grid, None,
                            {"alpha": alpha, "family": (family or RectFamily.all_aligned()).mode})

    def _scan_rectangles(self, v: GridFunction, q: ExponentField, alpha: Order, beta: Order, family: Optional[RectFamily],
                         factor: Callable[[tuple, tuple, float], float], closed_form: bool = True):
        grid: Grid2D = v.grid
        best, best_arg = -1.0, None
        for I, J, norm in self.operators.rectangle_norms(v, q, alpha, beta, family, closed_form):
            value = factor(I, J, norm)
            if value > best:
                best, best_arg = value, (I, J)
        if best_arg is None:
            raise ParameterError("Rectangle family is empty on this grid")
        return best, self._rect_arg(grid, *best_arg)

    def _orders(self, grid: Grid2D, alpha: Order, beta: Order) -> Tuple[np.ndarray, np.ndarray]:
        return order_values(alpha, grid.x, 'alpha'), order_values(beta, grid.y, 'beta')

    def trace_condition_42(self, v: GridFunction, p: float, q: Exponent, alpha: Order, beta: Order,
                           family: Optional[RectFamily] = None, closed_form: bool = True) -> ConditionReport:
        """sup_{I,J} || |I|^{alpha(.)} |J|^{beta(.)} v ||_{q(.)(I x J)} |I x J|^{-1/p}."""
        _require_dim(v, 2, "v")
        grid: Grid2D = v.grid
        q = as_exponent_field(q, grid)
        p = float(p)
        if not (1.0 < p < q.pminus and q.pplus < math.inf):
            raise ParameterError(f"Window violated: need 1 < p < q_- (p = {p}, q_- = {q.pminus})")
        av, bv = self._orders(grid, alpha, beta)
        _check_window(float(av.min()), float(av.max()), 1.0 / p - 1.0 / q.pplus, 1.0 / p, "alpha")
        _check_window(float(bv.min()), float(bv.max()), 1.0 / p - 1.0 / q.pplus, 1.0 / p, "beta")
        _check_nonnegative(v, "v")
        value, arg = self._unchecked_trace(v, p, q, av, bv, family, closed_form)
        return self._report("trace_rectangle", value, arg, grid, family.base if family else None, {"p": p})

    def _unchecked_trace(self, v, p: float, q: ExponentField, av, bv, family, closed_form=True):
        grid: Grid2D = v.grid
        av_f = ExponentField.of(GridFunction(grid=grid.x, values=av), kind='order')
        bv_f = ExponentField.of(GridFunction(grid=grid.y, values=bv), kind='order')
        return self._scan_rectangles(v, q, av_f, bv_f, family, lambda I, J, norm: norm * (I[2] * J[2]) ** (-1.0 / p), closed_form)

    def theorem_d_b5(self, v: GridFunction, p: float, q: float, alpha: float, beta: float,
                     family: Optional[RectFamily] = None) -> ConditionReport:
        """sup_{I,J} (int_{I x J} v) |I|^{q(alpha - 1/p)} |J|^{q(beta - 1/p)} for constant data."""
        _require_dim(v, 2, "v")
        grid: Grid2D = v.grid
        p, q = float(p), float(q)
        if not 1.0 < p < q < math.inf:
            raise ParameterError(f"Window violated: need 1 < p < q (p = {p}, q = {q})")
        for name, order in (("alpha", alpha), ("beta", beta)):
            if not 0.0 < order < 1.0 / p:
                raise ParameterError(f"Window violated: need 0 < {name} < 1/p, got {order}")
        _check_nonnegative(v, "v")
        root = v.with_values(v.values ** (1.0 / q))
        av, bv = np.full(grid.x.n, float(alpha)), np.full(grid.y.n, float(beta))
        value, arg = self._unchecked_trace(root, p, as_exponent_field(q, grid), av, bv, family)
        return self._report("B_5", value ** q, arg, grid, family.base if family else None,
                            {"p": p, "q": q, "alpha": alpha, "beta": beta})

    def trace_condition_variable(self, v: GridFunction, p: ExponentField, q: Exponent, alpha: Order, beta: Order,
                                 family: Optional[RectFamily] = None, rule: str = 'pbar') -> ConditionReport:
        """
        Variable-p trace conditions.

        rule "pbar":  || |I|^alpha |J|^beta v ||_{q(.)(I x J)} |I x J|^{-1/pbar}, pbar by the area rule
        rule "local": the same with |R|^{-1/p_-(R)}, R inside the family's base rectangle
        """
        if rule not in ('pbar', 'local'):
            raise ParameterError(f"Unknown rule '{rule}'; expected 'pbar' or 'local'")
        _require_dim(v, 2, "v")
        grid: Grid2D = v.grid
        q = as_exponent_field(q, grid)
        if p.grid != grid:
            raise DomainError("p must live on v's grid")
        region = family.base if (family and family.base) else None
        pm, pplus = range_bounds(p, region)
        qm, qp = range_bounds(q, region)
        if not (1.0 < pm <= pplus < qm):
            raise ParameterError(f"Window violated: need 1 < p_- <= p_+ < q_- (p in [{pm}, {pplus}], q_- = {qm})")
        av, bv = self._orders(grid, alpha, beta)
        _check_window(float(av.min()), float(av.max()), 1.0 / pm - 1.0 / qp, 1.0 / pm, "alpha")
        _check_window(float(bv.min()), float(bv.max()), 1.0 / pm - 1.0 / qp, 1.0 / pm, "beta")
        _check_nonnegative(v, "v")
        pv = p.values

        def factor(I, J, norm):
            area = I[2] * J[2]
            if rule == 'pbar':
                exponent = self.pbar_selector(I[2], J[2], p)
            else:
                exponent = float(pv[J[0]:J[1], I[0]:I[1]].min())
            return norm * area ** (-1.0 / exponent)

        value, arg = self._scan_rectangles(v, q, alpha, beta, family, factor)
        return self._report("trace_pbar" if rule == 'pbar' else "trace_local", value, arg, grid, region, {"rule": rule})

    def two_weight_condition_43(self, v: GridFunction, w1: GridFunction, w2: GridFunction, p: Exponent, q: Exponent,
                                alpha: Order, beta: Order, family: Optional[RectFamily] = None,
                                closed_form: bool = True) -> ConditionReport:
        """sup_{I,J} (|I||J|)^{-1} || v |I|^alpha |J|^beta ||_{q(.)(I x J)} ||w^{-1}||_{p'(I x J)}; variable p uses (p_-)'."""
        _require_dim(v, 2, "v")
        grid: Grid2D = v.grid
        q = as_exponent_field(q, grid)
        pe = p.pminus if isinstance(p, ExponentField) else float(p)
        if not (1.0 < pe < q.pminus and q.pplus < math.inf):
            raise ParameterError(f"Window violated: need 1 < p < q_- (p = {pe}, q_- = {q.pminus})")
        av, bv = self._orders(grid, alpha, beta)
        _check_window(float(av.min()), float(av.max()), 0.0, 1.0, "alpha")
        _check_window(float(bv.min()), float(bv.max()), 0.0, 1.0, "beta")
        if w1.dim != 1 or w1.grid != grid.x or w2.dim != 1 or w2.grid != grid.y:
            raise DomainError("w1 and w2 must be 1-D weights on the x and y axes of v's grid")
        _check_positive(w1, "w1")
        _check_positive(w2, "w2")
        _check_nonnegative(v, "v")
        pp = conjugate(pe)
        S1 = _head_1d(w1.values ** -pp, grid.x.h)
        S2 = _head_1d(w2.values ** -pp, grid.y.h)

        def factor(I, J, norm):
            weight = ((S1[I[1]] - S1[I[0]]) * (S2[J[1]] - S2[J[0]])) ** (1.0 / pp)
            return norm * weight / (I[2] * J[2])

        value, arg = self._scan_rectangles(v, q, alpha, beta, family, factor, closed_form)
        name = "two_weight_variable_p" if isinstance(p, ExponentField) else "two_weight_rectangle"
        return self._report(name, value, arg, grid, family.base if family else None, {"p": pe})

    @staticmethod
    def pbar_selector(I: Union[float, Tuple[float, float]], J: Union[float, Tuple[float, float]], p: ExponentField) -> float:
        """p_- when |I||J| <= 1, p_+ otherwise."""
        li = I[1] - I[0] if isinstance(I, tuple) else float(I)
        lj = J[1] - J[0] if isinstance(J, tuple) else float(J)
        return p.pminus if li * lj <= 1.0 else p.pplus

    # ------------------------------------------------------------------ exponent classes

    def class_p_membership(self, p: ExponentField, delta_grid: Sequence[float]) -> ConditionReport:
        """Integrals of delta^{p p_- / (p - p_-)} for each candidate delta; cells at p_- contribute 0."""
        deltas = [float(d) for d in delta_grid]
        if not deltas or any(not 0.0 < d < 1.0 for d in deltas):
            raise ParameterError("delta candidates must lie in (0, 1)")
        pm = p.pminus
        gap = p.values - pm
        live = gap > 0
        exponents = np.zeros_like(gap)
        exponents[live] = p.values[live] * pm / gap[live]
        integrals = {}
        for d in deltas:
            integrand = np.zeros_like(gap)
            integrand[live] = np.power(d, exponents[live])
            integrals[d] = float(np.sum(integrand)) * p.base.cell_measure
        finite = {d: v for d, v in integrals.items() if math.isfinite(v)}
        member = bool(finite)
        best = min(finite, key=lambda d: (finite[d], d)) if member else deltas[0]
        return self._report("class_P", integrals[best] if member else math.inf, {"delta": best}, p.grid, None,
                            {"integrals": {repr(d): v for d, v in integrals.items()}, "member": member}, finite=member)

    def class_p_inf_membership(self, p: ExponentField, c_max: float) -> ConditionReport:
        """Smallest c with |p(x) - p(y)| <= c / ln(e + |x|) for all cell pairs with |y| >= |x|."""
        grid = p.grid
        if isinstance(grid, Grid2D):
            X, Y = np.meshgrid(grid.x.midpoints(), grid.y.midpoints())
            radius = np.hypot(X, Y).ravel()
        else:
            radius = np.abs(grid.midpoints())
        values = p.values.ravel()
        order = np.argsort(radius, kind='stable')
        r, vals = radius[order], values[order]
        suffix_max = np.maximum.accumulate(vals[::-1])[::-1]
        suffix_min = np.minimum.accumulate(vals[::-1])[::-1]
        # ties in |y| = |x| belong to the admissible set
        start = np.searchsorted(r, r, side='left')
        oscillation = np.maximum(suffix_max[start] - vals, vals - suffix_min[start])
        scaled = oscillation * np.log(math.e + r)
        k = int(np.argmax(scaled))
        c = float(scaled[k])
        member = c <= c_max
        return self._report("class_P_inf", c, {"radius": float(r[k]), "p": float(vals[k])}, grid, None,
                            {"c_max": c_max, "member": member}, finite=member)

    # ------------------------------------------------------------------ 1-D building blocks

    def partition_sequence(self, w: GridFunction, p: float, kmax: int, kmin: int = 0) -> PartitionSequence:
        """Points x_k with int_lo^{x_k} w^{-p'} = 2^k, k = kmin..kmax."""
        _require_dim(w, 1, "w")
        _check_positive(w, "w")
        if kmin > kmax:
            raise ParameterError(f"kmin = {kmin} exceeds kmax = {kmax}")
        grid: Grid1D = w.grid
        pp = conjugate(p)
        sigma = w.values ** -pp
        if abs(grid.lo) <= 1e-12 * grid.h and grid.n >= 2:
            # sigma ~ x^{-s} near 0 gives cell ratio 3^s between the first two cells
            slope = math.log(sigma[0] / sigma[1]) / math.log(3.0)
            if slope >= SINGULAR_SLOPE:
                raise InfiniteMassError(f"w^(-p') behaves like x^(-{slope:.3f}) at the left edge and is not integrable; truncate the box away from 0")
        C = _head_1d(sigma, grid.h)
        total = float(C[-1])
        if total < 2.0 ** kmax * (1.0 - 1e-12):
            achievable = int(math.floor(math.log2(total))) if total > 0 else None
            raise RangeError(f"Total mass {total:.6g} is below 2^{kmax}", achievable_kmax=achievable)

        edges = grid.edges()
        levels = list(range(kmin, kmax + 1))
        targets = np.array([2.0 ** k for k in levels])
        idx = np.clip(np.searchsorted(C, targets, side='left'), 1, grid.n)
        points = edges[idx - 1] + (targets - C[idx - 1]) / sigma[idx - 1]
        points = np.minimum(points, grid.hi)

        def mass(x):
            i = np.clip(np.searchsorted(edges, x, side='right') - 1, 0, grid.n - 1)
            return C[i] + (x - edges[i]) * sigma[i]

        level_masses = mass(points)
        annuli = np.diff(level_masses)
        deviation = float(np.max(np.abs(level_masses / targets - 1.0)))
        if annuli.size:
            deviation = max(deviation, float(np.max(np.abs(annuli / targets[:-1] - 1.0))))
        return PartitionSequence(levels=levels, points=[float(x) for x in points], exponent=p, max_deviation=deviation,
                                 annulus_masses=[float(a) for a in annuli], weight=w)

    def lemma31_sufficiency(self, rho: GridFunction, p: float, box: Optional[Rectangle] = None) -> ConditionReport:
        """sup_t (int_t^b Lambda(x)^{-p} lambda(x) dx) Lambda(t)^{p-1}, lambda = rho^{-p'}, Lambda(x) = int_0^x lambda."""
        _require_dim(rho, 1, "rho")
        if not 1.0 < p < math.inf:
            raise ParameterError(f"p = {p} must lie in (1, inf)")
        _check_positive(rho, "rho")
        grid: Grid1D = rho.grid
        (sl,) = (box or Rectangle.of_grid(grid)).slices(grid)
        lam = rho.values[sl] ** -conjugate(p)
        L = _head_1d(lam, grid.h)
        L_mid = L[:-1] + 0.5 * lam * grid.h
        tail = _tail_1d(L_mid ** -p * lam, grid.h)
        m = lam.size
        terms = np.zeros(m + 1)
        terms[1:m] = tail[1:m] * L[1:m] ** (p - 1.0)
        k = int(np.argmax(terms))
        closed = (1.0 - (L[k] / L[m]) ** (p - 1.0)) / (p - 1.0) if k > 0 else 0.0
        return self._report("sufficiency_integral", terms[k], {"t": grid.edge(sl.start + k)}, grid, box,
                            {"analytic_bound": 2.0 / (p - 1.0), "telescoped_at_arg": closed, "p": p})

    # ------------------------------------------------------------------ refinement policy

    def assess_finiteness(self, evaluate: Callable[[int, float], ConditionReport], n: int, box_fixed: bool = False,
                          refine_factor: Optional[int] = None) -> ConditionReport:
        """
        Classify a supremum as finite, non-finite or inconclusive.

        evaluate(n, scale) must return the condition at resolution n on the base box
        scaled by `scale`. Growth below finite_growth under both grid refinement and
        box doubling is "finite"; growth above nonfinite_growth in either is "non-finite".
        """
        factor = refine_factor or self.refine_factor
        base = evaluate(n, 1.0)
        refined = evaluate(n * factor, 1.0)
        growths = {"refinement": _growth(base.value, refined.value)}
        resolutions = [n, n * factor]
        values = {"base": base.value, "refined": refined.value}
        if not box_fixed:
            widened = evaluate(n, 2.0)
            growths["box"] = _growth(base.value, widened.value)
            values["box_doubled"] = widened.value

        if all(g < self.finite_growth for g in growths.values()):
            verdict = "finite"
        elif any(g > self.nonfinite_growth for g in growths.values()):
            verdict = "non-finite"
        else:
            verdict = "inconclusive"
            log_numeric_warning("inconclusive_verdict", {"condition": base.name, "growth": growths})

        details = dict(base.details, growth=growths, values=values, resolutions=resolutions, refine_factor=factor)
        report = base.model_copy(update={"verdict": verdict, "finite": verdict == "finite", "details": details})
        log_condition(report)
        return report
