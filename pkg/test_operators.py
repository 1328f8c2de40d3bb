import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from vexleb.core.errors import DimensionError, DomainError, IncompatibleFamilyError, ParameterError
from vexleb.schemas.grid import ExponentField, Grid1D, Grid2D, GridFunction, Rectangle
from vexleb.services.families import RectFamily
from vexleb.services.operators import OperatorService


def brute_strong_maximal(f, alpha, beta, i, j):
    """sup over aligned rectangles containing cell (j, i), straight from the definition."""
    grid = f.grid
    nx, ny = grid.x.n, grid.y.n
    best = 0.0
    for i0, i1 in itertools.combinations(range(nx + 1), 2):
        if not i0 <= i < i1:
            continue
        for j0, j1 in itertools.combinations(range(ny + 1), 2):
            if not j0 <= j < j1:
                continue
            lx, ly = (i1 - i0) * grid.x.h, (j1 - j0) * grid.y.h
            mass = float(np.sum(np.abs(f.values[j0:j1, i0:i1]))) * grid.cell_measure
            best = max(best, lx ** (alpha - 1.0) * ly ** (beta - 1.0) * mass)
    return best


def test_hardy1_of_one_is_the_midpoint(operators, unit_axis):
    out = operators.hardy1(GridFunction.constant(unit_axis, 1.0))
    assert np.allclose(out.values, unit_axis.midpoints(), atol=1e-14)


def test_hardy1_of_half_indicator(operators, unit_axis):
    chi = GridFunction.indicator(unit_axis, Rectangle.interval(0.0, 0.5))
    out = operators.hardy1(chi)
    assert out.values[-1] == pytest.approx(0.5, abs=1e-14)
    assert np.all(np.diff(out.values) >= 0)


def test_hardy1_matches_power_antiderivative(operators):
    grid = Grid1D(lo=1e-3, hi=1.0, n=4096)
    s = -0.5 + 0.05
    f = GridFunction.from_callable(grid, lambda x: x ** s)
    x = grid.midpoints()
    exact = (x ** (s + 1) - grid.lo ** (s + 1)) / (s + 1)
    # the half cell at the evaluation point is one-sided, which only matters right next to lo
    away = x >= 2 * grid.lo
    assert np.max(np.abs(operators.hardy1(f).values[away] / exact[away] - 1.0)) <= 5e-3


def test_hardy_average_needs_positive_midpoints(operators):
    grid = Grid1D(lo=-1.0, hi=1.0, n=8)
    with pytest.raises(DomainError):
        operators.hardy_average(GridFunction.constant(grid, 1.0))


def test_hardy_average_of_constant_is_constant_from_zero(operators, unit_axis):
    out = operators.hardy_average(GridFunction.constant(unit_axis, 3.0))
    assert np.allclose(out.values, 3.0)


def test_hardy2_of_one_is_the_product(operators, unit_square):
    out = operators.hardy2(GridFunction.constant(unit_square, 1.0))
    x = unit_square.x.midpoints()
    assert np.allclose(out.values, np.outer(x, x), atol=1e-14)


def test_hardy2_factorizes_on_products(operators, rng):
    grid = Grid2D(x=Grid1D(lo=0.0, hi=1.0, n=12), y=Grid1D(lo=0.0, hi=2.0, n=10))
    g, h = rng.random(12), rng.random(10)
    product = GridFunction(grid=grid, values=np.outer(h, g))
    out = operators.hardy2(product)
    Hg = operators.hardy1(GridFunction(grid=grid.x, values=g)).values
    Hh = operators.hardy1(GridFunction(grid=grid.y, values=h)).values
    assert np.allclose(out.values, np.outer(Hh, Hg), rtol=1e-12)


def test_hardy2_matches_direct_sum(operators, rng):
    n = 32
    grid = Grid2D.square(0.0, 1.0, n)
    values = rng.random(grid.shape)
    out = operators.hardy2(GridFunction(grid=grid, values=values)).values
    # cells strictly before count fully, the cell itself counts half on each axis
    weight = np.tril(np.ones((n, n))) - 0.5 * np.eye(n)
    expected = weight @ values @ weight.T * grid.cell_measure
    assert np.allclose(out, expected, rtol=1e-12, atol=1e-15)


def test_hardy2_rejects_one_dimensional_input(operators, unit_axis):
    with pytest.raises(DimensionError):
        operators.hardy2(GridFunction.constant(unit_axis, 1.0))


def test_double_average_of_constant(operators, unit_square):
    out = operators.double_average(GridFunction.constant(unit_square, 2.5))
    assert np.allclose(out.values, 2.5)


def test_double_average_of_corner_square(operators):
    grid = Grid2D.square(0.0, 1.0, 64)
    chi = GridFunction.indicator(grid, Rectangle(x0=0.0, x1=0.5, y0=0.0, y1=0.5))
    out = operators.double_average(chi)
    x = grid.x.midpoints()[-1]
    assert out.values[-1, -1] * x * x == pytest.approx(0.25, abs=1e-14)
    assert out.values[-1, -1] == pytest.approx(0.25, rel=2e-2)


@pytest.mark.parametrize("alpha", [0.0, 0.5])
def test_fractional_maximal_of_unit_indicator(operators, alpha):
    grid = Grid1D(lo=0.0, hi=1.0, n=16)
    out = operators.fractional_maximal_1d(GridFunction.constant(grid, 1.0), alpha)
    assert np.allclose(out.values, 1.0)


def test_fractional_maximal_of_zero(operators, unit_axis):
    out = operators.fractional_maximal_1d(GridFunction.constant(unit_axis, 0.0), 0.25)
    assert np.all(out.values == 0.0)


def test_fractional_order_out_of_range(operators, unit_axis):
    with pytest.raises(ParameterError):
        operators.fractional_maximal_1d(GridFunction.constant(unit_axis, 1.0), 1.2)


def test_strong_maximal_of_unit_square_indicator(operators, unit_square):
    out = operators.strong_fractional_maximal(GridFunction.constant(unit_square, 1.0))
    assert np.allclose(out.values, 1.0)


def test_strong_maximal_matches_brute_force(operators, rng):
    grid = Grid2D.square(0.0, 1.0, 16)
    f = GridFunction(grid=grid, values=rng.random(grid.shape))
    out = operators.strong_fractional_maximal(f, 0.25, 0.25)
    for i, j in [(0, 0), (7, 11), (15, 3), (12, 12)]:
        assert out.values[j, i] == pytest.approx(brute_strong_maximal(f, 0.25, 0.25, i, j), rel=1e-12)


def test_variable_order_field(operators, rng):
    grid = Grid2D.square(0.0, 1.0, 8)
    f = GridFunction(grid=grid, values=rng.random(grid.shape))
    alpha = ExponentField.constant(grid.x, 0.25, kind='order')
    beta = ExponentField.constant(grid.y, 0.25, kind='order')
    field = operators.strong_fractional_maximal(f, alpha, beta)
    scalar = operators.strong_fractional_maximal(f, 0.25, 0.25)
    assert np.allclose(field.values, scalar.values, rtol=1e-14)


def test_dyadic_family_is_dominated(operators, rng):
    grid = Grid2D.square(0.0, 1.0, 8)
    f = GridFunction(grid=grid, values=rng.random(grid.shape))
    dyadic = operators.strong_fractional_maximal(f, family=RectFamily.dyadic()).values
    full = operators.strong_fractional_maximal(f).values
    assert np.all(dyadic <= full * (1 + 1e-12))


def test_dyadic_family_needs_power_of_two_cells(operators):
    grid = Grid2D.square(0.0, 1.0, 3)
    with pytest.raises(IncompatibleFamilyError):
        operators.strong_fractional_maximal(GridFunction.constant(grid, 1.0), family=RectFamily.dyadic())


def test_size_cap_is_monotone(operators, rng):
    grid = Grid2D.square(0.0, 1.0, 8)
    f = GridFunction(grid=grid, values=rng.random(grid.shape))
    quarter = operators.strong_fractional_maximal(f, family=RectFamily.size_capped(-2)).values
    half = operators.strong_fractional_maximal(f, family=RectFamily.size_capped(-1)).values
    full = operators.strong_fractional_maximal(f).values
    assert np.all(quarter <= half * (1 + 1e-12))
    assert np.all(half <= full * (1 + 1e-12))


def test_base_rectangle_restricts_the_family(operators):
    grid = Grid2D.square(0.0, 1.0, 8)
    f = GridFunction.indicator(grid, Rectangle(x0=0.5, x1=1.0, y0=0.5, y1=1.0))
    family = RectFamily.all_aligned(Rectangle(x0=0.0, x1=0.5, y0=0.0, y1=0.5))
    out = operators.strong_fractional_maximal(f, family=family)
    assert np.all(out.values == 0.0)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=16, max_size=16),
       st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=16, max_size=16),
       st.floats(min_value=0.0, max_value=100.0))
def test_strong_maximal_is_sublinear_and_homogeneous(a, b, c):
    operators = OperatorService()
    grid = Grid2D.square(0.0, 1.0, 4)
    f = GridFunction(grid=grid, values=np.reshape(a, (4, 4)))
    g = GridFunction(grid=grid, values=np.reshape(b, (4, 4)))
    Mf = operators.strong_fractional_maximal(f, 0.25, 0.25).values
    Mg = operators.strong_fractional_maximal(g, 0.25, 0.25).values
    Mfg = operators.strong_fractional_maximal(f + g, 0.25, 0.25).values
    Mcf = operators.strong_fractional_maximal(f * c, 0.25, 0.25).values
    assert np.all(Mfg <= (Mf + Mg) * (1 + 1e-12) + 1e-12)
    assert np.allclose(Mcf, c * Mf, rtol=1e-12, atol=1e-12)


def test_companion_with_unit_weight(operators):
    grid = Grid2D.square(0.0, 1.0, 8)
    one = GridFunction.constant(grid, 1.0)
    m1 = operators.companion_maximal(one, 2.0, 2.0, 0.25, 0.25, variant='m1')
    m2 = operators.companion_maximal(one, 2.0, 2.0, 0.25, 0.25, variant='m2')
    # |I|^{1/4 - 1/2} |J|^{1/4 - 1/2} (|I||J|)^{1/2} peaks at the full square
    assert np.allclose(m1.values, 1.0)
    assert np.array_equal(m1.values, m2.values)


def test_companion_variants_agree_for_constant_exponent(operators, rng):
    grid = Grid2D.square(0.0, 1.0, 6)
    v = GridFunction(grid=grid, values=rng.random(grid.shape))
    outputs = [operators.companion_maximal(v, 2.0, 3.0, 0.2, 0.2, variant=name).values
               for name in ('m1', 'm2', 'max', 'pbar')]
    for out in outputs[1:]:
        assert np.allclose(out, outputs[0], rtol=1e-12)


def test_constant_q_companion_matches_its_definition(operators, rng):
    grid = Grid2D.square(0.0, 1.0, 4)
    v = GridFunction(grid=grid, values=rng.random(grid.shape) + 0.5)
    p, q, a = 2.0, 3.0, 0.2
    out = operators.companion_maximal(v, p, q, a, a, variant='constant-q').values
    expected = 0.0
    h = grid.x.h
    for i0, i1 in itertools.combinations(range(5), 2):
        for j0, j1 in itertools.combinations(range(5), 2):
            if i0 <= 1 < i1 and j0 <= 2 < j1:
                mass = float(np.sum(v.values[j0:j1, i0:i1] ** q)) * h * h
                value = ((i1 - i0) * h) ** (a - 1 / p) * ((j1 - j0) * h) ** (a - 1 / p) * mass ** (1 / q)
                expected = max(expected, value)
    assert out[2, 1] == pytest.approx(expected, rel=1e-12)


def luxemburg_by_root(block, exponents, cell):
    def excess(lam):
        return float(np.sum((block / lam) ** exponents)) * cell - 1.0
    return brentq(excess, 1e-8, 1e8, xtol=1e-14, rtol=1e-13)


def test_companion_matches_brute_force_with_variable_exponents(operators, rng):
    # a side of 2 puts rectangles on both sides of |R| = 1
    grid = Grid2D.square(0.0, 2.0, 6)
    v = GridFunction(grid=grid, values=rng.random(grid.shape) + 0.1)
    p = ExponentField.from_callable(grid, lambda X, Y: np.where(Y < 1.0, 1.5, 3.0))
    q = ExponentField.from_callable(grid, lambda X, Y: np.where(X < 1.0, 2.0, 4.0))
    a, h = 0.2, grid.x.h
    rects = []
    for i0, i1 in itertools.combinations(range(7), 2):
        for j0, j1 in itertools.combinations(range(7), 2):
            lx, ly = (i1 - i0) * h, (j1 - j0) * h
            block = v.values[j0:j1, i0:i1] * lx ** a * ly ** a
            rects.append((i0, i1, j0, j1, lx * ly, luxemburg_by_root(block, q.values[j0:j1, i0:i1], h * h)))
    scales = {
        'm1': lambda area: area ** (-1 / 1.5),
        'm2': lambda area: area ** (-1 / 3.0),
        'max': lambda area: max(area ** (-1 / 1.5), area ** (-1 / 3.0)),
        'pbar': lambda area: area ** (-1 / (1.5 if area <= 1.0 else 3.0)),
    }
    for variant, scale in scales.items():
        expected = np.zeros(grid.shape)
        for i0, i1, j0, j1, area, norm in rects:
            target = expected[j0:j1, i0:i1]
            np.maximum(target, scale(area) * norm, out=target)
        out = operators.companion_maximal(v, p, q, a, a, variant=variant).values
        assert np.allclose(out, expected, rtol=1e-7, atol=0.0)
    assert not np.allclose(operators.companion_maximal(v, p, q, a, a, variant='m1').values,
                           operators.companion_maximal(v, p, q, a, a, variant='m2').values)


def test_unknown_companion_variant(operators, unit_square):
    with pytest.raises(ParameterError):
        operators.companion_maximal(GridFunction.constant(unit_square, 1.0), 2.0, 2.0, 0.0, 0.0, variant='mid')
