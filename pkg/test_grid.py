import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vexleb.core.errors import DomainError, ExponentRangeError
from vexleb.core.quadrature import conjugate_exponent, integrate, prefix_sums, range_bounds
from vexleb.schemas.grid import ExponentField, Grid1D, Grid2D, GridFunction, Rectangle
from vexleb.services.fixtures import cor35_exponent
from vexleb.utils.gridio import dumps_grid_function, read_grid_function, write_grid_function


def test_integrate_constant_on_unit_square():
    grid = Grid2D.square(0.0, 1.0, 8)
    assert integrate(GridFunction.constant(grid, 1.0)) == pytest.approx(1.0, abs=1e-14)


def test_integrate_linear_is_exact():
    grid = Grid1D(lo=0.0, hi=1.0, n=1024)
    f = GridFunction.from_callable(grid, lambda x: x)
    assert integrate(f) == pytest.approx(0.5, abs=1e-6)


def test_integrate_half_domain_matches_direct_sum(rng):
    grid = Grid2D.square(0.0, 1.0, 12)
    f = GridFunction(grid=grid, values=rng.random(grid.shape))
    region = Rectangle(x0=0.0, x1=0.5, y0=0.0, y1=1.0)
    expected = sum(f.values[j, i] for j in range(12) for i in range(6)) * grid.cell_measure
    assert integrate(f, region) == pytest.approx(expected, rel=1e-13)


def test_region_snaps_outward():
    grid = Grid1D(lo=0.0, hi=1.0, n=4)
    f = GridFunction.constant(grid, 1.0)
    # [0.3, 0.6] touches cells 1 and 2
    assert integrate(f, Rectangle.interval(0.3, 0.6)) == pytest.approx(0.5)


def test_region_outside_domain_raises():
    grid = Grid1D(lo=0.0, hi=1.0, n=4)
    with pytest.raises(DomainError):
        integrate(GridFunction.constant(grid, 1.0), Rectangle.interval(-1.0, 0.5))


def test_midpoint_rule_is_second_order():
    def error(n):
        f = GridFunction.from_callable(Grid1D(lo=0.0, hi=1.0, n=n), lambda x: x ** 2)
        return abs(integrate(f) - 1.0 / 3.0)

    assert error(64) / error(128) == pytest.approx(4.0, rel=1e-3)


def test_prefix_sums_2d_corner_is_total(rng):
    grid = Grid2D.square(0.0, 2.0, 6)
    f = GridFunction(grid=grid, values=rng.random(grid.shape))
    P = prefix_sums(f)
    assert P.shape == (7, 7)
    assert P[-1, -1] == pytest.approx(integrate(f))
    assert np.all(P[0, :] == 0) and np.all(P[:, 0] == 0)


def test_conjugate_exponent_examples():
    grid = Grid1D(lo=0.0, hi=1.0, n=4)
    assert np.allclose(conjugate_exponent(ExponentField.constant(grid, 2.0)).values, 2.0)
    assert np.allclose(conjugate_exponent(ExponentField.constant(grid, 3.0)).values, 1.5)


def test_conjugate_of_corollary_exponent():
    p = cor35_exponent(8)
    pp = conjugate_exponent(p)
    assert range_bounds(pp, Rectangle(x0=1.0, x1=2.0, y0=1.0, y1=2.0)) == (1.5, 1.5)
    assert range_bounds(pp, Rectangle(x0=0.0, x1=1.0, y0=0.0, y1=2.0)) == (2.0, 2.0)
    # (p')_- = (p_+)' and (p')_+ = (p_-)'
    assert (pp.pminus, pp.pplus) == (1.5, 2.0)


def test_range_bounds_examples():
    p = cor35_exponent(16)
    assert range_bounds(p, Rectangle(x0=0.0, x1=2.0, y0=0.0, y1=2.0)) == (2.0, 3.0)
    assert range_bounds(p, Rectangle(x0=1.0, x1=2.0, y0=1.0, y1=2.0)) == (3.0, 3.0)
    grid = Grid1D(lo=0.0, hi=1.0, n=4)
    assert range_bounds(ExponentField.constant(grid, 2.0), Rectangle.interval(0.25, 0.5)) == (2.0, 2.0)


def test_exponent_field_rejects_values_at_one():
    grid = Grid1D(lo=0.0, hi=1.0, n=4)
    with pytest.raises(ExponentRangeError):
        ExponentField.of(GridFunction(grid=grid, values=[1.0, 2.0, 2.0, 2.0]))
    with pytest.raises(ExponentRangeError):
        ExponentField.constant(grid, 1.0, kind='order')


def test_grid_function_rejects_wrong_shape_and_nan():
    grid = Grid2D.square(0.0, 1.0, 2)
    with pytest.raises(DomainError):
        GridFunction(grid=grid, values=[1.0, 2.0, 3.0, 4.0])
    with pytest.raises(DomainError):
        GridFunction(grid=grid, values=[[1.0, np.nan], [0.0, 0.0]])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=1.01, max_value=20.0), min_size=1, max_size=16))
def test_conjugate_is_an_involution(values):
    grid = Grid1D(lo=0.0, hi=1.0, n=len(values))
    p = ExponentField.of(GridFunction(grid=grid, values=values))
    twice = conjugate_exponent(conjugate_exponent(p))
    assert np.allclose(twice.values, p.values, rtol=0, atol=1e-12 * max(values) ** 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=15), st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=16, max_size=16))
def test_integrate_is_additive_and_monotone(split, values):
    grid = Grid1D(lo=0.0, hi=1.0, n=16)
    f = GridFunction(grid=grid, values=values)
    cut = grid.edge(split)
    left, right = integrate(f, Rectangle.interval(0.0, cut)), integrate(f, Rectangle.interval(cut, 1.0))
    assert left + right == pytest.approx(integrate(f), abs=1e-9)
    assert integrate(f) <= integrate(f + 1.0)


def test_grid_function_file_keeps_values(tmp_path, rng):
    grid = Grid2D(x=Grid1D(lo=0.0, hi=2.0, n=3), y=Grid1D(lo=-1.0, hi=1.0, n=2))
    f = GridFunction(grid=grid, values=rng.random(grid.shape))
    path = tmp_path / "f.gf"
    write_grid_function(f, path)
    loaded = read_grid_function(path)
    assert loaded.grid == grid
    assert np.array_equal(loaded.values, f.values)
    header = dumps_grid_function(f).splitlines()[0]
    assert '"dim": 2' in header


def test_exponent_file_carries_kind(tmp_path):
    p = cor35_exponent(4)
    path = tmp_path / "p.gf"
    write_grid_function(p, path)
    loaded = read_grid_function(path)
    assert isinstance(loaded, ExponentField)
    assert loaded.kind == "exponent"
    assert (loaded.pminus, loaded.pplus) == (2.0, 3.0)


def test_malformed_grid_file_raises(tmp_path):
    path = tmp_path / "bad.gf"
    path.write_text('{"dim": 1, "x": [0, 1, 4]}\n1 2 3\n')
    with pytest.raises(DomainError):
        read_grid_function(path)
    path.write_text('not json\n1 2 3 4\n')
    with pytest.raises(DomainError):
        read_grid_function(path)
