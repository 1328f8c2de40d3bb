import math

import numpy as np
import pytest

from vexleb.core.errors import (
    DomainError, EmptyFamilyError, InapplicableError, ParameterError, ResolutionError, TheoremAssertionError,
)
from vexleb.schemas.grid import Grid1D, Grid2D, GridFunction
from vexleb.services.experiments import ExperimentService, averaging_constant
from vexleb.services.fixtures import HARDY_FIXTURES, comparison_functions, unit_square_weights


def test_constant_function_through_hardy1(experiments, unit_axis):
    one = GridFunction.constant(unit_axis, 1.0)
    report = experiments.estimate_operator_norm("hardy1", 2.0, 2.0, grid=unit_axis, families=(),
                                                functions=[("one", one)])
    h = unit_axis.h
    assert report.max_ratio == pytest.approx(math.sqrt(1.0 / 3.0 - h ** 2 / 12.0), rel=1e-12)
    assert report.argmax == "one"


def test_zero_source_functions_are_skipped(experiments, unit_axis):
    zero = GridFunction.constant(unit_axis, 0.0)
    one = GridFunction.constant(unit_axis, 1.0)
    report = experiments.estimate_operator_norm("hardy1", 2.0, 2.0, grid=unit_axis, families=(),
                                                functions=[("zero", zero), ("one", one)])
    assert report.skipped == 1
    assert report.labels == ["one"]
    with pytest.raises(EmptyFamilyError):
        experiments.estimate_operator_norm("hardy1", 2.0, 2.0, grid=unit_axis, families=(), functions=[("zero", zero)])


def test_unknown_operator_or_family(experiments, unit_axis):
    with pytest.raises(ParameterError):
        experiments.apply("hilbert", GridFunction.constant(unit_axis, 1.0))
    with pytest.raises(ParameterError):
        experiments.estimate_operator_norm("hardy1", 2.0, 2.0, grid=unit_axis, families=("wavelets",))
    with pytest.raises(ParameterError):
        experiments.estimate_operator_norm("hardy1", 2.0, 2.0)


def test_estimates_are_reproducible(experiments, unit_axis):
    first = experiments.estimate_operator_norm("hardy1", 2.0, 2.0, grid=unit_axis, trials=4, seed=3)
    second = experiments.estimate_operator_norm("hardy1", 2.0, 2.0, grid=unit_axis, trials=4, seed=3)
    assert first.ratios == second.ratios
    assert first.labels == second.labels


def test_max_ratio_grows_with_the_trial_count(experiments, unit_axis, unit_square):
    # trial t always draws stream (seed, t), so each family extends the previous one
    for op, grid in (("hardy1", unit_axis), ("hardy2", unit_square)):
        reports = [experiments.estimate_operator_norm(op, 2.0, 3.0, grid=grid, families=("random",), trials=t, seed=7)
                   for t in (4, 8, 16)]
        assert all(b.ratios[:len(a.ratios)] == a.ratios for a, b in zip(reports, reports[1:]))
        assert all(b.max_ratio >= a.max_ratio for a, b in zip(reports, reports[1:]))


def test_hardy2_ratio_factorizes_on_product_data(experiments, rng):
    x, y = Grid1D(lo=0.0, hi=1.0, n=24), Grid1D(lo=0.0, hi=2.0, n=16)
    grid = Grid2D(x=x, y=y)
    g, k = rng.random(x.n) + 0.1, rng.random(y.n) + 0.1
    v1, v2 = rng.random(x.n) + 0.5, rng.random(y.n) + 0.5
    w1, w2 = rng.random(x.n) + 0.5, rng.random(y.n) + 0.5
    for p in (1.5, 2.0, 3.0):
        product = experiments.estimate_operator_norm(
            "hardy2", p, p, v=GridFunction(grid=grid, values=np.outer(v2, v1)), w=GridFunction(grid=grid, values=np.outer(w2, w1)),
            families=(), functions=[("product", GridFunction(grid=grid, values=np.outer(k, g)))])
        factors = [experiments.estimate_operator_norm("hardy1", p, p, v=GridFunction(grid=axis, values=v), w=GridFunction(grid=axis, values=w),
                                                      families=(), functions=[("factor", GridFunction(grid=axis, values=f))]).max_ratio
                   for axis, f, v, w in ((x, g, v1, w1), (y, k, v2, w2))]
        assert product.max_ratio == pytest.approx(factors[0] * factors[1], rel=1e-10)


def test_hardy_average_stays_below_its_sharp_constant(experiments):
    grid = Grid1D(lo=1e-4, hi=100.0, n=8192)
    indicators = experiments.estimate_operator_norm("hardy_average", 2.0, 2.0, grid=grid, families=("indicators",))
    # chi_[0, a] gives 1 + a (1/a - 1/X) < 2 for the squared ratio
    assert 1.35 <= indicators.max_ratio < math.sqrt(2.0)
    everything = experiments.estimate_operator_norm("hardy_average", 2.0, 2.0, grid=grid,
                                                    families=("random", "indicators", "power"), trials=4)
    sharp = everything.details["sharp_constant"]
    assert sharp == pytest.approx(averaging_constant(1e-4, 100.0))
    assert indicators.max_ratio <= everything.max_ratio <= 2.0 * 1.02
    assert everything.max_ratio >= 0.9 * sharp
    assert everything.argmax.startswith("power:")


def test_averaging_constant_on_a_truncated_half_line():
    # ln(hi / lo) = ln 1e6 gives k = 0.19985 in tan(k L) = -2k
    assert averaging_constant(1e-4, 100.0) == pytest.approx(1.8571, rel=1e-3)
    assert averaging_constant(1e-4, 100.0) == pytest.approx(averaging_constant(1.0, 1e6), rel=1e-12)
    assert averaging_constant(1.0, 10.0) < averaging_constant(1.0, 1e3) < averaging_constant(1.0, 1e40) < 2.0
    assert averaging_constant(1.0, 1e40) > 1.99
    with pytest.raises(ParameterError):
        averaging_constant(0.0, 1.0)


@pytest.mark.parametrize("name", ["inverse_square", "cubic_tail", "weighted_source"])
def test_sandwich_fixtures(experiments, name):
    report = experiments.sandwich_fixture(HARDY_FIXTURES[name], n=1024, trials=4)
    assert report.c_emp <= min(report.upper_m, report.upper_ps) * 1.05
    assert report.lower_m_ok
    assert report.conditions[-1].verdict == "finite"
    assert report.ratios.operator == "hardy1"


def test_sandwich_near_the_singular_end(experiments):
    # v = x^-2 on [0.01, 100]: (1/x - 1/X)(x - 0.01) peaks near x = 1 at about 0.98
    report = experiments.sandwich_fixture(HARDY_FIXTURES["inverse_square_origin"], n=20000, trials=4)
    assert report.a_m == pytest.approx(1.0, rel=0.03)
    assert report.conditions[0].arg["x"] == pytest.approx(1.0, rel=0.1)
    assert report.conditions[-1].verdict == "finite"
    assert report.lower_m_ok
    assert report.c_emp <= min(report.upper_m, report.upper_ps) * (1 + experiments.tolerance)
    assert report.c_emp <= 2.0 * 1.02


def test_sandwich_on_a_non_finite_fixture(experiments):
    with pytest.raises(InapplicableError):
        experiments.sandwich_fixture(HARDY_FIXTURES["fat_tail"], n=256, trials=2)


def test_sandwich_with_vanishing_target_weight(experiments):
    grid = Grid1D(lo=1.0, hi=100.0, n=256)
    report = experiments.hardy_sandwich(GridFunction.constant(grid, 0.0), GridFunction.constant(grid, 1.0), 2.0, 2.0, trials=2)
    assert report.a_m == 0.0
    assert report.c_emp == 0.0
    assert report.lower_m_ok


def test_sandwich_exponent_window(experiments):
    grid = Grid1D(lo=1.0, hi=2.0, n=16)
    one = GridFunction.constant(grid, 1.0)
    with pytest.raises(ParameterError):
        experiments.hardy_sandwich(one, one, 3.0, 2.0)


@pytest.mark.parametrize("alpha", [0.0, 0.1])
def test_blowup_slope(experiments, alpha):
    series = experiments.blowup_series(2.0, 3.0, alpha=alpha)
    assert -0.197 <= series.slope <= -0.137
    assert series.predicted_slope == pytest.approx(-1.0 / 6.0)
    assert series.lower_slope == pytest.approx(-1.0 / 6.0, abs=1e-9)
    # taus are stored in decreasing order, so A_tau grows along the list
    assert all(b > a for a, b in zip(series.values, series.values[1:]))
    assert all(b > a for a, b in zip(series.lower_bounds, series.lower_bounds[1:]))
    assert all(v >= lb * (1 - 1e-12) for v, lb in zip(series.values, series.lower_bounds))


def test_blowup_with_a_constant_exponent(experiments):
    series = experiments.blowup_series(2.0, 2.0)
    assert abs(series.slope) < 0.01
    assert series.values == pytest.approx([1.0] * len(series.taus), rel=1e-8)


def test_blowup_on_a_tall_strip_is_rejected(experiments):
    # with a unit y side the smaller exponent keeps a visible share of each norm
    with pytest.raises(TheoremAssertionError):
        experiments.blowup_series(2.0, 3.0, geometry={"domain": [0.0, 2.0, 0.0, 1.0]})


def test_blowup_geometry_must_be_ordered(experiments):
    with pytest.raises(ParameterError):
        experiments.blowup_series(2.0, 3.0, geometry={"b": 0.7})


def test_blowup_rejections(experiments):
    with pytest.raises(ResolutionError):
        experiments.blowup_series(2.0, 3.0, taus=[0.25, 2.0 ** -12], n=4096)
    with pytest.raises(ParameterError):
        experiments.blowup_series(3.0, 2.0)
    with pytest.raises(ParameterError):
        experiments.blowup_series(2.0, 3.0, alpha=0.4)


def test_theorem_31_on_unit_weights(experiments):
    report = experiments.verify_theorem_31(unit_square_weights, n=32, trials=4)
    assert report.details["B"] == pytest.approx(0.25)
    assert report.details["drift"] < 0.10
    assert report.details["necessity_rel_error"] <= 0.05
    assert math.isfinite(report.max_ratio)


def test_corollary_35(experiments):
    report = experiments.verify_corollary_35(n=64, trials=50)
    assert report.verdict == "finite"
    assert report.details["ratio_trials"] == 50
    assert report.details["anchor_exponent"] == 2.0
    assert math.isfinite(report.details["ratio_max"])


@pytest.mark.parametrize("name", ["aligned_square", "straddling_square", "smooth"])
def test_dyadic_comparison(experiments, name):
    f = comparison_functions(16)[name]
    report = experiments.verify_dyadic_comparison(f, 0.0, 0.0, k=-2, shift_samples=8)
    assert report.finite
    assert report.shift_samples == [8, 16]
    assert all(c > 0 for c in report.constants)


def test_dyadic_comparison_of_zero(experiments):
    f = comparison_functions(16)["smooth"].with_values(np.zeros((16, 16)))
    report = experiments.verify_dyadic_comparison(f, 0.0, 0.0, k=-2, shift_samples=4)
    assert report.constants == [0.0, 0.0]
    assert report.drift == 0.0


def test_averaged_hardy_ratios_are_finite(experiments, unit_axis):
    report = experiments.verify_averaged_hardy(GridFunction.constant(unit_axis, 1.0), 2.0, trials=4)
    assert all(math.isfinite(r) for r in report.ratios)
    assert report.details["sufficiency"] <= 1.0
    assert report.bound_high == pytest.approx(2.0 * math.sqrt(report.details["sufficiency"]))
    assert report.details["within_bound"] is True
    assert report.max_ratio <= report.bound_high * (1.0 + experiments.tolerance)


def test_averaged_hardy_raises_above_its_bound(norms, operators, conditions, unit_axis):
    # a tolerance of -0.9 shrinks the admissible ratio to a tenth of the bound
    strict = ExperimentService(norms, operators, conditions, threads=2, tolerance=-0.9)
    with pytest.raises(TheoremAssertionError):
        strict.verify_averaged_hardy(GridFunction.constant(unit_axis, 1.0), 2.0, trials=4)


def test_averaged_hardy_is_one_dimensional(experiments, unit_square):
    with pytest.raises(DomainError):
        experiments.verify_averaged_hardy(GridFunction.constant(unit_square, 1.0), 2.0)
