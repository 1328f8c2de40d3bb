import numpy as np
import pytest

from vexleb.core.errors import DomainError, ParameterError, ZeroMassError
from vexleb.schemas.dyadic import DyadicTree
from vexleb.schemas.grid import Grid1D, GridFunction
from vexleb.utils.gridio import read_tree


def window(depth, cells_per_leaf=4, lo=0.0, length=1.0):
    return Grid1D(lo=lo, hi=lo + length, n=cells_per_leaf * 2 ** depth)


def test_tree_layout():
    tree = DyadicTree.zeros(length=1.0, depth=3)
    assert tree.node_count == 15
    assert DyadicTree.node_of(0) == (0, 0)
    assert DyadicTree.node_of(2) == (1, 1)
    assert DyadicTree.node_of(7) == (3, 0)
    assert tree.interval(2, 3) == (0.75, 1.0)
    assert tree.lengths()[[0, 1, 3, 14]].tolist() == [1.0, 0.5, 0.25, 0.125]


def test_tree_rejects_negative_or_misshapen_coefficients():
    with pytest.raises(ValueError):
        DyadicTree(length=1.0, depth=1, coefficients=[1.0, -1.0, 0.0])
    with pytest.raises(ValueError):
        DyadicTree(length=1.0, depth=1, coefficients=[1.0, 1.0])


def test_tree_file(tmp_path):
    tree = DyadicTree(lo=1.0, length=2.0, depth=1, coefficients=[3.0, 1.0, 2.0])
    path = tmp_path / "tree.json"
    path.write_text('{"root": [1.0, 3.0], "depth": 1, "coefficients": [3.0, 1.0, 2.0]}')
    loaded = read_tree(path)
    assert loaded.to_dict() == tree.to_dict()
    path.write_text('{"root": [0.0, 1.0]}')
    with pytest.raises(DomainError):
        read_tree(path)


def test_node_masses_sum_children(dyadic, rng):
    tree = DyadicTree.zeros(length=1.0, depth=4)
    g = GridFunction(grid=window(4), values=rng.random(64))
    masses = dyadic.node_masses(tree, g)
    for index in range(1, tree.node_count):
        level, k = DyadicTree.node_of(index)
        if level < tree.depth:
            left, right = 2 * index + 1, 2 * index + 2
            assert masses[index] == pytest.approx(masses[left] + masses[right], rel=1e-12)
    assert masses[0] == pytest.approx(float(np.sum(g.values)) * g.grid.h)


def test_node_masses_need_a_matching_window(dyadic):
    tree = DyadicTree.zeros(length=1.0, depth=3)
    with pytest.raises(DomainError):
        dyadic.node_masses(tree, GridFunction.constant(Grid1D(lo=0.0, hi=2.0, n=32), 1.0))
    with pytest.raises(DomainError):
        dyadic.node_masses(tree, GridFunction.constant(Grid1D(lo=0.0, hi=1.0, n=12), 1.0))


def test_reverse_doubling_of_lebesgue_measure(dyadic):
    tree = DyadicTree.zeros(length=1.0, depth=6)
    report = dyadic.rd_dyadic_check(GridFunction.constant(window(6), 1.0), tree)
    assert report.value == pytest.approx(2.0, rel=1e-12)
    assert report.details["flagged"] is False


def test_reverse_doubling_of_linear_density(dyadic):
    tree = DyadicTree.zeros(length=1.0, depth=5)
    rho = GridFunction.from_callable(window(5), lambda x: x)
    report = dyadic.rd_dyadic_check(rho, tree)
    # the leftmost chain loses a factor 4 at every level
    assert report.value == pytest.approx(4.0, rel=1e-9)
    assert report.arg["node"][1] == 0


def test_reverse_doubling_flags_concentrated_mass(dyadic):
    tree = DyadicTree.zeros(length=1.0, depth=2)
    values = np.full(16, 1e-6)
    values[0] = 1.0
    report = dyadic.rd_dyadic_check(GridFunction(grid=window(2), values=values), tree)
    assert report.value > 1e3
    assert report.details["flagged"] is True


def test_reverse_doubling_with_empty_node(dyadic):
    tree = DyadicTree.zeros(length=1.0, depth=2)
    values = np.ones(16)
    values[12:] = 0.0
    with pytest.raises(ZeroMassError) as excinfo:
        dyadic.rd_dyadic_check(GridFunction(grid=window(2), values=values), tree)
    assert excinfo.value.node == (2, 3)


def test_carleson_constant_of_power_coefficients(dyadic):
    tree = dyadic.power_coefficients(DyadicTree.zeros(length=1.0, depth=5), 1.5)
    rho = GridFunction.constant(window(5), 1.0)
    assert dyadic.carleson_constant(tree, rho, 2.0, 3.0) == pytest.approx(1.0, rel=1e-12)


def test_carleson_constant_of_zero_coefficients(dyadic):
    tree = DyadicTree.zeros(length=1.0, depth=3)
    assert dyadic.carleson_constant(tree, GridFunction.constant(window(3), 1.0), 2.0, 3.0) == 0.0


def test_carleson_constant_matches_node_loop(dyadic, rng):
    p, q = 2.0, 3.0
    pp = p / (p - 1)
    tree = DyadicTree(length=1.0, depth=4, coefficients=rng.random(31))
    rho = GridFunction(grid=window(4), values=rng.random(64) + 0.2)
    sigma = rho.values ** (1 - pp)
    expected = 0.0
    for index, (level, k) in enumerate(tree.nodes()):
        cells = slice(k * 64 // 2 ** level, (k + 1) * 64 // 2 ** level)
        mass = float(np.sum(sigma[cells])) * rho.grid.h
        length = 2.0 ** -level
        expected = max(expected, tree.coefficients[index] / (length ** q * mass ** (-q / pp)))
    assert dyadic.carleson_constant(tree, rho, p, q) == pytest.approx(expected, rel=1e-12)


def test_embedding_exponents_must_increase(dyadic):
    tree = DyadicTree.zeros(length=1.0, depth=2)
    with pytest.raises(ParameterError):
        dyadic.carleson_constant(tree, GridFunction.constant(window(2), 1.0), 3.0, 2.0)


def test_embedding_ratio_of_constant(dyadic):
    depth = 5
    tree = dyadic.power_coefficients(DyadicTree.zeros(length=1.0, depth=depth), 1.5)
    one = GridFunction.constant(window(depth), 1.0)
    expected = sum(2.0 ** (-level / 2) for level in range(depth + 1))
    assert dyadic.embedding_ratio(tree, one, one, 2.0, 3.0) == pytest.approx(expected, rel=1e-12)


def test_embedding_ratio_of_zero_is_skipped(dyadic):
    tree = dyadic.power_coefficients(DyadicTree.zeros(length=1.0, depth=2), 1.5)
    grid = window(2)
    assert dyadic.embedding_ratio(tree, GridFunction.constant(grid, 1.0), GridFunction.constant(grid, 0.0), 2.0, 3.0) is None


@pytest.mark.parametrize("depth", [4, 5, 6])
def test_bruteforce_constant_stays_within_the_level_count(dyadic, depth):
    tree = dyadic.power_coefficients(DyadicTree.zeros(length=1.0, depth=depth), 1.5)
    report = dyadic.embedding_bruteforce(tree, GridFunction.constant(window(depth), 1.0), 2.0, 3.0, trials=16, seed=0)
    assert report.c1 == pytest.approx(1.0)
    assert 1.0 - 1e-12 <= report.c_emp <= (depth + 1) * report.c1
    assert report.b_star == pytest.approx(2.0)


def test_bruteforce_bounds_on_random_coefficients(dyadic, rng):
    depth, p, q = 3, 2.0, 3.0
    grid = window(depth)
    for trial in range(200):
        tree = DyadicTree(length=1.0, depth=depth, coefficients=rng.random(15) * rng.random())
        rho = GridFunction.constant(grid, 1.0)
        report = dyadic.embedding_bruteforce(tree, rho, p, q, trials=2, seed=trial)
        # node indicators give C_emp >= C1, the level-by-level bound gives C_emp <= (depth + 1) C1
        assert report.c_emp >= report.c1 * (1 - 1e-12)
        assert report.c_emp <= (depth + 1) * report.c1 * (1 + 1e-12)


def test_bruteforce_scales_with_the_coefficients(dyadic, rng):
    tree = DyadicTree(length=1.0, depth=3, coefficients=rng.random(15))
    rho = GridFunction(grid=window(3), values=rng.random(32) + 0.5)
    base = dyadic.embedding_bruteforce(tree, rho, 2.0, 3.0, trials=8, seed=1)
    scaled = dyadic.embedding_bruteforce(tree.with_coefficients(tree.coefficients * 5.0), rho, 2.0, 3.0, trials=8, seed=1)
    assert scaled.c_emp == pytest.approx(5.0 * base.c_emp, rel=1e-12)
    assert scaled.c1 == pytest.approx(5.0 * base.c1, rel=1e-12)
    assert scaled.ratio == pytest.approx(base.ratio, rel=1e-12)


def test_bruteforce_is_reproducible(dyadic, rng):
    tree = DyadicTree(length=1.0, depth=3, coefficients=rng.random(15))
    rho = GridFunction.constant(window(3), 1.0)
    first = dyadic.embedding_bruteforce(tree, rho, 2.0, 3.0, trials=8, seed=4)
    second = dyadic.embedding_bruteforce(tree, rho, 2.0, 3.0, trials=8, seed=4)
    assert first == second


def test_corollary_a_coefficients_have_unit_carleson_constant(dyadic, rng):
    tree = DyadicTree.zeros(length=1.0, depth=4)
    rho = GridFunction(grid=window(4), values=rng.random(64) + 0.2)
    weighted = dyadic.corollary_a_coefficients(tree, rho, 2.0, 3.0)
    assert dyadic.carleson_constant(weighted, rho, 2.0, 3.0) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_corollary_a_embedding_in_its_direct_form(dyadic, seed):
    rng = np.random.default_rng(seed)
    depth, p = 4, float(rng.uniform(1.5, 3.0))
    q = p + float(rng.uniform(0.2, 2.0))
    grid = window(depth)
    rho = GridFunction(grid=grid, values=rng.random(grid.n) + 0.2)
    g = GridFunction(grid=grid, values=rng.random(grid.n) * (rng.random(grid.n) < 0.7))
    tree = dyadic.corollary_a_coefficients(DyadicTree.zeros(length=1.0, depth=depth), rho, p, q)

    pp = p / (p - 1.0)
    sigma = rho.values ** (1.0 - pp)
    lhs = 0.0
    for level in range(depth + 1):
        span = grid.n // 2 ** level
        for k in range(2 ** level):
            cells = slice(k * span, (k + 1) * span)
            mass = float(np.sum(sigma[cells])) * grid.h
            lhs += mass ** (-q / pp) * (float(np.sum(g.values[cells])) * grid.h) ** q
    rhs = float(np.sum(g.values ** p * rho.values)) * grid.h
    assert dyadic.embedding_ratio(tree, rho, g, p, q) == pytest.approx(lhs / rhs ** (q / p), rel=1e-10)

    report = dyadic.embedding_bruteforce(tree, rho, p, q, trials=4, seed=seed)
    assert report.c1 == pytest.approx(1.0, rel=1e-12)
    assert 1.0 - 1e-12 <= report.c_emp <= depth + 1
