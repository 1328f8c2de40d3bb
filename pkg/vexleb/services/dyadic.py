import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from vexleb.core.config import settings
from vexleb.core.errors import DimensionError, DomainError, ParameterError, ZeroMassError
from vexleb.core.quadrature import conjugate
from vexleb.schemas.dyadic import DyadicTree
from vexleb.schemas.grid import Grid1D, GridFunction
from vexleb.schemas.reports import ConditionReport, EmbeddingReport
from vexleb.services.generators import generator_version, random_positive
from vexleb.utils.logging import log_condition, log_experiment, log_numeric_warning
from vexleb.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

_WINDOW_EPS = 1e-9


def _check_embedding_exponents(p: float, q: float):
    if not 1.0 < p < q < math.inf:
        raise ParameterError(f"Embedding needs 1 < p < q < inf, got p = {p}, q = {q}")


class DyadicService:
    """Dyadic reverse doubling and the Carleson-Hormander embedding on a finite window."""

    def __init__(self, rd_warn_threshold: Optional[float] = None, threads: Optional[int] = None):
        self.rd_warn_threshold = rd_warn_threshold or settings.rd_warn_threshold
        self.threads = threads

    def _check_window(self, tree: DyadicTree, g: GridFunction) -> Grid1D:
        if g.dim != 1:
            raise DimensionError("Dyadic data must be 1-D")
        grid: Grid1D = g.grid
        hi = tree.lo + tree.length
        if abs(grid.lo - tree.lo) > _WINDOW_EPS * tree.length or abs(grid.hi - hi) > _WINDOW_EPS * tree.length:
            raise DomainError(f"Grid [{grid.lo}, {grid.hi}] does not cover the tree window [{tree.lo}, {hi}]")
        if grid.n % 2 ** tree.depth:
            raise DomainError(f"Grid cell count {grid.n} is not a multiple of 2^{tree.depth}")
        return grid

    def node_masses(self, tree: DyadicTree, g: GridFunction) -> np.ndarray:
        """Level-order array of int_I g over every node I."""
        grid = self._check_window(tree, g)
        level = g.values.reshape(2 ** tree.depth, -1).sum(axis=1) * grid.h
        levels = [level]
        for _ in range(tree.depth):
            level = level[0::2] + level[1::2]
            levels.append(level)
        return np.concatenate(levels[::-1])

    def _require_positive_masses(self, tree: DyadicTree, masses: np.ndarray, what: str):
        zero = np.flatnonzero(masses <= 0)
        if zero.size:
            node = tree.node_of(int(zero[0]))
            raise ZeroMassError(f"Node {node} carries zero {what} mass", node=node)

    def rd_dyadic_check(self, rho: GridFunction, tree: DyadicTree) -> ConditionReport:
        """b* = max over parent/child pairs of rho(parent) / rho(child)."""
        if np.any(rho.values < 0):
            raise ParameterError("rho must be non-negative")
        masses = self.node_masses(tree, rho)
        self._require_positive_masses(tree, masses, "rho")
        grid: Grid1D = rho.grid
        if tree.depth == 0:
            b_star, arg = 1.0, {}
        else:
            children = np.arange(1, tree.node_count)
            ratios = masses[(children - 1) // 2] / masses[children]
            k = int(np.argmax(ratios))
            b_star = float(ratios[k])
            child = tree.node_of(int(children[k]))
            arg = {"node": list(child), "interval": list(tree.interval(*child))}
        flagged = b_star > self.rd_warn_threshold
        if flagged:
            log_numeric_warning("ill_conditioned_rd", {"b_star": b_star, "threshold": self.rd_warn_threshold})
        report = ConditionReport(name="RD_dyadic", value=b_star, arg=arg, resolution=[grid.n],
                                 truncation=[tree.lo, tree.lo + tree.length], finite=True,
                                 details={"depth": tree.depth, "flagged": flagged})
        log_condition(report, level="DEBUG")
        return report

    def _sigma(self, rho: GridFunction, p: float) -> GridFunction:
        if np.any(rho.values <= 0):
            raise DomainError("rho must be positive")
        return rho.with_values(rho.values ** (1.0 - conjugate(p)))

    def carleson_constant(self, tree: DyadicTree, rho: GridFunction, p: float, q: float) -> float:
        """Smallest C1 with c_I <= C1 |I|^q sigma(I)^{-q/p'}, sigma = rho^{1-p'}."""
        _check_embedding_exponents(p, q)
        masses = self.node_masses(tree, self._sigma(rho, p))
        self._require_positive_masses(tree, masses, "rho^(1-p')")
        terms = tree.coefficients * tree.lengths() ** -q * masses ** (q / conjugate(p))
        return float(terms.max())

    def embedding_ratio(self, tree: DyadicTree, rho: GridFunction, g: GridFunction, p: float, q: float) -> Optional[float]:
        """sum_I c_I (avg_I g)^q / (int g^p rho)^{q/p}; None for g = 0."""
        rhs = float(np.sum(np.abs(g.values) ** p * rho.values)) * g.grid.h
        averages = self.node_masses(tree, g.abs()) / tree.lengths()
        lhs = float(np.sum(tree.coefficients * averages ** q))
        if rhs <= 0:
            if lhs > 0:
                raise DomainError("Right-hand side vanishes while the left-hand side does not")
            return None
        return lhs / rhs ** (q / p)

    def node_functions(self, tree: DyadicTree, grid: Grid1D, weight: Optional[np.ndarray] = None) -> List[Tuple[str, GridFunction]]:
        """chi_I (or weight * chi_I) for every node I."""
        out = []
        cells = grid.n // 2 ** tree.depth
        for level, k in tree.nodes():
            span = cells * 2 ** (tree.depth - level)
            values = np.zeros(grid.n)
            values[k * span:(k + 1) * span] = 1.0 if weight is None else weight[k * span:(k + 1) * span]
            out.append((f"{'bump' if weight is not None else 'node'}:{level},{k}", GridFunction(grid=grid, values=values)))
        return out

    def embedding_bruteforce(self, tree: DyadicTree, rho: GridFunction, p: float, q: float, trials: int, seed: int) -> EmbeddingReport:
        _check_embedding_exponents(p, q)
        grid = self._check_window(tree, rho)
        sigma = self._sigma(rho, p)
        c1 = self.carleson_constant(tree, rho, p, q)

        candidates = self.node_functions(tree, grid) + self.node_functions(tree, grid, sigma.values)
        candidates += [(f"random:{t}", None) for t in range(trials)]

        def evaluate(item):
            label, g = item
            if g is None:
                g = random_positive(grid, seed, int(label.split(":")[1]))
            return self.embedding_ratio(tree, rho, g, p, q)

        ratios = parallel_map(evaluate, candidates, self.threads)
        best, best_label = 0.0, None
        for (label, _), ratio in zip(candidates, ratios):
            if ratio is not None and ratio > best:
                best, best_label = ratio, label
        if c1 > 0:
            k_ratio = best / c1
        else:
            k_ratio = 0.0 if best == 0 else math.inf
        b_star = self.rd_dyadic_check(sigma, tree).value

        report = EmbeddingReport(c_emp=best, c1=c1, ratio=k_ratio, argmax=best_label, b_star=b_star, depth=tree.depth,
                                 window=[tree.lo, tree.lo + tree.length], p=p, q=q, trials=trials, seed=seed,
                                 generator_version=generator_version())
        log_experiment("embedding_bruteforce", {"c_emp": best, "c1": c1, "depth": tree.depth}, level="DEBUG")
        return report

    def corollary_a_coefficients(self, tree: DyadicTree, rho: GridFunction, p: float, q: float) -> DyadicTree:
        """c_I = |I|^q sigma(I)^{-q/p'}, which makes C1 = 1."""
        _check_embedding_exponents(p, q)
        masses = self.node_masses(tree, self._sigma(rho, p))
        self._require_positive_masses(tree, masses, "rho^(1-p')")
        return tree.with_coefficients(tree.lengths() ** q * masses ** (-q / conjugate(p)))

    def power_coefficients(self, tree: DyadicTree, exponent: float) -> DyadicTree:
        return tree.with_coefficients(tree.lengths() ** exponent)
