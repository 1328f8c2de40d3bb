import logging
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import bisect

from vexleb.core.config import settings
from vexleb.core.errors import DomainError, NonConvergenceError, ParameterError
from vexleb.core.quadrature import region_slices
from vexleb.schemas.grid import ExponentField, GridFunction, Rectangle, as_exponent_field
from vexleb.schemas.reports import NormResult
from vexleb.utils.logging import log_numeric_warning

logger = logging.getLogger(__name__)

# Floor for the relative bisection tolerance
_RTOL = 4 * np.finfo(float).eps


class NormService:
    """Luxemburg norms of cellwise-constant functions in variable-exponent spaces."""

    def __init__(self, tol: Optional[float] = None, max_iter: Optional[int] = None, bracket_cap: Optional[int] = None):
        self.tol = settings.tol if tol is None else tol
        self.max_iter = max_iter or settings.max_iter
        self.bracket_cap = bracket_cap or settings.bracket_cap

    def _check_tol(self, tol: Optional[float]) -> float:
        tol = self.tol if tol is None else tol
        if not tol > 0:
            raise ParameterError(f"Tolerance must be positive, got {tol}")
        return tol

    @staticmethod
    def _check_grids(f: GridFunction, p: ExponentField):
        if f.grid != p.grid:
            raise DomainError("Function and exponent live on different grids")

    def modular(self, f: GridFunction, p: Union[float, ExponentField], region: Optional[Rectangle] = None, lam: float = 1.0) -> float:
        """rho_p(f / lam) over the region."""
        if not lam > 0:
            raise ParameterError(f"Scale must be positive, got {lam}")
        p = as_exponent_field(p, f.grid)
        self._check_grids(f, p)
        sl = region_slices(f.grid, region)
        a = np.abs(f.values[sl]).ravel()
        e = p.values[sl].ravel()
        with np.errstate(over='ignore'):
            return float(np.sum(np.power(a / lam, e))) * f.cell_measure

    def luxemburg_norm(self, f: GridFunction, p: Union[float, ExponentField], region: Optional[Rectangle] = None, tol: Optional[float] = None) -> NormResult:
        p = as_exponent_field(p, f.grid)
        self._check_grids(f, p)
        sl = region_slices(f.grid, region)
        return self.norm_of_samples(f.values[sl], p.values[sl], f.cell_measure, tol)

    def weighted_norm(self, f: GridFunction, w: GridFunction, p: Union[float, ExponentField], region: Optional[Rectangle] = None, tol: Optional[float] = None) -> NormResult:
        if w.grid != f.grid:
            raise DomainError("Function and weight live on different grids")
        if np.any(w.values < 0):
            raise ParameterError("Weights must be non-negative")
        return self.luxemburg_norm(f * w, p, region, tol)

    def classical_norm(self, f: GridFunction, p0: float, region: Optional[Rectangle] = None) -> float:
        """Constant-exponent Lebesgue norm in closed form."""
        if not 1.0 <= p0 < math.inf:
            raise ParameterError(f"Constant exponent must lie in [1, inf), got {p0}")
        sl = region_slices(f.grid, region)
        return (float(np.sum(np.abs(f.values[sl]) ** p0)) * f.cell_measure) ** (1.0 / p0)

    def norm_of_samples(self, values: np.ndarray, exponents: np.ndarray, cell: float, tol: Optional[float] = None) -> NormResult:
        """Norm of raw cell samples with their exponents and a common cell measure."""
        tol = self._check_tol(tol)
        a = np.abs(np.asarray(values, dtype=float)).ravel()
        e = np.asarray(exponents, dtype=float).ravel()
        mask = a > 0
        a, e = a[mask], e[mask]
        if a.size == 0:
            return NormResult(value=0.0, modular_at_value=0.0, iterations=0, tol=tol)

        emin, emax = float(e.min()), float(e.max())
        if emin == emax:
            # single exponent: the modular inverts exactly
            value = (float(np.sum(a ** emin)) * cell) ** (1.0 / emin)
            return NormResult(value=value, modular_at_value=self._power_sum(a, e, cell, value), iterations=0, tol=tol)

        log_a = np.log(a)

        def modular(lam: float) -> float:
            return self._power_sum(a, e, cell, lam, log_a)

        hi = float(a.max()) * (a.size * cell) ** (1.0 / emin) + 1.0
        return self._solve(modular, hi, emax, tol)

    def norm_from_moments(self, masses: Sequence[float], exponents: Sequence[float], tol: Optional[float] = None) -> NormResult:
        """
        Norm of a function whose modular at scale lam is sum_k S_k * lam ** -p_k.

        Used for indicators and piecewise data where the cell data collapse to a
        few (mass, exponent) pairs.
        """
        tol = self._check_tol(tol)
        S = np.asarray(masses, dtype=float)
        e = np.asarray(exponents, dtype=float)
        mask = S > 0
        S, e = S[mask], e[mask]
        if S.size == 0:
            return NormResult(value=0.0, modular_at_value=0.0, iterations=0, tol=tol)
        if S.size == 1:
            value = float(S[0]) ** (1.0 / float(e[0]))
            return NormResult(value=value, modular_at_value=float(S[0]) * value ** -float(e[0]), iterations=0, tol=tol)

        log_S = np.log(S)

        def modular(lam: float) -> float:
            with np.errstate(over='ignore'):
                return float(np.sum(np.exp(log_S - e * math.log(lam))))

        # every term is at most 1/K here
        hi = float(np.max(np.exp((log_S + math.log(S.size)) / e)))
        return self._solve(modular, hi, float(e.max()), tol)

    @staticmethod
    def _power_sum(a: np.ndarray, e: np.ndarray, cell: float, lam: float, log_a: Optional[np.ndarray] = None) -> float:
        if log_a is None:
            log_a = np.log(a)
        with np.errstate(over='ignore'):
            return float(np.sum(np.exp(e * (log_a - math.log(lam))))) * cell

    def _solve(self, modular: Callable[[float], float], hi: float, pplus: float, tol: float) -> NormResult:
        """Bisect modular(lam) = 1 on a bracket grown from `hi`."""
        expansions = 0
        while modular(hi) > 1.0:
            hi *= 2.0
            expansions += 1
            if expansions > self.bracket_cap:
                raise NonConvergenceError("Upper bracket expansion exceeded its cap", bracket=(0.0, hi))
        lo = hi / 2.0
        while modular(lo) <= 1.0:
            hi = lo
            lo /= 2.0
            expansions += 1
            if expansions > self.bracket_cap:
                raise NonConvergenceError("Lower bracket expansion exceeded its cap", bracket=(lo, hi))
        if expansions > 8:
            log_numeric_warning("bracket_expansion", {"expansions": expansions, "bracket": (lo, hi)})

        if modular(hi) == 1.0:
            return NormResult(value=hi, modular_at_value=1.0, iterations=0, tol=tol)

        xtol = tol * lo / (2.0 * pplus)
        root, info = bisect(lambda lam: modular(lam) - 1.0, lo, hi, xtol=xtol, rtol=_RTOL,
                            maxiter=self.max_iter, full_output=True, disp=False)
        if not info.converged:
            raise NonConvergenceError(f"Bisection did not converge in {self.max_iter} iterations", bracket=(lo, hi))

        at_root = modular(root)
        if abs(at_root - 1.0) > tol:
            logger.debug(f"Modular residual {abs(at_root - 1.0)} above tolerance {tol}; bracket ({lo}, {hi})")
            raise NonConvergenceError(f"Modular residual {abs(at_root - 1.0)} exceeds tolerance", bracket=(lo, hi))
        return NormResult(value=float(root), modular_at_value=at_root, iterations=info.iterations, tol=tol)
