import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from vexleb.core.config import settings
from vexleb.core.errors import (
    DomainError, EmptyFamilyError, InapplicableError, ParameterError, ResolutionError, TheoremAssertionError,
)
from vexleb.core.quadrature import conjugate
from vexleb.schemas.grid import ExponentField, Grid1D, Grid2D, GridFunction, Rectangle, as_exponent_field
from vexleb.schemas.reports import (
    BlowupSeries, ComparisonReport, ConditionReport, RatioReport, SandwichReport,
)
from vexleb.services import generators
from vexleb.services.conditions import ConditionService
from vexleb.services.families import RectFamily
from vexleb.services.fixtures import PowerWeightFixture, TwoWeightData, cor35_exponent, cor35_weight
from vexleb.services.norms import NormService
from vexleb.services.operators import OperatorService
from vexleb.utils.logging import log_experiment, log_numeric_warning
from vexleb.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

OPERATORS = ("hardy1", "hardy_average", "hardy2", "double_average", "fractional_maximal", "strong_maximal")

Exponent = Union[float, ExponentField]

# Default relative slack on sandwich and stability assertions
DEFAULT_TOLERANCE = 0.05

BLOWUP_TAUS = tuple(2.0 ** -k for k in range(2, 10))
# y positions are fractions of the y side; a short side keeps the strip masses in the
# regime where the larger exponent dominates each Luxemburg norm for every tau
BLOWUP_GEOMETRY = {"x0": 1.0, "a": 0.1, "b": 0.4, "c": 0.6, "d": 0.9, "split": 0.5,
                   "domain": [0.0, 2.0, 0.0, 2.0 ** -12]}


def _truncation(grid) -> List[float]:
    return Rectangle.of_grid(grid).as_list(2 if isinstance(grid, Grid2D) else 1)


def _resolution(grid) -> List[int]:
    return [grid.x.n, grid.y.n] if isinstance(grid, Grid2D) else [grid.n]


def _edge_index(axis: Grid1D, x: float) -> int:
    return int(round((x - axis.lo) / axis.h))


def averaging_constant(lo: float, hi: float) -> float:
    """
    Sharp L^2 constant of f -> (1/x) int_lo^x f on (lo, hi).

    Equals 1 / sqrt(k^2 + 1/4) with k the least positive root of tan(k L) = -2k,
    L = ln(hi / lo); it increases to 2 as hi / lo grows.
    """
    if not 0.0 < lo < hi:
        raise ParameterError(f"Need 0 < lo < hi, got {lo}, {hi}")
    span = math.log(hi / lo)
    k = brentq(lambda t: math.sin(t * span) + 2.0 * t * math.cos(t * span), math.pi / (2.0 * span), math.pi / span)
    return 1.0 / math.sqrt(k * k + 0.25)


def _estimate_details(op: str, p: Exponent, q: Exponent, grid, families: Sequence[str]) -> dict:
    details = {"families": list(families)}
    if op == "hardy_average" and p == 2.0 and q == 2.0 and grid.lo > 0:
        details["sharp_constant"] = averaging_constant(grid.lo, grid.hi)
    return details


class ExperimentService:
    """End-to-end drivers: empirical operator norms, sandwiches, theorem checks and the blow-up series."""

    def __init__(self, norms: Optional[NormService] = None, operators: Optional[OperatorService] = None,
                 conditions: Optional[ConditionService] = None, threads: Optional[int] = None,
                 tolerance: float = DEFAULT_TOLERANCE):
        self.norms = norms or NormService()
        self.operators = operators or OperatorService(self.norms)
        self.conditions = conditions or ConditionService(self.norms, self.operators)
        self.threads = threads
        self.tolerance = tolerance

    # ------------------------------------------------------------------ empirical operator norms

    def apply(self, op: str, f: GridFunction, options: Optional[dict] = None) -> GridFunction:
        options = options or {}
        if op == "hardy1":
            return self.operators.hardy1(f)
        if op == "hardy_average":
            return self.operators.hardy_average(f)
        if op == "hardy2":
            return self.operators.hardy2(f)
        if op == "double_average":
            return self.operators.double_average(f)
        if op == "fractional_maximal":
            return self.operators.fractional_maximal_1d(f, options.get("alpha", 0.0), options.get("family"))
        if op == "strong_maximal":
            return self.operators.strong_fractional_maximal(f, options.get("alpha", 0.0), options.get("beta", 0.0),
                                                            options.get("family"))
        raise ParameterError(f"Unknown operator '{op}'; expected one of {OPERATORS}")

    def test_functions(self, grid, families: Sequence[str], trials: int, seed: int, p: float,
                       necessity_weight: Optional[GridFunction] = None, extra_edges: Sequence[int] = ()) -> List[Tuple[str, GridFunction]]:
        out = []
        for family in families:
            if family == "random":
                out += generators.random_family(grid, trials, seed)
            elif family == "indicators":
                out += generators.corner_indicators(grid) if isinstance(grid, Grid2D) else generators.interval_indicators(grid)
            elif family == "power":
                if isinstance(grid, Grid2D):
                    logger.debug("Power bumps are 1-D only; skipped on a 2-D grid")
                    continue
                out += generators.power_bumps(grid, p)
            elif family == "necessity":
                if necessity_weight is None or isinstance(grid, Grid2D):
                    logger.debug("Necessity family needs a 1-D measure weight; skipped")
                    continue
                out += generators.necessity_1d(necessity_weight, p, extra_edges=extra_edges)
            else:
                raise ParameterError(f"Unknown generator family '{family}'; expected one of {generators.FAMILIES}")
        return out

    def estimate_operator_norm(self, op: str, p: Exponent, q: Exponent, v: Optional[GridFunction] = None,
                               w: Optional[GridFunction] = None, families: Sequence[str] = ("random", "indicators", "power"),
                               trials: int = 16, seed: int = 0, grid=None, functions: Optional[List[Tuple[str, GridFunction]]] = None,
                               necessity_weight: Optional[GridFunction] = None, extra_edges: Sequence[int] = (),
                               options: Optional[dict] = None, bound_low: float = 0.0, bound_high: float = math.inf) -> RatioReport:
        """
        Ratios ||(op f) v||_{q(.)} / ||f w||_{p(.)} over a generated family of test functions.

        v and w multiply the functions pointwise (unit when omitted). The maximum is a
        lower bound for the operator's best constant at this resolution.
        """
        grid = grid or (v.grid if v is not None else w.grid if w is not None else None)
        if grid is None:
            raise ParameterError("A grid (or a weight carrying one) is required")
        v = v if v is not None else GridFunction.constant(grid, 1.0)
        w = w if w is not None else GridFunction.constant(grid, 1.0)
        if v.grid != grid or w.grid != grid:
            raise DomainError("Weights live on different grids")
        p_field = as_exponent_field(p, grid)
        p_scalar = p_field.pminus
        candidates = self.test_functions(grid, families, trials, seed, p_scalar, necessity_weight, extra_edges)
        candidates += list(functions or [])

        def ratio(item):
            _, f = item
            source = self.norms.luxemburg_norm(f * w, p).value
            if source == 0:
                return None
            return self.norms.luxemburg_norm(self.apply(op, f, options) * v, q).value / source

        values = parallel_map(ratio, candidates, self.threads)
        kept = [(label, r) for (label, _), r in zip(candidates, values) if r is not None]
        skipped = len(candidates) - len(kept)
        if skipped:
            logger.debug(f"Skipped {skipped} test functions with zero source norm")
        if not kept:
            raise EmptyFamilyError("Every test function has zero source norm")
        labels = [label for label, _ in kept]
        ratios = [float(r) for _, r in kept]
        k = int(np.argmax(ratios))
        report = RatioReport(operator=op, ratios=ratios, labels=labels, max_ratio=ratios[k], argmax=labels[k],
                             bound_low=bound_low, bound_high=bound_high, trials=trials, seed=seed,
                             generator_version=generators.generator_version(), skipped=skipped,
                             resolution=_resolution(grid), truncation=_truncation(grid),
                             details=_estimate_details(op, p, q, grid, families))
        log_experiment("estimate_operator_norm", {"operator": op, "max_ratio": report.max_ratio, "count": len(ratios)}, level="DEBUG")
        return report

    # ------------------------------------------------------------------ Hardy sandwiches

    def hardy_sandwich(self, v: GridFunction, w: GridFunction, p: float, q: float, trials: int = 8, seed: int = 0,
                       verdict: Optional[ConditionReport] = None) -> SandwichReport:
        """
        A_M and A_PS against the empirical constant of H1 from L^p_w to L^q_v (v, w measure weights).

        Upper comparisons are hard assertions; lower ones only grade the test family.
        """
        if not 1.0 < p <= q < math.inf:
            raise ParameterError(f"Sandwich needs 1 < p <= q < inf, got p = {p}, q = {q}")
        if verdict is not None and verdict.verdict == "non-finite":
            raise InapplicableError(f"A_M is classified non-finite (growth {verdict.details.get('growth')})")
        am = self.conditions.muckenhoupt_am(v, w, p, q)
        if not math.isfinite(am.value):
            raise InapplicableError("A_M is infinite on this fixture")
        aps = self.conditions.persson_stepanov_aps(v, w, p, q)
        pp = conjugate(p)
        upper_m = (1.0 + q / pp) ** (1.0 / q) * (1.0 + pp / q) ** (1.0 / pp) * am.value
        upper_ps = pp * aps.value

        grid: Grid1D = v.grid
        ratios = self.estimate_operator_norm(
            "hardy1", p, q, v=v.power(1.0 / q), w=w.power(1.0 / p),
            families=("random", "indicators", "power", "necessity"), trials=trials, seed=seed,
            necessity_weight=w, extra_edges=[_edge_index(grid, am.arg["x"])],
            bound_low=max(am.value, aps.value), bound_high=min(upper_m, upper_ps),
        )
        c_emp = ratios.max_ratio
        tol = self.tolerance
        if c_emp > upper_m * (1.0 + tol):
            raise TheoremAssertionError(f"Empirical constant {c_emp:.6g} exceeds the A_M upper bound {upper_m:.6g}",
                                        c_emp=c_emp, bound=upper_m)
        if c_emp > upper_ps * (1.0 + tol):
            raise TheoremAssertionError(f"Empirical constant {c_emp:.6g} exceeds p' A_PS = {upper_ps:.6g}",
                                        c_emp=c_emp, bound=upper_ps)
        lower_m_ok = am.value * (1.0 - tol) <= c_emp
        lower_ps_ok = aps.value * (1.0 - tol) <= c_emp
        if not (lower_m_ok and lower_ps_ok):
            log_numeric_warning("weak_test_family", {"c_emp": c_emp, "a_m": am.value, "a_ps": aps.value})
        conditions = [am, aps] + ([verdict] if verdict is not None else [])
        report = SandwichReport(a_m=am.value, a_ps=aps.value, c_emp=c_emp, upper_m=upper_m, upper_ps=upper_ps,
                                lower_m_ok=lower_m_ok, lower_ps_ok=lower_ps_ok, p=p, q=q, ratios=ratios,
                                conditions=conditions)
        log_experiment("hardy_sandwich", {"a_m": am.value, "a_ps": aps.value, "c_emp": c_emp})
        return report

    def sandwich_fixture(self, fixture: PowerWeightFixture, n: int, trials: int = 8, seed: int = 0) -> SandwichReport:
        """Classify A_M with the refinement policy, then run the sandwich at resolution n."""
        p, q = fixture.p, fixture.q
        verdict = self.conditions.assess_finiteness(
            lambda cells, scale: self.conditions.muckenhoupt_am(*fixture.build(cells, scale), p, q), n)
        if verdict.verdict == "non-finite":
            raise InapplicableError(f"A_M on fixture '{fixture.name}' is classified non-finite",
                                    growth=verdict.details.get("growth"))
        v, w = fixture.build(n)
        return self.hardy_sandwich(v, w, p, q, trials, seed, verdict)

    # ------------------------------------------------------------------ two-dimensional Hardy operator

    def verify_averaged_hardy(self, w: GridFunction, p: float, trials: int = 8, seed: int = 0) -> RatioReport:
        """
        ||(H1 f / sigma[lo, x]) sigma^{1/p}||_p / ||f w||_p with sigma = w^{-p'}.

        bound_high is (1 + p/p')^{1/p} (1 + p'/p)^{1/p'} times the sufficiency-integral supremum to the 1/p.
        """
        if w.dim != 1:
            raise DomainError("The averaged Hardy inequality is one-dimensional")
        pp = conjugate(p)
        sigma = w.with_values(w.values ** -pp)
        cumulative = self.operators.hardy1(sigma)
        target = w.with_values(sigma.values ** (1.0 / p) / cumulative.values)
        sufficiency = self.conditions.lemma31_sufficiency(w, p)
        bound = (1.0 + p / pp) ** (1.0 / p) * (1.0 + pp / p) ** (1.0 / pp) * sufficiency.value ** (1.0 / p)
        report = self.estimate_operator_norm("hardy1", p, p, v=target, w=w, families=("random", "indicators", "necessity"),
                                             trials=trials, seed=seed, necessity_weight=w.power(p), bound_high=bound)
        if not all(math.isfinite(r) for r in report.ratios):
            raise TheoremAssertionError("The averaged Hardy inequality produced a non-finite ratio")
        within = report.max_ratio <= bound * (1.0 + self.tolerance)
        if not within:
            log_numeric_warning("averaged_hardy_bound", {"max_ratio": report.max_ratio, "bound": bound})
            raise TheoremAssertionError(f"Averaged Hardy ratio {report.max_ratio:.6g} exceeds its bound {bound:.6g}",
                                        max_ratio=report.max_ratio, bound=bound)
        return report.model_copy(update={"details": dict(report.details, sufficiency=sufficiency.value, within_bound=within)})

    def theorem31_ratios(self, data: TwoWeightData, trials: int, seed: int, corners: int = 4) -> RatioReport:
        grid = data.grid
        necessity = []
        for j in generators.edge_indices(grid.y.n, corners):
            for i in generators.edge_indices(grid.x.n, corners):
                f = generators.necessity_2d(data.w1, data.w2, data.p, i, j)
                necessity.append((f"necessity:a={grid.x.edge(i):.6g},b={grid.y.edge(j):.6g}", f))
        return self.estimate_operator_norm("hardy2", data.p, data.q, v=data.v, w=data.product_weight(),
                                           families=("random", "indicators"), trials=trials, seed=seed,
                                           functions=necessity)

    def necessity_ratio(self, data: TwoWeightData, i: int, j: int) -> float:
        """Ratio of the proof's test function with the target norm restricted to [a, X] x [b, Y]."""
        grid = data.grid
        if i >= grid.x.n or j >= grid.y.n or i == 0 or j == 0:
            return 0.0
        f = generators.necessity_2d(data.w1, data.w2, data.p, i, j)
        source = self.norms.luxemburg_norm(f * data.product_weight(), data.p).value
        tail = Rectangle(x0=grid.x.edge(i), x1=grid.x.hi, y0=grid.y.edge(j), y1=grid.y.hi)
        target = self.norms.luxemburg_norm(self.operators.hardy2(f) * data.v, data.q, region=tail).value
        return target / source

    def verify_theorem_31(self, fixture: Callable[[int], TwoWeightData], n: int, trials: int = 8, seed: int = 0,
                          corners: int = 8) -> RatioReport:
        """
        Two-weight H2 ratios at n and 2n against condition B.

        Asserts finite ratios with < 10% drift under refinement, that the proof's test
        function reproduces B at B's maximizer, and that the restricted necessity ratios
        peak within one cell of it.
        """
        data = fixture(n)
        base = self.theorem31_ratios(data, trials, seed)
        refined = self.theorem31_ratios(fixture(2 * n), trials, seed)
        if not (math.isfinite(base.max_ratio) and math.isfinite(refined.max_ratio)):
            raise TheoremAssertionError("Two-weight ratios are not finite")
        drift = abs(refined.max_ratio / base.max_ratio - 1.0)
        if drift >= 0.10:
            raise TheoremAssertionError(f"max ratio drifts {drift:.3%} between N = {n} and N = {2 * n}", drift=drift)

        grid = data.grid
        b = self.conditions.condition_b(data.v, data.w1, data.w2, data.p, data.q)
        i_star, j_star = _edge_index(grid.x, b.arg["a"]), _edge_index(grid.y, b.arg["b"])
        at_star = self.necessity_ratio(data, i_star, j_star)
        rel_error = abs(at_star / b.value - 1.0) if b.value > 0 else 0.0
        if rel_error > self.tolerance:
            raise TheoremAssertionError(f"Necessity ratio {at_star:.6g} misses B = {b.value:.6g} by {rel_error:.3%}")

        scan = {(i, j) for i in generators.edge_indices(grid.x.n, corners) for j in generators.edge_indices(grid.y.n, corners)}
        scan.add((i_star, j_star))
        scanned = sorted(scan)
        values = parallel_map(lambda ij: self.necessity_ratio(data, *ij), scanned, self.threads)
        i_best, j_best = scanned[int(np.argmax(values))]
        if abs(i_best - i_star) > 1 or abs(j_best - j_star) > 1:
            raise TheoremAssertionError(f"Necessity ratios peak at cell ({i_best}, {j_best}), B at ({i_star}, {j_star})")

        inequality = self.verify_averaged_hardy(data.w1, data.p, trials, seed)
        details = dict(base.details, B=b.value, B_arg=b.arg, necessity_ratio=at_star, necessity_rel_error=rel_error,
                       necessity_peak={"a": grid.x.edge(i_best), "b": grid.y.edge(j_best)},
                       refined_max_ratio=refined.max_ratio, drift=drift,
                       averaged_hardy={"max_ratio": inequality.max_ratio, "bound_high": inequality.bound_high,
                                      "within_bound": inequality.details["within_bound"]})
        log_experiment("verify_theorem_31", {"B": b.value, "max_ratio": base.max_ratio, "drift": drift})
        return base.model_copy(update={"details": details, "bound_high": math.inf, "bound_low": 0.0})

    def verify_corollary_35(self, n: int = 64, trials: int = 50, seed: int = 0) -> ConditionReport:
        """Finite verdict for the trace supremum of (xy)^{-1} plus bounded double-average ratios."""

        def evaluate(cells: int, scale: float) -> ConditionReport:
            p = cor35_exponent(cells)
            return self.conditions.trace_condition_31(cor35_weight(cells), p, p, anchor=(0.0, 0.0))

        report = self.conditions.assess_finiteness(evaluate, n, box_fixed=True)
        if report.verdict != "finite":
            raise TheoremAssertionError(f"Trace supremum for (xy)^-1 classified {report.verdict}", growth=report.details["growth"])

        p = cor35_exponent(n)
        grid = p.grid

        def ratio(trial: int) -> float:
            f = generators.random_positive(grid, seed, trial)
            return self.norms.luxemburg_norm(self.operators.double_average(f), p).value / self.norms.luxemburg_norm(f, p).value

        ratios = parallel_map(ratio, range(trials), self.threads)
        if not all(math.isfinite(r) for r in ratios):
            raise TheoremAssertionError("Double-average ratio is not finite")
        details = dict(report.details, ratio_max=max(ratios), ratio_trials=trials, seed=seed,
                       anchor_exponent=p.value_at((0.0, 0.0)))
        log_experiment("verify_corollary_35", {"value": report.value, "ratio_max": max(ratios)})
        return report.model_copy(update={"details": details})

    # ------------------------------------------------------------------ blow-up of the rectangle condition

    def blowup_series(self, p1: float, p2: float, alpha: float = 0.0, geometry: Optional[dict] = None,
                      taus: Sequence[float] = BLOWUP_TAUS, n: int = 4096, tolerance: float = 0.03) -> BlowupSeries:
        """
        A_tau = |Q_tau|^{alpha-1} ||chi_Q||_{q} ||chi_Q||_{p'} on Q_tau = (x0 - tau, x0 + tau) x (a, d)
        for an exponent equal to p1 below the split line and p2 above it.

        a, b, c, d and split are fractions of the y side. The fitted slope of log A_tau
        is asserted within `tolerance` of 1/p2 - 1/p1. The sub-rectangle lower bound
        |Q_tau|^{alpha-1} ||chi_{Q2}||_{q} ||chi_{Q1}||_{p'} is reported with its own slope.
        """
        if not 1.0 < p1 <= p2 < math.inf:
            raise ParameterError(f"Need 1 < p1 <= p2 < inf, got {p1}, {p2}")
        if not 0.0 <= alpha < 1.0 / p2:
            raise ParameterError(f"Need 0 <= alpha < 1/p2, got {alpha}")
        geo = dict(BLOWUP_GEOMETRY, **(geometry or {}))
        x_lo, x_hi, y_lo, y_hi = geo["domain"]
        xs, ys = Grid1D(lo=x_lo, hi=x_hi, n=n), Grid1D(lo=y_lo, hi=y_hi, n=n)
        taus = sorted((float(t) for t in taus), reverse=True)
        if taus[-1] < xs.h:
            raise ResolutionError(f"tau = {taus[-1]} is below the cell width {xs.h}")

        def q_of(p):
            return p / (1.0 - alpha * p)

        def y_at(fraction):
            return y_lo + fraction * ys.length

        q1, q2 = q_of(p1), q_of(p2)
        pc1, pc2 = conjugate(p1), conjugate(p2)
        ya, yb = ys.cell_range(y_at(geo["a"]), y_at(geo["b"]))
        yc, yd = ys.cell_range(y_at(geo["c"]), y_at(geo["d"]))
        split = ys.cell_range(y_lo, y_at(geo["split"]))[1]
        if not ya < yb <= split <= yc < yd:
            raise ParameterError(f"Need a < b <= split <= c < d on the y side, got {geo}")
        low_rows = (split - ya) * ys.h
        high_rows = (yd - split) * ys.h

        values, lower = [], []
        for tau in taus:
            i0, i1 = xs.cell_range(geo["x0"] - tau, geo["x0"] + tau)
            width = (i1 - i0) * xs.h
            s_low, s_high = width * low_rows, width * high_rows
            area = s_low + s_high
            norm_q = self.norms.norm_from_moments([s_low, s_high], [q1, q2]).value
            norm_pp = self.norms.norm_from_moments([s_low, s_high], [pc1, pc2]).value
            values.append(area ** (alpha - 1.0) * norm_q * norm_pp)
            q2_area = width * (yd - yc) * ys.h
            q1_area = width * (yb - ya) * ys.h
            lower.append(area ** (alpha - 1.0) * q2_area ** (1.0 / q2) * q1_area ** (1.0 / pc1))

        log_taus = np.log(taus)
        slope = float(np.polyfit(log_taus, np.log(values), 1)[0])
        lower_slope = float(np.polyfit(log_taus, np.log(lower), 1)[0])
        predicted = 1.0 / p2 - 1.0 / p1
        series = BlowupSeries(taus=taus, values=values, lower_bounds=lower, slope=slope, lower_slope=lower_slope,
                              predicted_slope=predicted, p1=p1, p2=p2, alpha=alpha, resolution=[n, n], geometry=geo)
        if abs(slope - predicted) > tolerance:
            raise TheoremAssertionError(f"Fitted slope {slope:.4f} of A_tau is not within {tolerance} of {predicted:.4f}",
                                        slope=slope, predicted=predicted)
        log_experiment("blowup_series", {"slope": slope, "lower_slope": lower_slope, "predicted": predicted})
        return series

    # ------------------------------------------------------------------ shifted dyadic comparison

    def verify_dyadic_comparison(self, f: GridFunction, alpha: float, beta: float, k: int,
                                 shift_samples: Optional[int] = None, seed: int = 0) -> ComparisonReport:
        """
        Minimal C with M^{S,(2^k)} f <= C * mean_{t,tau} S_{t,tau} f, shifts sampled on a
        uniform sub-grid of [-R, R)^2, R = 2^{k+2}, at two sampling densities.
        """
        if f.dim != 2:
            raise DomainError("The shifted comparison is two-dimensional")
        if np.any(f.values < 0):
            raise ParameterError("f must be non-negative")
        m = shift_samples or settings.shift_samples
        grid: Grid2D = f.grid
        radius = 2.0 ** (k + 2)
        top = 2.0 ** math.ceil(math.log2(max(2 * radius, grid.x.length, grid.y.length)))
        lhs = self.operators.strong_fractional_maximal(f, alpha, beta, RectFamily.size_capped(k)).values
        offset = float(np.random.default_rng(seed).random()) * radius / m

        def mean_shifted(samples: int) -> np.ndarray:
            shifts = [-radius + offset + i * 2 * radius / samples for i in range(samples)]
            pairs = [(t, tau) for tau in shifts for t in shifts]
            results = parallel_map(
                lambda pair: self.operators.strong_fractional_maximal(f, alpha, beta, RectFamily.shifted(*pair, max_length=top)).values,
                pairs, self.threads)
            total = np.zeros(grid.shape)
            for r in results:
                total += r
            return total / len(pairs)

        constants = []
        for samples in (m, 2 * m):
            rhs = mean_shifted(samples)
            live = lhs > 0
            if not np.any(live):
                constants.append(0.0)
            elif np.any(rhs[live] == 0):
                constants.append(math.inf)
            else:
                constants.append(float(np.max(lhs[live] / rhs[live])))

        if constants[0] == 0 and constants[1] == 0:
            drift = 0.0
        elif all(math.isfinite(c) and c > 0 for c in constants):
            drift = abs(constants[1] / constants[0] - 1.0)
        else:
            drift = math.inf
        finite = all(math.isfinite(c) for c in constants) and drift < 0.20
        report = ComparisonReport(constants=constants, shift_samples=[m, 2 * m], drift=drift, finite=finite, k=k,
                                  lattice_radius=radius, resolution=_resolution(grid),
                                  details={"alpha": alpha, "beta": beta, "largest_length": top, "offset": offset})
        if not finite:
            raise TheoremAssertionError(f"Comparison constant unstable: {constants} (drift {drift:.3%})", constants=constants)
        log_experiment("verify_dyadic_comparison", {"constants": constants, "drift": drift})
        return report
