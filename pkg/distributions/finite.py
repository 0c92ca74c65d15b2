"""
Finite-N distribution functions of half-space exponential LPP

    cdf_two_param          P(L^pf <= s) = pf(J - K) for the two-parameter model
    cdf_stationary_finite  P(L <= s) = d/ds G(s) for the stationary model, with
                           G(s) = pf(J - K-bar) [e^alpha(s) - <(-g1, g2)|(1 - J^-1 K-bar)^-1 (-h1, h2)>]
    shift_check            (1 + (alpha+beta)^-1 d/ds) P(L^pf <= s) against Monte Carlo of L^pf - w_11
    continuation_check     beta -> -alpha limit of the shifted two-parameter formula
"""
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from models.params import ContourSettings, FiniteParams, GridSettings, ModelParams, WeightMode
from models.results import CheckResult, CurvePoint, DistributionCurve
from numerics.pfaffian import QuadratureGrid, bracket_pf, fredholm_pf, make_graded_grid, make_grid
from kernels.finite import FiniteKernel, core_length, cutoff, finite_border
from distributions.derivatives import CachedFunction, derivative
from utils.exceptions import ParameterDomainError
from utils.settings import DEFAULT_SETTINGS, NumericsSettings, resolve_threads
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)

LARGE_N = 20
ILL_CONDITIONED_EPS = 1e-4
# nodes of the comparison grid used for the per-point error estimate
COARSE_FRACTION = 2.0 / 3.0


def fluctuation_scale(N: int) -> float:
    return 2.0 ** (4.0 / 3.0) * N ** (1.0 / 3.0)


def contour_settings_for(p: FiniteParams, settings: Optional[ContourSettings] = None) -> ContourSettings:
    """Explicit settings win; large N gets circles pushed towards the saddle point"""
    if settings is not None:
        return settings
    return ContourSettings.for_large_n() if p.N >= LARGE_N else ContourSettings()


def grid_lengths(kern: FiniteKernel, s: float, numerics: NumericsSettings,
                 grid: Optional[GridSettings] = None) -> Tuple[float, float]:
    """(cutoff T, core length) for L^2(s, s + T)"""
    grid = grid or GridSettings()
    T = grid.cutoff or cutoff(kern.p, s, kern.decay, numerics)
    return T, min(core_length(kern.p, s, numerics), T)


def finite_grid(kern: FiniteKernel, s: float, lengths: Tuple[float, float], nodes: int) -> QuadratureGrid:
    """Balanced and conjugated grid; graded when the exponential tail is much longer than the core"""
    T, core = lengths
    if T > 1.5 * core:
        g = make_graded_grid(s, core, T, nodes)
    else:
        g = make_grid(s, T, nodes)
    return g.balanced(kern.conj_exponent, kern.balance)


def evaluate_points(func: Callable[[float], CurvePoint], s_values: Sequence[float],
                    threads: Optional[int]) -> List[CurvePoint]:
    workers = min(resolve_threads(threads), max(1, len(s_values)))
    if workers == 1:
        return [func(s) for s in s_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, s_values))


def _check_s_grid(s_values: Sequence[float]) -> List[float]:
    s_values = sorted(float(s) for s in s_values)
    errors = [f"s must be >= 0, got {s}" for s in s_values if s < 0]
    if not s_values:
        errors.append("s-grid is empty")
    if errors:
        raise ParameterDomainError("Invalid s-grid", errors=errors)
    return s_values


# ----------------------------------------------------------------------
# two-parameter model

def pf_two_param(s: float, kern: FiniteKernel, numerics: NumericsSettings = DEFAULT_SETTINGS,
                 grid: Optional[GridSettings] = None,
                 lengths: Optional[Tuple[float, float]] = None) -> float:
    """pf(J - K) on L^2(s, infinity) for a kernel built in "int" mode"""
    grid = grid or GridSettings()
    lengths = lengths or grid_lengths(kern, s, numerics, grid)
    nodes = grid.nodes or numerics.finite_grid_nodes
    return fredholm_pf(kern, finite_grid(kern, s, lengths, nodes))


def cdf_two_param(
    s_values: Sequence[float],
    p: FiniteParams,
    settings: Optional[ContourSettings] = None,
    grid: Optional[GridSettings] = None,
    numerics: NumericsSettings = DEFAULT_SETTINGS,
    threads: Optional[int] = None,
    continuation: bool = False,
) -> DistributionCurve:
    """
    P(L^pf_{N,N-n} <= s) on a grid of s-values

    Args:
        s_values: Points s >= 0
        p: Two-parameter model parameters, beta in (0, 1/2)
        settings: Contour settings, default picked by N
        grid: Grid overrides (nodes, cutoff)
        numerics: Numerical defaults
        threads: Worker count for the s-points
        continuation: Accept beta <= 0 with alpha + beta > 0

    Returns:
        DistributionCurve whose err compares against a grid with two thirds of the nodes

    Raises:
        ParameterDomainError: If parameters or s-values are out of range
    """
    s_values = _check_s_grid(s_values)
    grid = grid or GridSettings()
    kern = FiniteKernel(p, "int", contour_settings_for(p, settings), numerics, continuation=continuation)
    nodes = grid.nodes or numerics.finite_grid_nodes
    coarse = max(8, int(round(COARSE_FRACTION * nodes)))

    def point(s: float) -> CurvePoint:
        lengths = grid_lengths(kern, s, numerics, grid)
        value = fredholm_pf(kern, finite_grid(kern, s, lengths, nodes))
        rough = fredholm_pf(kern, finite_grid(kern, s, lengths, coarse))
        return CurvePoint(s=s, F=value, err=abs(value - rough))

    points = evaluate_points(point, s_values, threads)
    logger.info(f"Two-parameter CDF: N={p.N}, n={p.n}, alpha={p.alpha}, beta={p.beta}, {len(points)} points")
    return DistributionCurve(
        params=ParameterValidator.describe(p),
        method={"formula": "two_param", "grid_nodes": nodes, "contour": kern.settings.model_dump(),
                "conj_exponent": kern.conj_exponent},
        points=points,
    )


# ----------------------------------------------------------------------
# stationary model

def stationary_G(
    s: float,
    kern: FiniteKernel,
    numerics: NumericsSettings = DEFAULT_SETTINGS,
    grid: Optional[GridSettings] = None,
    lengths: Optional[Tuple[float, float]] = None,
) -> Tuple[float, float]:
    """
    (pf(J - K-bar), G(s)) for a kernel built in "limit" mode

    The bracket is obtained as a difference of two Fredholm Pfaffians, no
    resolvent is formed.
    """
    grid = grid or GridSettings()
    lengths = lengths or grid_lengths(kern, s, numerics, grid)
    g = finite_grid(kern, s, lengths, grid.nodes or numerics.finite_grid_nodes)
    border = finite_border(s, kern.p, g, kern.settings)
    base, bracketed = bracket_pf(kern, border.left, border.right, g)
    return base, base * border.scalar - bracketed


def derivative_step(p: FiniteParams, numerics: NumericsSettings, grid: Optional[GridSettings] = None) -> float:
    if grid is not None and grid.deriv_step:
        return grid.deriv_step
    return numerics.deriv_step * fluctuation_scale(p.N)


def cdf_stationary_finite(
    s_values: Sequence[float],
    p: FiniteParams,
    settings: Optional[ContourSettings] = None,
    grid: Optional[GridSettings] = None,
    numerics: NumericsSettings = DEFAULT_SETTINGS,
    threads: Optional[int] = None,
) -> DistributionCurve:
    """
    P(L_{N,N-n} <= s) for the stationary model

    The truncation of L^2(s, infinity) is fixed at the central point of each
    stencil so that G is differentiated as one smooth function.

    Raises:
        ParameterDomainError: If beta is given or the parameters are out of range
    """
    s_values = _check_s_grid(s_values)
    if p.beta is not None:
        raise ParameterDomainError("Stationary CDF takes no beta", errors=[f"beta={p.beta}"])
    grid = grid or GridSettings()
    kern = FiniteKernel(p, "limit", contour_settings_for(p, settings), numerics)
    h = derivative_step(p, numerics, grid)
    unstable: List[float] = []

    def point(s: float) -> CurvePoint:
        lengths = grid_lengths(kern, s, numerics, grid)
        G = CachedFunction(lambda t: stationary_G(t, kern, numerics, grid, lengths)[1])
        d = derivative(G, s, h, richardson=grid.richardson, budget=numerics.richardson_budget,
                       where="stationary G")
        if d.unstable:
            unstable.append(s)
        return CurvePoint(s=s, F=d.value, err=d.err)

    points = evaluate_points(point, s_values, threads)
    logger.info(f"Stationary CDF: N={p.N}, n={p.n}, alpha={p.alpha}, {len(points)} points, h={h:.4g}")
    return DistributionCurve(
        params=ParameterValidator.describe(p),
        method={"formula": "stationary_finite", "grid_nodes": grid.nodes or numerics.finite_grid_nodes,
                "deriv_step": h, "richardson": grid.richardson, "contour": kern.settings.model_dump(),
                "conj_exponent": kern.conj_exponent, "unstable_points": sorted(unstable)},
        points=points,
    )


def curve_mean(curve: DistributionCurve, lower: float = 0.0) -> float:
    """
    Mean of a distribution supported on [lower, infinity) from its CDF values

    E = lower + int_lower^inf (1 - F), trapezoidal on the curve grid, assuming
    F = 0 below the first point.
    """
    s = np.array([lower] + curve.s_values)
    F = np.clip(np.array([0.0] + curve.F_values), 0.0, 1.0)
    return float(lower + trapezoid(1.0 - F, s))


# ----------------------------------------------------------------------
# consistency checks

def shift_check(
    s_values: Sequence[float],
    p: FiniteParams,
    samples: int = 1_000_000,
    seed: int = 0,
    tolerance: float = 0.006,
    settings: Optional[ContourSettings] = None,
    grid: Optional[GridSettings] = None,
    numerics: NumericsSettings = DEFAULT_SETTINGS,
    threads: Optional[int] = None,
) -> CheckResult:
    """
    Sup-distance between (1 + (alpha+beta)^-1 d/ds) pf(J - K) and the empirical CDF of L^pf - w_11

    s = 0 is left out of the supremum: the identity picks up a boundary term there.
    """
    from simulation.lpp_sim import sample_cdf

    ParameterValidator.validate_finite(p, require_beta=True)
    s_values = [s for s in _check_s_grid(s_values) if s > 0.0]
    grid = grid or GridSettings()
    kern = FiniteKernel(p, "int", contour_settings_for(p, settings), numerics)
    h = derivative_step(p, numerics, grid)
    rate = p.alpha + p.beta

    left, errs = [], []
    for s in s_values:
        lengths = grid_lengths(kern, s, numerics, grid)
        pf_at = CachedFunction(lambda t: pf_two_param(t, kern, numerics, grid, lengths))
        d = derivative(pf_at, s, h, richardson=grid.richardson, budget=numerics.richardson_budget,
                       where="two-parameter pf")
        left.append(pf_at(s) + d.value / rate)
        errs.append(d.err / rate)

    model = ModelParams(mode=WeightMode.TWO_PARAM, N=p.N, n=p.n, alpha=p.alpha, beta=p.beta)
    mc = sample_cdf(model, "L_pf_minus_corner", samples, seed, grid=s_values, threads=threads)
    gaps = np.abs(np.array(left) - np.array(mc.empirical_cdf))
    sup = float(gaps.max()) if gaps.size else 0.0
    logger.info(f"Shift identity: sup-distance {sup:.4g} over {len(s_values)} points "
                f"(DKW band {mc.dkw_band:.3g})")
    return CheckResult(
        check="shift_identity",
        status="pass" if sup <= tolerance else "fail",
        value=sup,
        tolerance=tolerance,
        details=f"max derivative error {max(errs, default=0.0):.3g}, DKW band {mc.dkw_band:.3g}",
    )


def continuation_check(
    s: float,
    p: FiniteParams,
    eps_values: Sequence[float] = (2e-2, 1e-2, 5e-3),
    settings: Optional[ContourSettings] = None,
    grid: Optional[GridSettings] = None,
    numerics: NumericsSettings = DEFAULT_SETTINGS,
) -> CheckResult:
    """
    Convergence of (1 + eps^-1 d/ds) pf(J - K(alpha, -alpha + eps)) to the stationary CDF

    Args:
        s: Evaluation point
        p: Stationary parameters (beta is ignored)
        eps_values: Positive, strictly decreasing distances alpha + beta

    Returns:
        CheckResult with the last difference as value; passes when the
        differences decrease with an empirical order between 0.5 and 1.5.
        Steps below 1e-4 amplify derivative noise by 1/eps and are flagged.
    """
    eps_values = [float(e) for e in eps_values]
    errors = []
    if len(eps_values) < 2:
        errors.append("need at least two eps values")
    if any(e <= 0 for e in eps_values):
        errors.append("eps values must be positive")
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        errors.append("eps values must be strictly decreasing")
    if errors:
        raise ParameterDomainError("Invalid continuation sequence", errors=errors)

    p = p.stationary()
    grid = grid or GridSettings()
    target = cdf_stationary_finite([s], p, settings, grid, numerics, threads=1).points[0].F
    h = derivative_step(p, numerics, grid)

    diffs, flagged = [], []
    for eps in eps_values:
        q = p.with_beta(-p.alpha + eps)
        kern = FiniteKernel(q, "int", contour_settings_for(q, settings), numerics, continuation=True)
        lengths = grid_lengths(kern, s, numerics, grid)
        pf_at = CachedFunction(lambda t: pf_two_param(t, kern, numerics, grid, lengths))
        d = derivative(pf_at, s, h, richardson=grid.richardson, budget=numerics.richardson_budget,
                       where="continuation pf")
        value = pf_at(s) + d.value / eps
        if eps < ILL_CONDITIONED_EPS or d.err / eps > numerics.richardson_budget / ILL_CONDITIONED_EPS:
            flagged.append(eps)
            logger.warning(f"eps={eps:g}: 1/eps amplification makes the shifted formula ill-conditioned")
        diffs.append(abs(value - target))
        logger.debug(f"continuation eps={eps:g}: value {value:.8g}, target {target:.8g}")

    orders = [
        math.log(a / b) / math.log(ea / eb)
        for (a, b), (ea, eb) in zip(zip(diffs, diffs[1:]), zip(eps_values, eps_values[1:]))
        if a > 0 and b > 0
    ]
    order = float(np.mean(orders)) if orders else float("nan")
    ok = all(b < a for a, b in zip(diffs, diffs[1:])) and 0.5 <= order <= 1.5 and not flagged
    details = (f"differences {', '.join(f'{d:.3g}' for d in diffs)}; order {order:.3g}"
               + (f"; ill-conditioned at eps {flagged}" if flagged else ""))
    logger.info(f"Continuation check at s={s:g}, alpha={p.alpha}: {details}")
    return CheckResult(check="continuation", status="pass" if ok else "fail",
                       value=diffs[-1], tolerance=None, details=details)
