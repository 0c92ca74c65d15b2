"""
The limiting family F^(delta,u) of stationary half-space LPP

F^(delta,u)(S) = d/dS G(S) with G(S) = pf(J - A-bar)[e^{delta,u}(S) - bracket],
the Fredholm Pfaffian taken over L^2(S, infinity). Moments come from G without
differentiating.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.params import AsympParams, ContourSettings, GridSettings
from models.results import CheckResult, CurvePoint, DistributionCurve
from numerics.pfaffian import QuadratureGrid, bracket_pf, fredholm_pf, make_grid
from kernels.asymptotic import VARIANTS, AsympKernel, asymp_border
from distributions.derivatives import CachedFunction, derivative
from distributions.finite import evaluate_points, cdf_stationary_finite
from utils.exceptions import NonFiniteIntegrandError, ParameterDomainError
from utils.settings import DEFAULT_SETTINGS, NumericsSettings
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)

TAIL_TOL = 1e-8
TAIL_STEP = 2.0
TAIL_LIMIT = 24.0
# left-tail values below this are taken as settled once they stop shrinking
LEFT_FLOOR = 1e-5
MOMENT_NODES = 48


def limit_grid(kern: AsympKernel, S: float, numerics: NumericsSettings = DEFAULT_SETTINGS,
               grid: Optional[GridSettings] = None) -> QuadratureGrid:
    grid = grid or GridSettings()
    T = grid.cutoff or max(numerics.asymp_cutoff, numerics.decay_target / kern.decay)
    g = make_grid(S, T, grid.nodes or numerics.asymp_grid_nodes)
    return g.balanced(kern.conj_exponent, kern.balance)


def pf_limit(S: float, p: AsympParams, settings: Optional[ContourSettings] = None,
             numerics: NumericsSettings = DEFAULT_SETTINGS, grid: Optional[GridSettings] = None) -> float:
    """pf(J - A-bar) on L^2(S, infinity), a number in (0, 1)"""
    kern = AsympKernel(p, settings, numerics)
    return fredholm_pf(kern, limit_grid(kern, S, numerics, grid))


def limit_G(
    S: float,
    kern: AsympKernel,
    variant: str = "standard",
    numerics: NumericsSettings = DEFAULT_SETTINGS,
    grid: Optional[GridSettings] = None,
) -> Tuple[float, float]:
    """(pf(J - A-bar), G(S)) for the kernel's (delta, u)"""
    g = limit_grid(kern, S, numerics, grid)
    border = asymp_border(S, kern.p, g, variant, kern.settings)
    base, bracketed = bracket_pf(kern, border.left, border.right, g)
    return base, base * border.scalar - bracketed


def _check_variant(p: AsympParams, variant: str) -> None:
    errors = []
    if variant not in VARIANTS:
        errors.append(f"variant must be one of {VARIANTS}, got {variant!r}")
    elif variant == "delta_neg" and p.delta >= 0:
        errors.append(f"delta_neg needs delta < 0, got {p.delta}")
    if p.u <= 0:
        errors.append(f"u must be positive, got {p.u}")
    if errors:
        raise ParameterDomainError("Invalid limit distribution request", errors=errors)


def cdf_limit(
    S_values: Sequence[float],
    p: AsympParams,
    variant: str = "standard",
    settings: Optional[ContourSettings] = None,
    grid: Optional[GridSettings] = None,
    numerics: NumericsSettings = DEFAULT_SETTINGS,
    threads: Optional[int] = None,
) -> DistributionCurve:
    """
    F^(delta,u)(S) on a grid of S-values

    Args:
        S_values: Rescaled thresholds
        p: Scaling parameters; p.S is ignored
        variant: "standard", or "delta_neg" for the simplified border functions at delta < 0

    Raises:
        ParameterDomainError: If u <= 0 or the variant does not fit delta
    """
    ParameterValidator.validate_asymp(p)
    _check_variant(p, variant)
    grid = grid or GridSettings()
    kern = AsympKernel(p, settings, numerics)
    h = grid.deriv_step or numerics.deriv_step_asymp
    unstable: List[float] = []

    def point(S: float) -> CurvePoint:
        G = CachedFunction(lambda t: limit_G(t, kern, variant, numerics, grid)[1])
        d = derivative(G, S, h, richardson=grid.richardson, budget=numerics.richardson_budget,
                       where=f"limit G ({variant})")
        if d.unstable:
            unstable.append(S)
        return CurvePoint(s=S, F=d.value, err=d.err)

    points = evaluate_points(point, sorted(float(S) for S in S_values), threads)
    logger.info(f"Limit CDF: delta={p.delta}, u={p.u}, variant={variant}, {len(points)} points")
    return DistributionCurve(
        params=ParameterValidator.describe(p),
        method={"formula": "limit", "variant": variant, "grid_nodes": grid.nodes or numerics.asymp_grid_nodes,
                "deriv_step": h, "conj_exponent": kern.conj_exponent, "contour": kern.settings.model_dump(),
                "unstable_points": sorted(unstable)},
        points=points,
    )


def _tail(G, start: float, step: float, done) -> Tuple[float, bool]:
    """Walks from start in steps until done(S) holds; returns the end point and whether it converged"""
    S = start
    while abs(S) <= TAIL_LIMIT:
        if done(S):
            return S, True
        S += step
    return S - step, False


def moments_limit(
    p: AsympParams,
    ell: int,
    variant: str = "standard",
    settings: Optional[ContourSettings] = None,
    grid: Optional[GridSettings] = None,
    numerics: NumericsSettings = DEFAULT_SETTINGS,
) -> float:
    """
    ell-th moment of F^(delta,u) from G alone

    With m1 = lim (S - G(S)) the mean, for ell >= 2
        E xi^ell = ell(ell-1) [int_0^inf S^{ell-2} (G(S) - S + m1) dS + int_-inf^0 S^{ell-2} G(S) dS].
    ell = 1 returns m1. Tails are cut where G, respectively G - S + m1, drop below 1e-8; on the left also
    where G, already below 1e-5, stops shrinking.
    """
    if ell < 1:
        raise ParameterDomainError("Moment order must be positive", errors=[f"ell={ell}"])
    ParameterValidator.validate_asymp(p)
    _check_variant(p, variant)
    kern = AsympKernel(p, settings, numerics)
    G = CachedFunction(lambda t: limit_G(t, kern, variant, numerics, grid)[1])

    right, ok_right = _tail(G, 4.0, TAIL_STEP,
                            lambda S: abs((S - G(S)) - (S + TAIL_STEP - G(S + TAIL_STEP))) < TAIL_TOL)
    m1 = right - G(right)
    if ell == 1:
        if not ok_right:
            logger.warning(f"Right tail of G not converged by S={right:g}; mean may be inaccurate")
        return float(m1)

    def left_settled(S: float) -> bool:
        g = abs(G(S))
        return g < TAIL_TOL or (g < LEFT_FLOOR and g >= abs(G(S + TAIL_STEP)))

    left, ok_left = _tail(G, -4.0, -TAIL_STEP, left_settled)
    if not (ok_left and ok_right):
        logger.warning(f"Moment tails truncated at [{left:g}, {right:g}] above {TAIL_TOL:g}")

    x, w = np.polynomial.legendre.leggauss(MOMENT_NODES)
    total = 0.0
    for lo, hi, linear in ((left, 0.0, False), (0.0, right, True)):
        nodes = lo + 0.5 * (hi - lo) * (x + 1.0)
        values = np.array([G(S) for S in nodes])
        if linear:
            values = values - nodes + m1
        total += 0.5 * (hi - lo) * float(np.sum(w * nodes ** (ell - 2) * values))
    moment = ell * (ell - 1) * total
    if not np.isfinite(moment):
        raise NonFiniteIntegrandError(f"Moment {ell} of F^(delta={p.delta}, u={p.u}) is not finite",
                                      where="moments_limit")
    logger.info(f"Moment {ell} of F^(delta={p.delta}, u={p.u}): {moment:.8g} "
                f"from {G.calls} evaluations of G")
    return float(moment)


def curve_moment(curve: DistributionCurve, ell: int = 1) -> float:
    """int S^ell dF over the curve grid, trapezoidal in F"""
    S = np.array(curve.s_values)
    F = np.array(curve.F_values)
    mids = 0.5 * (S[1:] + S[:-1])
    return float(np.sum(mids ** ell * np.diff(F)))


def scaling_convergence(
    p: AsympParams,
    N_values: Sequence[int] = (50, 100, 200),
    numerics: NumericsSettings = DEFAULT_SETTINGS,
    tolerance: float = 0.02,
) -> CheckResult:
    """
    Distance between the finite-N stationary CDF and F^(delta,u) at p.S

    Both sides are taken at S + delta(2u + delta); each N uses (alpha, n, s)
    from the critical scaling. Passes when the gaps decrease and the last one is within
    tolerance.
    """
    S = p.shifted(p.S)
    target = cdf_limit([S], p, numerics=numerics, threads=1).points[0].F
    gaps = []
    for N in N_values:
        fp, s = p.scaled_finite(N, S)
        value = cdf_stationary_finite([max(s, 0.0)], fp, numerics=numerics, threads=1).points[0].F
        gaps.append(abs(value - target))
        logger.info(f"Scaling N={N}: alpha={fp.alpha:.5g}, n={fp.n}, s={s:.5g}, gap {gaps[-1]:.4g}")
    ok = all(b < a for a, b in zip(gaps, gaps[1:])) and gaps[-1] <= tolerance
    return CheckResult(check="scaling_convergence", status="pass" if ok else "fail", value=gaps[-1],
                       tolerance=tolerance, details="gaps " + ", ".join(f"{g:.4g}" for g in gaps))
