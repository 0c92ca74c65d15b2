"""Distribution of half-space geometric LPP as a discrete Fredholm Pfaffian"""
import logging
from typing import Optional, Sequence

import numpy as np

from models.params import ContourSettings, GeoParams
from models.results import CheckResult, CurvePoint, DistributionCurve
from numerics.pfaffian import fredholm_pf_discrete
from kernels.geometric import GeoKernel, cutoff, scaling_error
from distributions.finite import evaluate_points
from utils.exceptions import ParameterDomainError
from utils.settings import DEFAULT_SETTINGS, NumericsSettings
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)


def cdf_geo(
    s_values: Sequence[int],
    p: GeoParams,
    representation: str = "auto",
    settings: Optional[ContourSettings] = None,
    numerics: NumericsSettings = DEFAULT_SETTINGS,
    threads: Optional[int] = None,
) -> DistributionCurve:
    """
    P(L_{N,N-n} <= s) = pf(J - K^geo) on l^2({s+1, s+2, ...})

    Args:
        s_values: Nonnegative integers
        p: Geometric parameters
        representation: Kernel representation, see kernels.geometric

    Raises:
        ParameterDomainError: For negative or non-integer s or parameters outside the model's domain
    """
    errors = [f"s must be a nonnegative integer, got {s}" for s in s_values
              if s < 0 or float(s) != int(s)]
    if errors:
        raise ParameterDomainError("Invalid geometric s-grid", errors=errors)
    kern = GeoKernel(p, representation, settings)

    def point(s: float) -> CurvePoint:
        s = int(s)
        return CurvePoint(s=s, F=fredholm_pf_discrete(kern, s, cutoff(p, s, numerics), kern.conj_exponent))

    points = evaluate_points(point, sorted(int(s) for s in s_values), threads)
    logger.info(f"Geometric CDF: a={p.a}, b={p.b}, q={p.q}, N={p.N}, n={p.n}, "
                f"{kern.representation} representation, {len(points)} points")
    return DistributionCurve(
        params=ParameterValidator.describe(p),
        method={"formula": "geometric", "representation": kern.representation,
                "conj_exponent": kern.conj_exponent, "contour": kern.settings.model_dump()},
        points=points,
    )


def corner_cdf(s: int, p: GeoParams) -> float:
    """Closed form for N = 1, where L = W_11 ~ Geom(ab)"""
    return 1.0 - (p.a * p.b) ** (s + 1)


def exponential_limit_check(
    x: float = 1.0,
    y: float = 1.5,
    alpha: float = 0.1,
    beta: float = 0.3,
    N: int = 3,
    n: int = 0,
    eps_values: Sequence[float] = (1e-2, 1e-3),
    ratio_window: Sequence[float] = (5.0, 15.0),
    settings: Optional[ContourSettings] = None,
) -> CheckResult:
    """
    Rescaled geometric kernel tends to the exponential one linearly in eps

    Passes when the error ratio between consecutive eps values lies in ratio_window.
    """
    errs = [scaling_error(x, y, alpha, beta, eps, N, n, settings) for eps in eps_values]
    ratios = [a / b for a, b in zip(errs, errs[1:]) if b > 0]
    lo, hi = ratio_window
    ok = bool(ratios) and all(lo <= r <= hi for r in ratios)
    logger.info(f"Geometric -> exponential kernel errors {errs}, ratios {ratios}")
    return CheckResult(check="geo_exponential_limit", status="pass" if ok else "fail",
                       value=float(ratios[-1]) if ratios else None, tolerance=None,
                       details="errors " + ", ".join(f"{e:.3g}" for e in errs))


def antisymmetry_defect(p: GeoParams, sites: Sequence[int] = (1, 2, 3, 5, 8),
                        representation: str = "auto", settings: Optional[ContourSettings] = None) -> float:
    """max |K(k, l) + K(l, k)^T| over all pairs of the given sites"""
    kern = GeoKernel(p, representation, settings)
    ks = np.asarray(sites, dtype=float)
    K = kern.block(ks, ks)
    return float(np.max(np.abs(K + np.transpose(K, (1, 0, 3, 2)))))
