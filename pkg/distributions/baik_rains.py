"""
GUE Tracy-Widom and Baik-Rains distributions

F_GUE(s + tau^2) = det(1 - K_Ai,tau) on L^2(s, infinity) and
F_BR,tau(s) = d/ds [F_GUE(s + tau^2)(R_tau(s) - <Psi_tau|(1 - K_Ai,tau)^-1 Phi_tau>)].
The same law is reached from F^(delta,u) along delta = tau - u as u grows,
which br_limit_check measures with the conjugated kernel of kernels.baik_rains.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from models.params import ContourSettings, GridSettings
from models.results import CheckResult, CurvePoint, DistributionCurve
from numerics.pfaffian import QuadratureGrid, bracket_det, bracket_pf, fredholm_det, make_grid
from numerics.special_funcs import K_Ai_shift, Phi_tau, Psi_tau, R_tau
from kernels.baik_rains import BrPathKernel
from distributions.derivatives import CachedFunction, derivative
from distributions.finite import evaluate_points
from utils.settings import DEFAULT_SETTINGS, NumericsSettings

logger = logging.getLogger(__name__)


def airy_grid(s: float, numerics: NumericsSettings = DEFAULT_SETTINGS,
              grid: Optional[GridSettings] = None) -> QuadratureGrid:
    grid = grid or GridSettings()
    return make_grid(s, grid.cutoff or numerics.asymp_cutoff, grid.nodes or numerics.asymp_grid_nodes)


def f_gue(s: float, settings: Optional[ContourSettings] = None,
          numerics: NumericsSettings = DEFAULT_SETTINGS, grid: Optional[GridSettings] = None) -> float:
    """GUE Tracy-Widom distribution function at s"""
    return fredholm_det(lambda x, y: K_Ai_shift(x, y, 0.0, settings), airy_grid(s, numerics, grid))


def gue_curve(s_values: Sequence[float], settings: Optional[ContourSettings] = None,
              numerics: NumericsSettings = DEFAULT_SETTINGS, grid: Optional[GridSettings] = None,
              threads: Optional[int] = None) -> DistributionCurve:
    points = evaluate_points(lambda s: CurvePoint(s=s, F=f_gue(s, settings, numerics, grid)),
                             sorted(float(s) for s in s_values), threads)
    logger.info(f"GUE Tracy-Widom: {len(points)} points")
    return DistributionCurve(params={}, method={"formula": "f_gue",
                                                "grid_nodes": (grid or GridSettings()).nodes
                                                or numerics.asymp_grid_nodes},
                             points=points)


def br_G(s: float, tau: float, settings: Optional[ContourSettings] = None,
         numerics: NumericsSettings = DEFAULT_SETTINGS, grid: Optional[GridSettings] = None) -> float:
    """F_GUE(s + tau^2)(R_tau(s) - <Psi_tau|(1 - K_Ai,tau)^-1 Phi_tau>)"""
    g = airy_grid(s, numerics, grid)
    base, bracketed = bracket_det(
        lambda x, y: K_Ai_shift(x, y, tau, settings),
        Psi_tau(tau, g.nodes, settings),
        Phi_tau(tau, s, g.nodes, settings),
        g,
    )
    return base * R_tau(tau, s, settings) - bracketed


def f_br(s: float, tau: float = 0.0, settings: Optional[ContourSettings] = None,
         numerics: NumericsSettings = DEFAULT_SETTINGS, grid: Optional[GridSettings] = None) -> float:
    """Baik-Rains distribution function F_BR,tau(s)"""
    h = (grid.deriv_step if grid and grid.deriv_step else None) or numerics.deriv_step_asymp
    G = CachedFunction(lambda t: br_G(t, tau, settings, numerics, grid))
    return derivative(G, s, h, richardson=grid.richardson if grid else True,
                      budget=numerics.richardson_budget, where="Baik-Rains G").value


def br_curve(s_values: Sequence[float], tau: float = 0.0, settings: Optional[ContourSettings] = None,
             numerics: NumericsSettings = DEFAULT_SETTINGS, grid: Optional[GridSettings] = None,
             threads: Optional[int] = None) -> DistributionCurve:
    grid = grid or GridSettings()
    h = grid.deriv_step or numerics.deriv_step_asymp

    def point(s: float) -> CurvePoint:
        G = CachedFunction(lambda t: br_G(t, tau, settings, numerics, grid))
        d = derivative(G, s, h, richardson=grid.richardson, budget=numerics.richardson_budget,
                       where="Baik-Rains G")
        return CurvePoint(s=s, F=d.value, err=d.err)

    points = evaluate_points(point, sorted(float(s) for s in s_values), threads)
    logger.info(f"Baik-Rains CDF: tau={tau}, {len(points)} points")
    return DistributionCurve(params={"tau": tau},
                             method={"formula": "f_br", "grid_nodes": grid.nodes or numerics.asymp_grid_nodes,
                                     "deriv_step": h},
                             points=points)


# ----------------------------------------------------------------------
# u -> infinity along delta = tau - u

def br_path_G(s: float, kern: BrPathKernel, numerics: NumericsSettings = DEFAULT_SETTINGS,
              grid: Optional[GridSettings] = None) -> Tuple[float, float]:
    """(pf(J - A), G) of F^(tau-u, u) at S = s + delta(2u + delta), in the shifted variable s"""
    g = airy_grid(s, numerics, grid)
    border = kern.border(s, g)
    base, bracketed = bracket_pf(kern, border.left, border.right, g)
    return base, base * border.scalar - bracketed


def br_path_cdf(s_values: Sequence[float], u: float, tau: float = 0.0,
                settings: Optional[ContourSettings] = None, numerics: NumericsSettings = DEFAULT_SETTINGS,
                grid: Optional[GridSettings] = None, threads: Optional[int] = None) -> DistributionCurve:
    """F^(tau-u, u)(s + delta(2u + delta)) as a function of s"""
    grid = grid or GridSettings()
    s_values = sorted(float(s) for s in s_values)
    x_max = max(abs(s_values[0]), abs(s_values[-1])) + (grid.cutoff or numerics.asymp_cutoff) + 1.0
    kern = BrPathKernel(u, tau, settings, x_max=x_max)
    h = grid.deriv_step or numerics.deriv_step_asymp

    def point(s: float) -> CurvePoint:
        G = CachedFunction(lambda t: br_path_G(t, kern, numerics, grid)[1])
        d = derivative(G, s, h, richardson=grid.richardson, budget=numerics.richardson_budget,
                       where="Baik-Rains path G")
        return CurvePoint(s=s, F=d.value, err=d.err)

    points = evaluate_points(point, s_values, threads)
    logger.info(f"Baik-Rains path CDF: u={u}, tau={tau}, {len(points)} points")
    return DistributionCurve(params={"u": u, "tau": tau, "delta": kern.delta, "shift": kern.shift()},
                             method={"formula": "br_path", "grid_nodes": grid.nodes or numerics.asymp_grid_nodes,
                                     "deriv_step": h, "r": kern.r},
                             points=points)


def br_limit_check(u: float = 3.0, tau: float = 0.0, s_values: Sequence[float] = (-2.0, 0.0, 2.0),
                   tolerance: float = 0.01, settings: Optional[ContourSettings] = None,
                   numerics: NumericsSettings = DEFAULT_SETTINGS) -> CheckResult:
    """max |F^(tau-u, u)(s + delta(2u + delta)) - F_BR,tau(s)| over s_values"""
    path = br_path_cdf(s_values, u, tau, settings, numerics, threads=1)
    target = br_curve(s_values, tau, settings, numerics, threads=1)
    gap = float(np.max(np.abs(np.array(path.F_values) - np.array(target.F_values))))
    logger.info(f"Baik-Rains limit at u={u}, tau={tau}: max gap {gap:.4g}")
    return CheckResult(check="br_limit", status="pass" if gap <= tolerance else "fail", value=gap,
                       tolerance=tolerance, details=f"s = {list(path.s_values)}")


def tau_symmetry_check(tau: float, s_values: Sequence[float] = (-2.0, 0.0, 2.0), tolerance: float = 1e-6,
                       settings: Optional[ContourSettings] = None,
                       numerics: NumericsSettings = DEFAULT_SETTINGS) -> CheckResult:
    """F_BR,tau = F_BR,-tau"""
    gap = max(abs(f_br(s, tau, settings, numerics) - f_br(s, -tau, settings, numerics)) for s in s_values)
    return CheckResult(check="br_tau_symmetry", status="pass" if gap <= tolerance else "fail",
                       value=gap, tolerance=tolerance, details=f"tau = {tau}")
