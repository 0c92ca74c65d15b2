from typing import Any, Callable, Dict, List, Optional, Tuple
import logging

import numpy as np

from .base_agent import BaseAgent
from .config import (
    asymp_params, finite_params, geo_params, has_window, param, weight_mode, window_grid,
)
from models.params import ContourSettings, FiniteParams, ModelParams, RunConfig, WeightMode
from models.results import DistributionCurve
from distributions import (
    br_curve, cdf_geo, cdf_limit, cdf_stationary_finite, cdf_two_param, f_gue, gue_curve,
)
from distributions.finite import finite_grid, grid_lengths
from kernels import FiniteKernel, GeoKernel, Kernel2x2
from kernels.geometric import cutoff as geo_cutoff
from numerics.pfaffian import dump_matrix, make_discrete_grid
from numerics.special_funcs import G_TABLE, asymp_func, br_func, e_alpha, g_contour, g_finite
from simulation.lpp_sim import pilot_grid
from utils.exceptions import CurveInvariantError, ParameterDomainError
from utils.io import KERNEL_GRID_HEADER, kernel_grid_rows
from utils.settings import DEFAULT_SETTINGS, NumericsSettings

logger = logging.getLogger(__name__)

CURVE_COMMANDS = ("cdf-two-param", "cdf-finite", "cdf-asymp", "cdf-br", "cdf-geo", "f-gue")
ASYMP_NAMES = ("f_scal", "e_scal", "j_scal", "g1_scal", "g2_scal", "g3_scal", "g4_scal", "E0", "E1")
BR_NAMES = ("R_tau", "Psi_tau", "Phi_tau", "K_Ai_shift")
FINITE_NAMES = tuple(G_TABLE) + ("e_alpha",)
TABULATE_NAMES = FINITE_NAMES + ASYMP_NAMES + BR_NAMES + ("F_GUE",)
DUMP_KINDS = ("kernel", "matrix", "contour")


class DistributionAgent(BaseAgent):
    """
    Evaluates the exact distribution functions for a RunConfig

    Every curve is checked to be a CDF up to its error bars before it is
    returned; a violation raises CurveInvariantError naming the failing place.
    """

    def __init__(self, numerics: NumericsSettings = DEFAULT_SETTINGS):
        super().__init__(
            name="DistributionAgent",
            description="Evaluates finite-N, limiting, Baik-Rains and geometric distribution functions"
        )
        self.numerics = numerics
        self.routes: Dict[str, Callable[[RunConfig], DistributionCurve]] = {
            "cdf-two-param": self._two_param,
            "cdf-finite": self._finite,
            "cdf-asymp": self._asymp,
            "cdf-br": self._br,
            "cdf-geo": self._geo,
            "f-gue": self._gue,
        }

    async def process(self, payload: Dict[str, Any]) -> DistributionCurve:
        self.start_processing()
        try:
            cfg = self.config_from(payload)
            route = self.routes.get(cfg.command)
            if route is None:
                raise ParameterDomainError("Unknown distribution command",
                                           errors=[f"command must be one of {CURVE_COMMANDS}"])
            curve = route(cfg)
            self.check_curve(curve, cfg.command)
            self.logger.info(f"{cfg.command}: {len(curve.points)} points, "
                             f"max err {max(curve.err, default=0.0):.3g}")
            self.log_processing(success=True)
            return curve

        except Exception as e:
            logger.error(f"Distribution evaluation failed: {str(e)}")
            self.log_processing(success=False)
            raise

    @staticmethod
    def check_curve(curve: DistributionCurve, command: str, slack: float = 1e-6) -> None:
        violations = curve.cdf_violations(slack)
        if violations:
            raise CurveInvariantError(f"{command} produced an invalid CDF: {violations[0]}",
                                      violations=violations)

    @staticmethod
    def _contour(cfg: RunConfig) -> Optional[ContourSettings]:
        return cfg.contour if "contour" in cfg.model_fields_set else None

    def _finite_grid(self, cfg: RunConfig, p: FiniteParams, target: str) -> List[float]:
        if has_window(cfg):
            return [s for s in window_grid(cfg) if s >= 0.0]
        mode = WeightMode.TWO_PARAM if p.beta is not None else WeightMode.STATIONARY
        m = ModelParams(mode=mode, N=p.N, n=p.n, alpha=p.alpha, beta=p.beta)
        return [max(s, 0.0) for s in pilot_grid(m, target, seed=cfg.seed, threads=cfg.threads)]

    # ------------------------------------------------------------------
    # curves

    def _two_param(self, cfg: RunConfig) -> DistributionCurve:
        p = finite_params(cfg, two_param=True)
        return cdf_two_param(self._finite_grid(cfg, p, "L_pf"), p, self._contour(cfg), cfg.grid,
                             self.numerics, cfg.threads, continuation=bool(param(cfg, "continuation", False)))

    def _finite(self, cfg: RunConfig) -> DistributionCurve:
        p = finite_params(cfg)
        return cdf_stationary_finite(self._finite_grid(cfg, p, "L"), p, self._contour(cfg), cfg.grid,
                                     self.numerics, cfg.threads)

    def _asymp(self, cfg: RunConfig) -> DistributionCurve:
        p = asymp_params(cfg)
        return cdf_limit(window_grid(cfg), p, param(cfg, "variant", "standard"), self._contour(cfg), cfg.grid,
                         self.numerics, cfg.threads)

    def _br(self, cfg: RunConfig) -> DistributionCurve:
        return br_curve(window_grid(cfg), float(param(cfg, "tau", 0.0)), self._contour(cfg), self.numerics,
                        cfg.grid, cfg.threads)

    def _gue(self, cfg: RunConfig) -> DistributionCurve:
        return gue_curve(window_grid(cfg), self._contour(cfg), self.numerics, cfg.grid, cfg.threads)

    def _geo(self, cfg: RunConfig) -> DistributionCurve:
        p = geo_params(cfg)
        if has_window(cfg):
            s_values = sorted({int(round(s)) for s in window_grid(cfg) if s >= 0.0})
        else:
            m = ModelParams(mode=WeightMode.GEOMETRIC, N=p.N, n=p.n, a=p.a, b=p.b, q=p.q)
            s_values = sorted({int(s) for s in pilot_grid(m, seed=cfg.seed, threads=cfg.threads)})
        return cdf_geo(s_values, p, param(cfg, "representation", "auto"), self._contour(cfg), self.numerics,
                       cfg.threads)

    # ------------------------------------------------------------------
    # tabulation of named scalar functions

    def tabulate(self, name: str, cfg: RunConfig) -> Tuple[List[str], List[Tuple[float, float]]]:
        """
        Named scalar function on the config's x-window

        Finite names read (N, n, alpha, beta); asymptotic names read (delta, u, S)
        and y for the two-argument E0, E1; Baik-Rains names read tau, s and y.

        Returns:
            Column names and (x, value) rows

        Raises:
            ParameterDomainError: For an unknown name or invalid parameters
        """
        if name not in TABULATE_NAMES:
            raise ParameterDomainError("Unknown function name", errors=[f"name must be one of {TABULATE_NAMES}"])
        xs = np.array(window_grid(cfg))
        settings = self._contour(cfg)
        if name in FINITE_NAMES:
            p = finite_params(cfg, two_param=cfg.params.get("beta") is not None)
            values = e_alpha(xs, p, settings) if name == "e_alpha" else g_finite(name, xs, p, settings)
        elif name in ASYMP_NAMES:
            values = asymp_func(name, asymp_params(cfg), X=xs, Y=float(param(cfg, "y", 0.0)), settings=settings)
        elif name == "F_GUE":
            values = [f_gue(x, settings, self.numerics, cfg.grid) for x in xs]
        elif name == "R_tau":
            values = [br_func(name, float(param(cfg, "tau", 0.0)), x, settings=settings) for x in xs]
        else:
            values = br_func(name, float(param(cfg, "tau", 0.0)), float(param(cfg, "s", 0.0)), xs,
                             float(param(cfg, "y", 0.0)), settings)
        values = np.asarray(values, dtype=float).ravel()
        logger.info(f"Tabulated {name} on {xs.size} points")
        return ["x", name], list(zip(xs.tolist(), values.tolist()))

    # ------------------------------------------------------------------
    # debug dumps

    def _dump_kernel(self, cfg: RunConfig) -> Kernel2x2:
        mode = weight_mode(cfg)
        if mode == WeightMode.GEOMETRIC:
            return GeoKernel(geo_params(cfg), param(cfg, "representation", "auto"), self._contour(cfg))
        if mode == WeightMode.TWO_PARAM:
            return FiniteKernel(finite_params(cfg, two_param=True), "two_param", self._contour(cfg))
        return FiniteKernel(finite_params(cfg), "limit", self._contour(cfg))

    def dump(self, cfg: RunConfig) -> Dict[str, Any]:
        """
        Debug dumps: kernel values on the window, the discretized J - K, or a g-function contour

        params["what"] selects "kernel" (the default), "matrix" or "contour". A matrix
        is written to cfg.out at s = first s-value (0 when none is given).

        Raises:
            ParameterDomainError: For an unknown dump kind or g name, or a matrix dump without cfg.out
        """
        what = param(cfg, "what", "kernel")
        if what not in DUMP_KINDS:
            raise ParameterDomainError("Unknown dump kind", errors=[f"what must be one of {DUMP_KINDS}"])

        if what == "contour":
            name = str(param(cfg, "name", "g1"))
            if name not in G_TABLE:
                raise ParameterDomainError("Unknown g function", errors=[f"name must be one of {tuple(G_TABLE)}"])
            p = finite_params(cfg, two_param=cfg.params.get("beta") is not None)
            return g_contour(name, p, self._contour(cfg)).to_dict()

        kern = self._dump_kernel(cfg)
        geometric = isinstance(kern, GeoKernel)
        if what == "kernel":
            xs = np.array(window_grid(cfg))
            if geometric:
                xs = np.unique(np.round(xs[xs >= 1.0]))
            return {"header": list(KERNEL_GRID_HEADER), "rows": kernel_grid_rows(xs, xs, kern.block(xs, xs))}

        if not cfg.out:
            raise ParameterDomainError("Matrix dump needs an output path", errors=["out is required for what=matrix"])
        s = float(cfg.s_values[0]) if cfg.s_values else 0.0
        if geometric:
            grid = make_discrete_grid(int(s), geo_cutoff(kern.p, int(s), self.numerics), kern.conj_exponent)
        else:
            grid = finite_grid(kern, s, grid_lengths(kern, s, self.numerics, cfg.grid),
                               cfg.grid.nodes or self.numerics.finite_grid_nodes)
        M = dump_matrix(kern, grid, cfg.out)
        logger.info(f"Dumped {M.shape[0]}x{M.shape[1]} matrix J - K at s={s:g} to {cfg.out}")
        return {"path": cfg.out, "shape": list(M.shape), "grid": grid.describe()}
