from typing import Any, Dict, Union
import logging

from .base_agent import BaseAgent
from .config import has_window, model_params, param, window_grid
from models.results import IncrementReport, McSummary
from simulation.lpp_sim import increment_tests, path_increment_test, sample_cdf
from utils.exceptions import ParameterDomainError

logger = logging.getLogger(__name__)

KINDS = ("cdf", "increments", "path")


class SimulationAgent(BaseAgent):
    """Runs the half-space LPP Monte Carlo for a RunConfig"""

    def __init__(self):
        super().__init__(
            name="SimulationAgent",
            description="Samples LPP times and increment statistics on the half-space lattice"
        )

    async def process(self, payload: Dict[str, Any]) -> Union[McSummary, IncrementReport]:
        self.start_processing()
        try:
            cfg = self.config_from(payload)
            m = model_params(cfg)
            kind = param(cfg, "kind", "cdf")
            if kind not in KINDS:
                raise ParameterDomainError("Unknown simulation kind", errors=[f"kind must be one of {KINDS}"])

            if kind == "cdf":
                grid = window_grid(cfg) if has_window(cfg) else None
                result = sample_cdf(m, param(cfg, "target", "L"), cfg.samples, cfg.seed,
                                    grid=grid, threads=cfg.threads)
                self.logger.info(f"{m.mode.display_name} N={m.N}, n={m.n}: mean {result.mean:.6g}, "
                                 f"variance {result.variance:.6g} from {result.samples} samples")
            elif kind == "increments":
                result = increment_tests(m, int(param(cfg, "i", 1)), int(param(cfg, "j", 2)),
                                         cfg.samples, cfg.seed, cfg.threads)
                self.logger.info(f"Increment tests passed={result.passed}")
            else:
                result = path_increment_test(m, int(param(cfg, "K", 3)), cfg.samples, cfg.seed, cfg.threads)
                self.logger.info(f"Staircase increment tests passed={result.passed}")

            self.log_processing(success=True)
            return result

        except Exception as e:
            logger.error(f"Simulation failed: {str(e)}")
            self.log_processing(success=False)
            raise
