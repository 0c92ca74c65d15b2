from typing import Any, Dict

from .base_agent import BaseAgent
from .simulation_agent import SimulationAgent
from .distribution_agent import CURVE_COMMANDS, DistributionAgent
from .verification_agent import VerificationAgent
from data.reference_configs import REFERENCE_CONFIGS
from models.params import RunConfig
from models.results import RunResult, VerificationReport
from utils.exceptions import ParameterDomainError
from utils.validators import ParameterValidator
import logging

logger = logging.getLogger(__name__)

COMMANDS = ("sim",) + CURVE_COMMANDS + ("verify", "tabulate", "dump")


class MasterAgent(BaseAgent):
    def __init__(self):
        super().__init__(
            name="MasterAgent",
            description="Routes run configurations to the simulation, distribution and verification agents"
        )
        self.simulation_agent = SimulationAgent()
        self.distribution_agent = DistributionAgent()
        self.verification_agent = VerificationAgent()

    async def process(self, payload: Dict[str, Any]) -> RunResult:
        self.start_processing()
        try:
            cfg = self._validate_payload(payload)
            logger.info(f"Running {cfg.command}")
            forwarded = {"config": cfg}

            if cfg.command == "sim":
                output = await self.simulation_agent.process(forwarded)
            elif cfg.command in CURVE_COMMANDS:
                output = await self.distribution_agent.process(forwarded)
            elif cfg.command == "verify":
                output = await self.verification_agent.process(forwarded)
            elif cfg.command == "dump":
                output = self.distribution_agent.dump(cfg)
            else:
                header, rows = self.distribution_agent.tabulate(str(cfg.params.get("name")), cfg)
                output = {"header": header, "rows": rows}

            errors = output.failed_checks if isinstance(output, VerificationReport) else []
            result = RunResult(
                command=cfg.command,
                status="failed" if errors else "completed",
                output=output,
                config=cfg.model_dump(),
                errors=errors,
            )
            self.log_processing(success=True)
            return result

        except Exception as e:
            logger.error(f"Error running {payload.get('command', 'configuration')}: {str(e)}")
            self.log_processing(success=False)
            raise

    async def run_reference(self, name: str) -> RunResult:
        """
        Runs one of the named reference configurations

        Raises:
            ParameterDomainError: For an unknown name
        """
        entry = REFERENCE_CONFIGS.get(name)
        if entry is None:
            raise ParameterDomainError("Unknown reference configuration",
                                       errors=[f"name must be one of {sorted(REFERENCE_CONFIGS)}"])
        return await self.process(dict(entry["config"]))

    def _validate_payload(self, payload: Dict[str, Any]) -> RunConfig:
        cfg = payload.get("config", payload)
        if not isinstance(cfg, RunConfig):
            cfg = ParameterValidator.build(RunConfig, **cfg)
        if cfg.command not in COMMANDS:
            raise ParameterDomainError("Unknown command", errors=[f"command must be one of {COMMANDS}"])
        return cfg
