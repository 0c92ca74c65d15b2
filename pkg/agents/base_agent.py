from abc import ABC, abstractmethod
from typing import Any, Dict
import logging
from datetime import datetime
import time

from models.params import RunConfig
from utils.exceptions import ParameterDomainError
from utils.validators import ParameterValidator


def _fresh_metrics() -> Dict[str, Any]:
    return {
        "runs": 0,
        "failures": 0,
        "completed": 0,
        "last_run": None,
        "total_seconds": 0.0,
        "min_seconds": float('inf'),
        "max_seconds": 0.0,
    }


class BaseAgent(ABC):
    """
    Common shell of the run agents

    Subclasses implement process(payload) where the payload carries a RunConfig
    under "config"; timing and outcome counters are kept per agent.
    """

    def __init__(self, name: str, description: str = ""):
        self.name = name
        self.description = description
        self.logger = logging.getLogger(f"agent.{name}")
        self._metrics = _fresh_metrics()
        self._start_time = None

    @abstractmethod
    async def process(self, payload: Dict[str, Any]) -> Any:
        pass

    @staticmethod
    def config_from(payload: Dict[str, Any]) -> RunConfig:
        """
        RunConfig carried by a payload, given as a model or a plain dict

        Raises:
            ParameterDomainError: If the payload has no usable config
        """
        cfg = payload.get("config")
        if isinstance(cfg, RunConfig):
            return cfg
        if isinstance(cfg, dict):
            return ParameterValidator.build(RunConfig, **cfg)
        raise ParameterDomainError("Payload has no run configuration", errors=["missing 'config'"])

    def start_processing(self):
        self._start_time = time.perf_counter()

    def log_processing(self, success: bool = True):
        if self._start_time is not None:
            elapsed = time.perf_counter() - self._start_time
            self._metrics["total_seconds"] += elapsed
            self._metrics["min_seconds"] = min(self._metrics["min_seconds"], elapsed)
            self._metrics["max_seconds"] = max(self._metrics["max_seconds"], elapsed)
            self._start_time = None

        self._metrics["runs"] += 1
        self._metrics["completed" if success else "failures"] += 1
        self._metrics["last_run"] = datetime.now()

    def get_metrics(self) -> Dict[str, Any]:
        metrics = self._metrics.copy()
        runs = metrics["runs"]
        metrics["success_rate"] = 100.0 * metrics["completed"] / runs if runs else 0.0
        metrics["average_seconds"] = metrics["total_seconds"] / runs if runs else 0.0
        if metrics["min_seconds"] == float('inf'):
            metrics["min_seconds"] = 0.0
        for key in ("total_seconds", "average_seconds", "min_seconds", "max_seconds"):
            metrics[key] = round(metrics[key], 4)
        return metrics

    def reset_metrics(self):
        self._metrics = _fresh_metrics()

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name='{self.name}')"
