import os
import logging
from typing import Optional, Dict, Any
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

THREADS_ENV = "LPP_LAB_THREADS"


class NumericsSettings(BaseModel):
    """Default numerical knobs shared by the distribution evaluators"""

    finite_grid_nodes: int = Field(default=160, ge=4)
    asymp_grid_nodes: int = Field(default=64, ge=4)
    asymp_cutoff: float = Field(default=12.0, gt=0.0)
    decay_target: float = Field(default=12.0, gt=0.0, description="Cutoff T times the slowest decay rate")
    finite_conj_eps_cap: float = Field(default=0.3, gt=0.0, lt=0.5)
    finite_scale_widths: float = Field(
        default=8.0, gt=0.0, description="Minimum cutoff in units of the fluctuation scale 2^{4/3} N^{1/3}"
    )
    asymp_conj_offset: float = Field(default=1.0, gt=0.0)
    deriv_step: float = Field(default=0.05, gt=0.0)
    deriv_step_asymp: float = Field(default=0.02, gt=0.0)
    richardson_budget: float = Field(default=1e-4, gt=0.0)
    scalar_tol: float = Field(default=1e-10, gt=0.0)
    geo_cutoff_cap: int = Field(default=600, ge=8)
    mc_chunk_size: int = Field(default=20000, ge=1)


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Worker count: explicit value, else LPP_LAB_THREADS, else the CPU count

    The CLI reads LPP_LAB_THREADS through click; library callers passing None get
    the same fallback here.

    Args:
        threads: Value given on the command line

    Returns:
        Positive worker count
    """
    if threads is not None and threads > 0:
        return threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
            if value > 0:
                return value
        except ValueError:
            logger.warning(f"Ignoring non-integer {THREADS_ENV}={env!r}")
    return os.cpu_count() or 1


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Reads a key=value configuration file

    Blank lines and lines starting with '#' are skipped; values are parsed as
    int, then float, then left as strings.
    """
    values: Dict[str, Any] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                logger.warning(f"{path}:{lineno}: expected key=value, skipping")
                continue
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = _parse_scalar(value)
    return values


def _parse_scalar(value: str) -> Any:
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value.strip('"').strip("'")


DEFAULT_SETTINGS = NumericsSettings()
