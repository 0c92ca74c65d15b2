"""Parameter records built from a RunConfig's flat parameter dict"""
from typing import Any, Dict, List, Optional

import numpy as np

from models.params import AsympParams, FiniteParams, GeoParams, ModelParams, RunConfig, WeightMode
from utils.exceptions import ParameterDomainError
from utils.validators import ParameterValidator

DEFAULT_POINTS = 33
DEFAULT_WINDOW = (-5.0, 5.0)


def _pick(params: Dict[str, Any], *names: str) -> Dict[str, Any]:
    return {k: params[k] for k in names if params.get(k) is not None}


def weight_mode(cfg: RunConfig, default: str = "stationary") -> WeightMode:
    try:
        return WeightMode.from_code(str(cfg.params.get("mode") or default))
    except ValueError as exc:
        raise ParameterDomainError("Unknown weight mode", errors=[str(exc)]) from exc


def model_params(cfg: RunConfig) -> ModelParams:
    """Simulation parameters, validated for their weight mode"""
    mode = weight_mode(cfg)
    m = ParameterValidator.build(ModelParams, mode=mode, **_pick(cfg.params, "N", "n", "alpha", "beta", "a", "b", "q"))
    ParameterValidator.validate_model(m)
    return m


def finite_params(cfg: RunConfig, two_param: bool = False) -> FiniteParams:
    fields = _pick(cfg.params, "N", "n", "alpha", "beta")
    if not two_param:
        fields.pop("beta", None)
    p = ParameterValidator.build(FiniteParams, **fields)
    ParameterValidator.validate_finite(p, require_beta=two_param, forbid_beta=not two_param,
                                       continuation=bool(cfg.params.get("continuation")))
    return p


def asymp_params(cfg: RunConfig) -> AsympParams:
    p = ParameterValidator.build(AsympParams, **_pick(cfg.params, "delta", "u", "S"))
    ParameterValidator.validate_asymp(p)
    return p


def geo_params(cfg: RunConfig) -> GeoParams:
    p = ParameterValidator.build(GeoParams, **_pick(cfg.params, "a", "b", "q", "N", "n"))
    ParameterValidator.validate_geo(p)
    return p


def window_grid(cfg: RunConfig, window=DEFAULT_WINDOW) -> List[float]:
    """Explicit s-values, else --s-min/--s-max/--points, else the default window"""
    if cfg.s_values:
        return sorted(float(s) for s in cfg.s_values)
    lo = float(cfg.params.get("s_min", window[0]))
    hi = float(cfg.params.get("s_max", window[1]))
    points = int(cfg.params.get("points", DEFAULT_POINTS))
    if points < 1 or hi < lo:
        raise ParameterDomainError("Invalid s-window", errors=[f"s_min={lo}, s_max={hi}, points={points}"])
    return [float(s) for s in np.linspace(lo, hi, points)]


def has_window(cfg: RunConfig) -> bool:
    return bool(cfg.s_values) or any(cfg.params.get(k) is not None for k in ("s_min", "s_max"))


def param(cfg: RunConfig, name: str, default: Optional[Any] = None) -> Any:
    value = cfg.params.get(name)
    return default if value is None else value
