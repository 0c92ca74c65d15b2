from .derivatives import Derivative, derivative, five_point
from .finite import (
    cdf_two_param,
    cdf_stationary_finite,
    stationary_G,
    shift_check,
    continuation_check,
    curve_mean,
)
from .limit import cdf_limit, pf_limit, limit_G, moments_limit, curve_moment, scaling_convergence
from .baik_rains import (
    f_gue,
    gue_curve,
    f_br,
    br_curve,
    br_path_cdf,
    br_limit_check,
    tau_symmetry_check,
)
from .geometric import cdf_geo, corner_cdf, exponential_limit_check

__all__ = [
    "Derivative",
    "derivative",
    "five_point",
    "cdf_two_param",
    "cdf_stationary_finite",
    "stationary_G",
    "shift_check",
    "continuation_check",
    "curve_mean",
    "cdf_limit",
    "pf_limit",
    "limit_G",
    "moments_limit",
    "curve_moment",
    "scaling_convergence",
    "f_gue",
    "gue_curve",
    "f_br",
    "br_curve",
    "br_path_cdf",
    "br_limit_check",
    "tau_symmetry_check",
    "cdf_geo",
    "corner_cdf",
    "exponential_limit_check",
]
