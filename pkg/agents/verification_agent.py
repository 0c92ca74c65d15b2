import math
from typing import Any, Callable, Dict, List, Optional
import logging

import numpy as np

from .base_agent import BaseAgent
from .config import param
from models.params import AsympParams, FiniteParams, GeoParams, ModelParams, RunConfig, WeightMode
from models.results import CheckResult, VerificationReport
from numerics.pfaffian import (
    bracket_pf, fredholm_det_block, fredholm_pf, j_matrix, make_grid, pf, resolvent_inner,
)
from numerics.special_funcs import f_pm, g_finite
from kernels.base import FunctionKernel
from kernels.finite import FiniteKernel, finite_border
from distributions.finite import (
    cdf_stationary_finite, cdf_two_param, continuation_check, finite_grid, grid_lengths, shift_check,
)
from distributions.limit import cdf_limit, moments_limit, scaling_convergence
from distributions.baik_rains import br_limit_check, tau_symmetry_check
from distributions.geometric import antisymmetry_defect, cdf_geo, corner_cdf, exponential_limit_check
from simulation.lpp_sim import (
    gen_weights, increment_tests, lpp_time, lpp_time_brute, path_increment_test, pilot_grid, sample_cdf,
)
from utils.exceptions import LppError, ParameterDomainError
from utils.settings import DEFAULT_SETTINGS
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)

Check = Callable[[RunConfig, float], CheckResult]

# configuration of the kernel identity checks
IDENTITY_PARAMS = FiniteParams(N=3, n=1, alpha=0.1, beta=0.3)
IDENTITY_S = 2.0


def _result(name: str, value: float, tolerance: float, details: Optional[str] = None,
            below: bool = True) -> CheckResult:
    ok = value <= tolerance if below else value >= tolerance
    return CheckResult(check=name, status="pass" if ok else "fail", value=float(value),
                       tolerance=tolerance, details=details)


def _identity_grid(kern: FiniteKernel, nodes: int = 0):
    lengths = grid_lengths(kern, IDENTITY_S, DEFAULT_SETTINGS)
    return finite_grid(kern, IDENTITY_S, lengths, nodes or DEFAULT_SETTINGS.finite_grid_nodes)


# ----------------------------------------------------------------------
# pfaffian suite

def check_small_pfaffians(cfg: RunConfig, tol: float) -> CheckResult:
    two = np.array([[0.0, 7.0], [-7.0, 0.0]])
    a, b, c, d, e, f = 1.0, 2.0, 3.0, 4.0, 5.0, 6.0
    four = np.array([[0, a, b, c], [-a, 0, d, e], [-b, -d, 0, f], [-c, -e, -f, 0]], dtype=float)
    err = max(abs(pf(two) - 7.0), abs(pf(four) - 8.0))
    return _result("pf_closed_forms", err, tol, "pf 2x2 = 7, pf 4x4 = af - be + cd = 8")


def check_pf_squared_det(cfg: RunConfig, tol: float) -> CheckResult:
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for size in range(2, 41, 2):
        X = rng.standard_normal((size, size))
        A = X - X.T
        det = float(np.linalg.det(A))
        worst = max(worst, abs(pf(A) ** 2 - det) / max(abs(det), 1e-300))
    return _result("pf_squared_det", worst, tol, "random antisymmetric matrices of size 2..40")


def check_zero_kernel(cfg: RunConfig, tol: float) -> CheckResult:
    zero = FunctionKernel(lambda x, y: np.zeros((2, 2)))
    value = fredholm_pf(zero, make_grid(0.0, 12.0, 16))
    return _result("fredholm_pf_zero_kernel", abs(value - 1.0), tol)


def check_block_determinant(cfg: RunConfig, tol: float) -> CheckResult:
    kern = FiniteKernel(IDENTITY_PARAMS, "int")
    g = _identity_grid(kern)
    value = fredholm_pf(kern, g)
    det = fredholm_det_block(kern, g)
    return _result("fredholm_pf_squared_det", abs(value ** 2 - det), tol, f"pf = {value:.10g}")


def check_conjugation(cfg: RunConfig, tol: float) -> CheckResult:
    kern = FiniteKernel(IDENTITY_PARAMS, "int")
    g = _identity_grid(kern)
    mu = kern.conj_exponent
    values = [fredholm_pf(kern, g.balanced(m, kern.balance)) for m in (mu, 0.9 * mu)]
    return _result("conjugation_invariance", abs(values[0] - values[1]), tol, f"mu = {mu:.4g} and {0.9 * mu:.4g}")


def check_cyclic(cfg: RunConfig, tol: float) -> CheckResult:
    """pf(J + U C U^T)^2 = det(1 + C U^T J^{-1} U) for a finite-rank antisymmetric perturbation"""
    rng = np.random.default_rng(cfg.seed + 1)
    worst = 0.0
    for k in (1, 2, 3):
        for lam in (0.3, 1.0):
            U = rng.standard_normal((12, 2 * k))
            X = rng.standard_normal((2 * k, 2 * k))
            C = lam * (X - X.T)
            J = j_matrix(6)
            big = pf(J + U @ C @ U.T) ** 2
            small = float(np.linalg.det(np.eye(2 * k) + C @ U.T @ (-J) @ U))
            worst = max(worst, abs(big - small) / max(abs(small), 1.0))
    return _result("pf_cyclic_identity", worst, tol, "ranks 2, 4, 6 with lambda in {0.3, 1.0}")


def check_bracket_resolvent(cfg: RunConfig, tol: float) -> CheckResult:
    p = IDENTITY_PARAMS.stationary()
    kern = FiniteKernel(p, "limit")
    g = _identity_grid(kern)
    border = finite_border(IDENTITY_S, p, g)
    base, bracketed = bracket_pf(kern, border.left, border.right, g)
    direct = resolvent_inner(kern, border.left, border.right, g)
    return _result("bracket_vs_resolvent", abs(bracketed / base - direct), tol, f"bracket = {direct:.10g}")


def check_border_identities(cfg: RunConfig, tol: float) -> CheckResult:
    p = IDENTITY_PARAMS
    kern = FiniteKernel(p, "two_param")
    g = _identity_grid(kern)
    x = g.nodes
    g1, g2, fb = g_finite("g1", x, p), g_finite("g2", x, p), f_pm("plus", p.beta, x, p)
    zero = np.zeros_like(x)
    Y1, Y2 = (fb, zero), (-g1, g2)
    X1, X2 = (g2, g1), (zero, fb)
    y1z2 = resolvent_inner(kern, Y1, X2, g)
    y2z1 = resolvent_inner(kern, Y2, X1, g)
    diag = resolvent_inner(kern, Y1, X1, g) - resolvent_inner(kern, Y2, X2, g)
    worst = max(abs(y1z2), abs(y2z1), abs(diag))
    return _result("border_identities", worst, tol,
                   f"<Y1|Z2> = {y1z2:.3g}, <Y2|Z1> = {y2z1:.3g}, <Y1|Z1> - <Y2|Z2> = {diag:.3g}")


def check_grid_convergence(cfg: RunConfig, tol: float) -> CheckResult:
    kern = FiniteKernel(IDENTITY_PARAMS, "int")
    nodes = DEFAULT_SETTINGS.finite_grid_nodes
    coarse = fredholm_pf(kern, _identity_grid(kern, nodes))
    fine = fredholm_pf(kern, _identity_grid(kern, 2 * nodes))
    return _result("grid_convergence", abs(fine - coarse), tol, f"M = {nodes} vs {2 * nodes}")


# ----------------------------------------------------------------------
# formulas against simulation

def _stationary(cfg: RunConfig, N: int = 4, n: int = 1, alpha: float = 0.1) -> FiniteParams:
    return ParameterValidator.build(FiniteParams, N=int(param(cfg, "N", N)), n=int(param(cfg, "n", n)),
                                    alpha=float(param(cfg, "alpha", alpha)))


def _two_param(cfg: RunConfig) -> FiniteParams:
    base = IDENTITY_PARAMS
    return ParameterValidator.build(FiniteParams, N=int(param(cfg, "N", base.N)), n=int(param(cfg, "n", base.n)),
                                    alpha=float(param(cfg, "alpha", base.alpha)),
                                    beta=float(param(cfg, "beta", base.beta)))


def check_formula_vs_mc(cfg: RunConfig, tol: float) -> CheckResult:
    p = _stationary(cfg)
    m = ModelParams(mode=WeightMode.STATIONARY, N=p.N, n=p.n, alpha=p.alpha)
    grid = [max(s, 0.0) for s in pilot_grid(m, seed=cfg.seed + 1, threads=cfg.threads)]
    exact = cdf_stationary_finite(grid, p, grid=cfg.grid, threads=cfg.threads)
    mc = sample_cdf(m, "L", cfg.samples, cfg.seed, grid=exact.s_values, threads=cfg.threads)
    sup = float(np.max(np.abs(np.array(exact.F_values) - np.array(mc.empirical_cdf))))
    bound = max(tol, mc.dkw_band)
    return _result("formula_vs_mc", sup, bound, f"N={p.N}, n={p.n}, alpha={p.alpha}, {mc.samples} samples")


def check_two_param_vs_mc(cfg: RunConfig, tol: float) -> CheckResult:
    base = IDENTITY_PARAMS
    p = ParameterValidator.build(FiniteParams, N=int(param(cfg, "N", 4)), n=int(param(cfg, "n", base.n)),
                                 alpha=float(param(cfg, "alpha", base.alpha)),
                                 beta=float(param(cfg, "beta", base.beta)))
    m = ModelParams(mode=WeightMode.TWO_PARAM, N=p.N, n=p.n, alpha=p.alpha, beta=p.beta)
    grid = [max(s, 0.0) for s in pilot_grid(m, "L_pf", seed=cfg.seed + 1, threads=cfg.threads)]
    exact = cdf_two_param(grid, p, grid=cfg.grid, threads=cfg.threads)
    mc = sample_cdf(m, "L_pf", cfg.samples, cfg.seed, grid=exact.s_values, threads=cfg.threads)
    sup = float(np.max(np.abs(np.array(exact.F_values) - np.array(mc.empirical_cdf))))
    bound = max(tol, mc.dkw_band)
    return _result("two_param_vs_mc", sup, bound,
                   f"N={p.N}, n={p.n}, alpha={p.alpha}, beta={p.beta}, {mc.samples} samples")


def check_shift(cfg: RunConfig, tol: float) -> CheckResult:
    p = _two_param(cfg)
    m = ModelParams(mode=WeightMode.TWO_PARAM, N=p.N, n=p.n, alpha=p.alpha, beta=p.beta)
    grid = pilot_grid(m, "L_pf_minus_corner", points=17, seed=cfg.seed + 1, threads=cfg.threads)
    bound = max(tol, math.sqrt(math.log(2.0 / 0.003) / (2.0 * cfg.samples)))
    return shift_check([max(s, 0.0) for s in grid], p, cfg.samples, cfg.seed, bound, grid=cfg.grid,
                       threads=cfg.threads)


def check_continuation(cfg: RunConfig, tol: float) -> CheckResult:
    p = _stationary(cfg, N=3)
    s = float(param(cfg, "s", p.mean()))
    return continuation_check(s, p, grid=cfg.grid)


def check_br_limit(cfg: RunConfig, tol: float) -> CheckResult:
    return br_limit_check(float(param(cfg, "u", 3.0)), float(param(cfg, "tau", 0.0)), tolerance=tol)


def check_br_symmetry(cfg: RunConfig, tol: float) -> CheckResult:
    tau = float(param(cfg, "tau", 0.0))
    # tau = 0 is symmetric by definition
    return tau_symmetry_check(tau if tau != 0.0 else 0.5, tolerance=tol)


# ----------------------------------------------------------------------
# geometric model

def _geo(cfg: RunConfig, N: int) -> GeoParams:
    return ParameterValidator.build(GeoParams, a=float(param(cfg, "a", 0.5)), b=float(param(cfg, "b", 0.6)),
                                    q=float(param(cfg, "q", 0.3)), N=N, n=0)


def check_geo_corner(cfg: RunConfig, tol: float) -> CheckResult:
    p = _geo(cfg, 1)
    curve = cdf_geo(list(range(6)), p, threads=1)
    err = max(abs(pt.F - corner_cdf(int(pt.s), p)) for pt in curve.points)
    return _result("geo_corner_closed_form", err, tol, "N = 1, L = W_11 ~ Geom(ab)")


def check_geo_antisymmetry(cfg: RunConfig, tol: float) -> CheckResult:
    return _result("geo_antisymmetry", antisymmetry_defect(_geo(cfg, 3)), tol)


def check_geo_exponential(cfg: RunConfig, tol: float) -> CheckResult:
    return exponential_limit_check()


def check_geo_vs_mc(cfg: RunConfig, tol: float) -> CheckResult:
    p = _geo(cfg, int(param(cfg, "N", 3)))
    m = ModelParams(mode=WeightMode.GEOMETRIC, N=p.N, n=p.n, a=p.a, b=p.b, q=p.q)
    exact = cdf_geo(list(range(0, 4 * p.N + 1)), p, threads=cfg.threads)
    mc = sample_cdf(m, "L", cfg.samples, cfg.seed, grid=exact.s_values, threads=cfg.threads)
    sup = float(np.max(np.abs(np.array(exact.F_values) - np.array(mc.empirical_cdf))))
    return _result("geo_vs_mc", sup, max(tol, mc.dkw_band), f"a={p.a}, b={p.b}, q={p.q}, N={p.N}")


# ----------------------------------------------------------------------
# limit family

def check_mean(cfg: RunConfig, tol: float) -> CheckResult:
    p = ParameterValidator.build(AsympParams, delta=float(param(cfg, "delta", 0.3)), u=float(param(cfg, "u", 0.5)))
    m1 = moments_limit(p, 1)
    return _result("limit_mean", abs(m1 - p.mean()), tol, f"m1 = {m1:.8g}, delta(2u + delta) = {p.mean():.8g}")


def check_variance(cfg: RunConfig, tol: float) -> CheckResult:
    p = ParameterValidator.build(AsympParams, delta=0.0, u=float(param(cfg, "u", 0.5)))
    var = moments_limit(p, 2) - p.mean() ** 2
    return _result("limit_variance_positive", var, tol, below=False)


def check_variant_equivalence(cfg: RunConfig, tol: float) -> CheckResult:
    delta = float(param(cfg, "delta", -0.5))
    p = ParameterValidator.build(AsympParams, delta=delta if delta < 0 else -0.5, u=float(param(cfg, "u", 1.0)))
    S = float(param(cfg, "S", -1.0))
    standard = cdf_limit([S], p, "standard").F_values[0]
    simplified = cdf_limit([S], p, "delta_neg").F_values[0]
    return _result("variant_equivalence", abs(standard - simplified), tol,
                   f"delta={p.delta}, u={p.u}, S={S}: {standard:.8g} vs {simplified:.8g}")


def check_scaling(cfg: RunConfig, tol: float) -> CheckResult:
    p = ParameterValidator.build(AsympParams, delta=float(param(cfg, "delta", 0.0)), u=float(param(cfg, "u", 0.5)),
                                 S=float(param(cfg, "S", 0.0)))
    return scaling_convergence(p, tolerance=tol)


# ----------------------------------------------------------------------
# simulator

def check_dp_brute(cfg: RunConfig, tol: float) -> CheckResult:
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for N in range(1, 7):
        W = gen_weights(ModelParams(mode=WeightMode.STATIONARY, N=N, alpha=0.1), rng=rng)
        for n in range(N):
            end = (N, N - n)
            worst = max(worst, abs(lpp_time(W, end) - lpp_time_brute(W, end)))
    return _result("dp_vs_enumeration", worst, tol, "N = 1..6, all endpoints on the last column")


def check_sim_mean(cfg: RunConfig, tol: float) -> CheckResult:
    p = _stationary(cfg, N=10, n=2)
    m = ModelParams(mode=WeightMode.STATIONARY, N=p.N, n=p.n, alpha=p.alpha)
    summary = sample_cdf(m, "L", cfg.samples, cfg.seed, threads=cfg.threads)
    z = abs(summary.ks_stats["mean_z"])
    return _result("stationary_mean", z, tol, f"mean {summary.mean:.6g} vs {p.mean():.6g}")


def check_increments(cfg: RunConfig, tol: float) -> CheckResult:
    m = ModelParams(mode=WeightMode.STATIONARY, N=2, alpha=float(param(cfg, "alpha", 0.1)))
    report = increment_tests(m, int(param(cfg, "i", 1)), int(param(cfg, "j", 3)), cfg.samples, cfg.seed,
                             cfg.threads, significance=tol)
    worst = min(list(report.ks_pvalues.values()) + [1.0])
    return CheckResult(check="increment_stationarity", status="pass" if report.passed else "fail",
                       value=worst, tolerance=tol, details=f"KS {report.ks_pvalues}, corr {report.correlations}")


def check_path_increments(cfg: RunConfig, tol: float) -> CheckResult:
    m = ModelParams(mode=WeightMode.STATIONARY, N=2, alpha=float(param(cfg, "alpha", 0.1)))
    report = path_increment_test(m, int(param(cfg, "K", 3)), cfg.samples, cfg.seed, cfg.threads,
                                 significance=tol)
    worst = min(list(report.ks_pvalues.values()) + list(report.chi2_pvalues.values()) + [1.0])
    return CheckResult(check="path_increments", status="pass" if report.passed else "fail",
                       value=worst, tolerance=tol, details=f"{len(report.sites)} increments")


def _rule(name: str, check: Check, tolerance: float) -> Dict[str, Any]:
    return {"name": name, "check": check, "tolerance": tolerance}


SUITES: Dict[str, List[Dict[str, Any]]] = {
    "pfaffian": [
        _rule("pf_closed_forms", check_small_pfaffians, 1e-12),
        _rule("pf_squared_det", check_pf_squared_det, 1e-8),
        _rule("fredholm_pf_zero_kernel", check_zero_kernel, 0.0),
        _rule("fredholm_pf_squared_det", check_block_determinant, 1e-8),
        _rule("conjugation_invariance", check_conjugation, 1e-9),
        _rule("pf_cyclic_identity", check_cyclic, 1e-9),
        _rule("bracket_vs_resolvent", check_bracket_resolvent, 1e-7),
        _rule("border_identities", check_border_identities, 1e-6),
        _rule("grid_convergence", check_grid_convergence, 1e-7),
    ],
    "formula-vs-mc": [_rule("formula_vs_mc", check_formula_vs_mc, 0.005)],
    "two-param-vs-mc": [_rule("two_param_vs_mc", check_two_param_vs_mc, 0.005)],
    "shift": [_rule("shift_identity", check_shift, 0.006)],
    "continuation": [_rule("continuation", check_continuation, 0.0)],
    "br-limit": [
        _rule("br_limit", check_br_limit, 0.01),
        _rule("br_tau_symmetry", check_br_symmetry, 1e-6),
    ],
    "geometric": [
        _rule("geo_corner_closed_form", check_geo_corner, 1e-8),
        _rule("geo_antisymmetry", check_geo_antisymmetry, 1e-9),
        _rule("geo_exponential_limit", check_geo_exponential, 0.0),
        _rule("geo_vs_mc", check_geo_vs_mc, 0.005),
    ],
    "moments": [
        _rule("limit_mean", check_mean, 5e-3),
        _rule("limit_variance_positive", check_variance, 1e-6),
        _rule("variant_equivalence", check_variant_equivalence, 5e-4),
    ],
    "scaling": [_rule("scaling_convergence", check_scaling, 0.02)],
    "simulator": [
        _rule("dp_vs_enumeration", check_dp_brute, 1e-12),
        _rule("stationary_mean", check_sim_mean, 5.0),
        _rule("increment_stationarity", check_increments, 1e-3),
        _rule("path_increments", check_path_increments, 1e-3),
    ],
}


class VerificationAgent(BaseAgent):
    """
    Runs a named verification suite

    A suite is a list of rules {name, check, tolerance}; check(cfg, tolerance)
    returns a CheckResult. Numerical failures inside a check turn into a failed
    check; parameter errors propagate.
    """

    def __init__(self, suites: Optional[Dict[str, List[Dict[str, Any]]]] = None):
        super().__init__(
            name="VerificationAgent",
            description="Runs identity, cross-evaluation and Monte Carlo acceptance suites"
        )
        self.suites = dict(SUITES)
        if suites:
            self.suites.update(suites)

    async def process(self, payload: Dict[str, Any]) -> VerificationReport:
        self.start_processing()
        try:
            cfg = self.config_from(payload)
            suite = cfg.suite or "pfaffian"
            rules = self.suites.get(suite)
            if rules is None:
                raise ParameterDomainError("Unknown verification suite",
                                           errors=[f"suite must be one of {sorted(self.suites)}"])

            report = VerificationReport(suite=suite, checks=[self._run(rule, cfg) for rule in rules])
            if report.passed:
                self.logger.info(f"Suite {suite}: all {len(report.checks)} checks passed")
            else:
                self.logger.warning(f"Suite {suite}: failed {', '.join(report.failed_checks)}")
            self.log_processing(success=True)
            return report

        except Exception as e:
            logger.error(f"Verification error: {str(e)}")
            self.log_processing(success=False)
            raise

    def _run(self, rule: Dict[str, Any], cfg: RunConfig) -> CheckResult:
        try:
            result = rule["check"](cfg, rule["tolerance"])
        except ParameterDomainError:
            raise
        except LppError as e:
            logger.error(f"Check {rule['name']} raised {type(e).__name__}: {str(e)}")
            return CheckResult(check=rule["name"], status="fail", tolerance=rule["tolerance"],
                               details=f"{type(e).__name__}: {str(e)}")
        self.logger.info(f"{result.check}: {result.status} (value {result.value}, tolerance {result.tolerance})")
        return result

    def list_suites(self) -> Dict[str, List[str]]:
        return {name: [rule["name"] for rule in rules] for name, rules in self.suites.items()}
