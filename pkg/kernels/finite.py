"""
Finite-N kernels of half-space exponential LPP

FiniteKernel evaluates three kernels on grids:
    int        the two-parameter kernel K(alpha, beta)
    two_param  its split part K-bar, with K = K-bar + (alpha + beta) R
    limit      the stationary kernel K-bar obtained as beta -> -alpha

Each entry is a sum of separated double integrals over explicit pairs of
pole contours. Conjugation is folded into the exponents (see kernels.base).
"""
import math
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.params import FiniteParams, ContourSettings
from numerics.contours import Contour, PoleSpec, make_pair, make_pole_contour
from numerics.pfaffian import QuadratureGrid
from numerics.special_funcs import (
    HALF,
    log_phi,
    log_minus_type,
    log_plus_type,
    g_finite,
    f_pm,
    e_alpha,
    j_alpha,
    eps1_profile,
    laplace_sum,
)
from kernels.base import (
    Kernel2x2,
    KernelFamily,
    SeparableTerm,
    BorderVectors,
    evaluate_terms,
    span_key,
)
from utils.exceptions import ParameterDomainError
from utils.settings import NumericsSettings, DEFAULT_SETTINGS
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)

MODES = ("int", "two_param", "limit")

Pair = Tuple[PoleSpec, PoleSpec]


def _spec(enclosed: Sequence[float], excluded: Sequence[float] = ()) -> PoleSpec:
    return PoleSpec(tuple(enclosed), tuple(excluded))


def _contours(pairs: Sequence[Pair], settings: ContourSettings) -> Tuple[Tuple[Contour, Contour], ...]:
    return tuple(make_pair(zs, ws, settings) for zs, ws in pairs)


# w-side power factors: e^{yw} / Phi(y, w) with the (1/2 -+ w)^n weights
def _lw_plus(w: np.ndarray, p: FiniteParams) -> np.ndarray:
    return log_minus_type(-w, p)


def _lw_minus(w: np.ndarray, p: FiniteParams) -> np.ndarray:
    return log_plus_type(-w, p)


def _cross(scale: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    return lambda z, w: (z + w) / (scale * (z - w))


def _resolvent_cross(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return 1.0 / (z - w)


def conj_exponent(p: FiniteParams, mode: str, numerics: NumericsSettings = DEFAULT_SETTINGS) -> float:
    """
    Conjugation exponent making the conjugated entries decay

    K(alpha, beta) is balanced at (beta - alpha)/2, where 11 and 22 decay at the
    same rate (alpha + beta)/2; the split and stationary kernels use
    1/2 - 3 eps/4 with eps = 1/2 - |alpha| capped at finite_conj_eps_cap.
    """
    if mode == "int":
        return 0.5 * (p.beta - p.alpha)
    eps = min(HALF - abs(p.alpha), numerics.finite_conj_eps_cap)
    return HALF - 0.75 * eps


def decay_rate(p: FiniteParams, mode: str, mu: float) -> float:
    """Slowest exponential decay rate of the conjugated entries"""
    if mode == "int":
        return min(0.5 * (p.alpha + p.beta), HALF - abs(mu))
    rate = min(HALF - mu, mu - abs(p.alpha))
    if mode == "two_param":
        rate = min(rate, mu + p.beta)
    return rate


def cutoff(p: FiniteParams, s: float, rate: float, numerics: NumericsSettings = DEFAULT_SETTINGS) -> float:
    """
    Truncation length T of L^2(s, s+T)

    Large enough for the slowest exponential decay to reach decay_target and for
    the grid to extend finite_scale_widths fluctuation widths past the mean.
    """
    scale = 2.0 ** (4.0 / 3.0) * p.N ** (1.0 / 3.0)
    bulk = max(0.0, p.mean() - s) + numerics.finite_scale_widths * scale
    return max(numerics.decay_target / rate, bulk)


def core_length(p: FiniteParams, s: float, numerics: NumericsSettings = DEFAULT_SETTINGS) -> float:
    """Length of the part of the grid where the kernel is not yet a sum of pure exponentials"""
    scale = 2.0 ** (4.0 / 3.0) * p.N ** (1.0 / 3.0)
    return max(0.0, p.mean() - s) + numerics.finite_scale_widths * scale


class FiniteKernel(Kernel2x2):
    """
    Finite-N 2x2 kernel on L^2(s, infinity)

    Args:
        p: Finite parameters; beta is required for "int" and "two_param"
        mode: "int", "two_param" or "limit"
        settings: Contour node counts and placement
        numerics: Conjugation defaults
        continuation: Accept beta <= 0 with alpha + beta > 0

    Raises:
        ParameterDomainError: If the parameters do not fit the mode
    """

    def __init__(
        self,
        p: FiniteParams,
        mode: str = "limit",
        settings: Optional[ContourSettings] = None,
        numerics: NumericsSettings = DEFAULT_SETTINGS,
        continuation: bool = False,
    ):
        if mode not in MODES:
            raise ParameterDomainError(f"Unknown finite kernel mode {mode!r}", errors=[f"mode must be one of {MODES}"])
        if mode == "limit":
            ParameterValidator.validate_finite(p.stationary(), forbid_beta=True)
            p = p.stationary()
        else:
            ParameterValidator.validate_finite(p, require_beta=True, continuation=continuation)
        mu = conj_exponent(p, mode, numerics)
        super().__init__(conj_exponent=mu)
        self.p = p
        self.mode = mode
        # Phi(x, z) and the (1/2 -+ z)^n weights have poles of order up to N at +-1/2
        self.settings = (settings or ContourSettings()).sized_for(p.N + 1)
        self._cache: Dict[int, Dict[str, List[SeparableTerm]]] = {}
        self.family = {
            "int": KernelFamily.FINITE_K,
            "two_param": KernelFamily.FINITE_KBAR,
            "limit": KernelFamily.FINITE_KBAR_LIMIT,
        }[mode]
        self.decay = decay_rate(p, mode, mu)
        # diag(2^n, 2^-n) balances the (1/2 -+ z)^n weights of the two components
        self.balance = p.n * math.log(2.0)
        rate = self.decay
        self.growth = {"11": (-rate, -rate), "12": (-rate, -rate), "21": (-rate, -rate), "22": (-rate, -rate)}
        logger.debug(f"{self.family.code}: mu={mu:.4g}, decay={rate:.4g}, pole order {self.settings.pole_order}")

    # ------------------------------------------------------------------
    # term tables

    def terms_for(self, x_max: float) -> Dict[str, List[SeparableTerm]]:
        """Term tables whose circles resolve e^{-xz} for |x| <= x_max, cached per span bucket"""
        key = span_key(x_max)
        if key not in self._cache:
            self._cache[key] = self._build_terms(self.settings.sized_for(1, key))
            logger.debug(f"{self.family.code}: contours for |x| <= {key}, "
                         + ", ".join(f"{k}:{sum(t.contours[0][0].node_count for t in v)} z-nodes"
                                     for k, v in self._cache[key].items()))
        return self._cache[key]

    def _build_terms(self, s: ContourSettings) -> Dict[str, List[SeparableTerm]]:
        p = self.p
        a = p.alpha
        if self.mode == "limit":
            return {
                "11": [SeparableTerm(
                    -1.0,
                    lambda z: log_minus_type(z, p) + np.log((z - a) / z),
                    lambda w: _lw_plus(w, p) + np.log((w + a) / w),
                    _cross(4.0),
                    _contours([(_spec([HALF], [0.0]), _spec([-HALF], [0.0]))], s),
                )],
                "12": [self._limit_12([HALF], [0.0], [-HALF, a], [], s)],
                "22": [
                    SeparableTerm(
                        1.0,
                        lambda z: log_plus_type(z, p) - np.log(z + a),
                        lambda w: _lw_minus(w, p),
                        _resolvent_cross,
                        _contours([(_spec([HALF, -a]), _spec([-HALF]))], s),
                    ),
                    SeparableTerm(
                        1.0,
                        lambda z: log_plus_type(z, p),
                        lambda w: _lw_minus(w, p) - np.log(w - a),
                        _resolvent_cross,
                        _contours([(_spec([HALF]), _spec([-HALF, a]))], s),
                    ),
                ],
            }

        b = p.beta
        log_a11 = lambda z: log_minus_type(z, p) + np.log((z + b) * (z + a) / ((z - b) * z))
        log_b11 = lambda w: _lw_plus(w, p) + np.log((w - b) * (w - a) / ((w + b) * w))
        log_a12 = lambda z: log_minus_type(z, p) + np.log((z + a) * (z + b) / ((z - b) * z))
        log_b12 = lambda w: _lw_minus(w, p) + np.log((w - b) / ((w + a) * (w + b)))
        log_a22 = lambda z: log_plus_type(z, p) + np.log((z + b) / ((z - a) * (z - b)))
        log_b22 = lambda w: _lw_minus(w, p) + np.log((w - b) / ((w + a) * (w + b)))

        pairs11 = [(_spec([HALF], [b, 0.0]), _spec([-HALF], [-b, 0.0]))]
        pairs12 = [(_spec([HALF], [b, 0.0]), _spec([-HALF, -a, -b]))]
        if self.mode == "int":
            pairs11 += [
                (_spec([HALF], [b, 0.0]), _spec([-b], [-HALF, 0.0])),
                (_spec([b], [HALF, 0.0]), _spec([-HALF], [-b, 0.0])),
            ]
            pairs12 += [(_spec([b], [HALF, 0.0]), _spec([-HALF, -a], [-b]))]
        pairs22 = [
            (_spec([HALF, a, b]), _spec([-HALF], [-a, -b])),
            (_spec([HALF, b], [a]), _spec([-a], [-HALF, -b])),
            (_spec([HALF, a], [b]), _spec([-b], [-HALF, -a])),
        ]
        return {
            "11": [SeparableTerm(-1.0, log_a11, log_b11, _cross(4.0), _contours(pairs11, s))],
            "12": [SeparableTerm(-1.0, log_a12, log_b12, _cross(2.0), _contours(pairs12, s))],
            "22": [SeparableTerm(1.0, log_a22, log_b22, _cross(1.0), _contours(pairs22, s))],
        }

    def _limit_12(self, z_in, z_out, w_in, w_out, s: ContourSettings) -> SeparableTerm:
        p, a = self.p, self.p.alpha
        return SeparableTerm(
            -1.0,
            lambda z: log_minus_type(z, p) + np.log((z - a) / z),
            lambda w: _lw_minus(w, p) - np.log(w - a),
            _cross(2.0),
            _contours([(_spec(z_in, z_out), _spec(w_in, w_out))], s),
        )

    # ------------------------------------------------------------------
    # evaluation

    def entries(self, xs: np.ndarray, ys: np.ndarray, mu: float, center: float) -> np.ndarray:
        ex = mu * (xs - center)
        ey = mu * (ys - center)
        where = self.family.code
        terms = self.terms_for(max(float(np.max(np.abs(xs))), float(np.max(np.abs(ys)))))
        out = np.empty((2, 2, xs.size, ys.size))
        out[0, 0] = evaluate_terms(terms["11"], xs, ys, ex, ey, where)
        out[0, 1] = evaluate_terms(terms["12"], xs, ys, ex, -ey, where)
        if xs is ys or (xs.shape == ys.shape and np.array_equal(xs, ys)):
            out[1, 0] = -out[0, 1].T
        else:
            out[1, 0] = -evaluate_terms(terms["12"], ys, xs, ey, -ex, where).T
        out[1, 1] = evaluate_terms(terms["22"], xs, ys, -ex, -ey, where)
        out[1, 1] += self._step_terms(xs, ys, ex, ey)
        return out

    def _step_terms(self, xs: np.ndarray, ys: np.ndarray, ex: np.ndarray, ey: np.ndarray) -> np.ndarray:
        """Conjugated eps0 (limit) or eps2 (two-parameter) plus eps1"""
        sgn = np.sign(xs[:, None] - ys[None, :])
        return sgn * self._step_magnitude(np.abs(xs[:, None] - ys[None, :]), -(ex[:, None] + ey[None, :]))

    def _step_magnitude(self, d: np.ndarray, conj: np.ndarray) -> np.ndarray:
        p = self.p
        rate = p.alpha if self.mode == "limit" else -p.alpha
        log_norm = p.n * math.log(0.25 - p.alpha ** 2)
        out = -np.exp(rate * d + conj - log_norm)
        if p.n > 0:
            profile = eps1_profile(d.ravel(), p, self.settings).reshape(d.shape)
            out -= profile * np.exp(conj)
        return out

    def step_profile(self, xs, ys, mu: float = 0.0, center: float = 0.0) -> np.ndarray:
        """Elementwise E with step terms sgn(x - y) E(x, y), conjugated like the 22 entry"""
        xs, ys = np.broadcast_arrays(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
        return self._step_magnitude(np.abs(xs - ys), -mu * (xs - center) - mu * (ys - center))

    # ------------------------------------------------------------------
    # rank-two remainder

    def remainder(self, xs, ys) -> np.ndarray:
        """
        R with K = K-bar + (alpha + beta) R, unconjugated

        R11 = g1(x) f+^beta(y) - f+^beta(x) g1(y), R12 = f+^beta(x) g2(y),
        R21 = -g2(x) f+^beta(y), R22 = 0.
        """
        if self.mode == "limit":
            raise ParameterDomainError("The stationary kernel has no remainder", errors=["mode=limit"])
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        p, b = self.p, self.p.beta
        g1x, g1y = g_finite("g1", xs, p, self.settings), g_finite("g1", ys, p, self.settings)
        g2x, g2y = g_finite("g2", xs, p, self.settings), g_finite("g2", ys, p, self.settings)
        fx, fy = f_pm("plus", b, xs, p), f_pm("plus", b, ys, p)
        out = np.zeros((2, 2, xs.size, ys.size))
        out[0, 0] = np.outer(g1x, fy) - np.outer(fx, g1y)
        out[0, 1] = np.outer(fx, g2y)
        out[1, 0] = -np.outer(g2x, fy)
        return out

    def describe(self):
        info = super().describe()
        info.update({"mode": self.mode, "decay": self.decay, "params": self.p.model_dump()})
        return info


# ----------------------------------------------------------------------
# tilde kernels and the h border functions

class TildeKernel:
    """
    The pair (K~12, K~22) of the stationary formula

    Unlike FiniteKernel this is not an antisymmetric kernel: the w contours
    stay away from alpha, so both entries decay in y.
    """

    def __init__(self, p: FiniteParams, settings: Optional[ContourSettings] = None):
        ParameterValidator.validate_finite(p.stationary(), forbid_beta=True)
        self.p = p.stationary()
        self.settings = (settings or ContourSettings()).sized_for(self.p.N + 1)
        self.family = KernelFamily.FINITE_KTILDE

    def _term12(self, w_in, w_out, span: float) -> SeparableTerm:
        p, a = self.p, self.p.alpha
        return SeparableTerm(
            -1.0,
            lambda z: log_minus_type(z, p) + np.log((z - a) / z),
            lambda w: _lw_minus(w, p) - np.log(w - a),
            _cross(2.0),
            _contours([(_spec([HALF], [0.0]), _spec(w_in, w_out))], self.settings.sized_for(1, span_key(span))),
        )

    def _term22(self, w_in, w_out, span: float) -> SeparableTerm:
        p, a = self.p, self.p.alpha
        return SeparableTerm(
            1.0,
            lambda z: log_plus_type(z, p) - np.log(z + a),
            lambda w: _lw_minus(w, p) - np.log(w - a),
            _cross(1.0),
            _contours([(_spec([HALF, -a]), _spec(w_in, w_out))], self.settings.sized_for(1, span_key(span))),
        )

    def values(self, xs, ys) -> Tuple[np.ndarray, np.ndarray]:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        span = max(float(np.max(np.abs(xs))), float(np.max(np.abs(ys))))
        a = self.p.alpha
        zx, zy = np.zeros(xs.size), np.zeros(ys.size)
        k12 = self._term12([-HALF], [a], span).evaluate(xs, ys, zx, zy, "Ktilde12")
        k22 = self._term22([-HALF], [a], span).evaluate(xs, ys, zx, zy, "Ktilde22")
        return k12, k22

    def against_exponential(self, ys, s: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        int_s^infinity K~(y, v) f+^{-alpha}(v) dv for K~12 and K~22

        f+^{-alpha}(v) = C e^{alpha v}, and int_s^inf e^{v(w + alpha)} dv
        = -e^{s(w + alpha)}/(w + alpha) on w contours left of -alpha.
        """
        p, a = self.p, self.p.alpha
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        span = max(float(np.max(np.abs(ys))), abs(s))
        log_c = float(np.real(log_phi(np.asarray(-a, dtype=complex), p.N))) + p.n * math.log(HALF + a)
        shift = np.array([a * s + log_c])
        out = []
        for term, label in ((self._term12([-HALF], [a, -a], span), "h2"),
                            (self._term22([-HALF], [a, -a], span), "h1")):
            integrated = SeparableTerm(
                -term.coef,
                term.log_a,
                lambda w, lb=term.log_b: lb(w) - np.log(w + a),
                term.cross,
                term.contours,
            )
            out.append(integrated.evaluate(ys, np.array([s]), np.zeros(ys.size), shift, label)[:, 0])
        return out[0], out[1]


def eps1_against_exponential(ys, s: float, p: FiniteParams,
                             settings: Optional[ContourSettings] = None) -> np.ndarray:
    """
    int_s^infinity eps1(y, v) f+^{-alpha}(v) dv for y >= s

    With g(z) = 2z/((z^2 - alpha^2)(1/4 - z^2)^n) this is
    C [e^{alpha y} oint g (1/(z-alpha) - 1/(z+alpha)) + e^{alpha s} oint g e^{-z(y-s)}/(z+alpha)].
    """
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if p.n == 0:
        return np.zeros_like(ys)
    a = p.alpha
    sized = (settings or ContourSettings()).sized_for(p.n + 2, float(np.max(np.abs(ys - s))))
    contour = make_pole_contour(_spec([HALF], [a, -a, -HALF]), sized)
    z = contour.nodes
    log_g = np.log(2 * z / (z * z - a * a)) - p.n * (np.log(HALF - z) + np.log(HALF + z))
    log_c = float(np.real(log_phi(np.asarray(-a, dtype=complex), p.N))) + p.n * math.log(HALF + a)
    whole = laplace_sum([0.0], log_g + np.log(1.0 / (z - a) - 1.0 / (z + a)), contour, "eps1_f")[0]
    tail = laplace_sum(ys - s, log_g - np.log(z + a), contour, "eps1_f")
    return np.exp(a * ys + log_c) * whole + np.exp(a * s + log_c) * tail


def border_h(ys, s: float, p: FiniteParams, grid: Optional[QuadratureGrid] = None,
             settings: Optional[ContourSettings] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Border functions h1 and h2 of the stationary formula

    h1 = K~22 f + eps1 f - g4* - j^alpha(s, .) and h2 = K~12 f + g3*, where
    f = f+^{-alpha} and the products are taken over L^2(s, infinity).

    Args:
        ys: Evaluation points; defaults to the grid nodes when None
        s: Lower end of L^2(s, infinity)
        p: Stationary parameters
        grid: Quadrature grid supplying the nodes when ys is None

    Returns:
        (h1, h2) arrays
    """
    if ys is None:
        if grid is None:
            raise ParameterDomainError("border_h needs points or a grid", errors=["ys and grid are both None"])
        ys = grid.nodes
    p = p.stationary()
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    tilde = TildeKernel(p, settings)
    k12f, k22f = tilde.against_exponential(ys, s)
    h1 = (
        k22f
        + eps1_against_exponential(ys, s, p, settings)
        - g_finite("gs4", ys, p, settings)
        - np.asarray(j_alpha(s, ys, p))
    )
    h2 = k12f + g_finite("gs3", ys, p, settings)
    return h1, h2


def finite_border(s: float, p: FiniteParams, grid: QuadratureGrid,
                  settings: Optional[ContourSettings] = None) -> BorderVectors:
    """Border vectors ((-g1, g2), (-h1, h2)) and e^alpha(s) on the grid nodes"""
    p = p.stationary()
    nodes = grid.nodes
    h1, h2 = border_h(nodes, s, p, settings=settings)
    left = (-g_finite("g1", nodes, p, settings), g_finite("g2", nodes, p, settings))
    return BorderVectors(nodes=nodes, left=left, right=(-h1, h2), scalar=float(e_alpha(s, p, settings)))


# ----------------------------------------------------------------------
# point evaluators

def kernel_int(x: float, y: float, p: FiniteParams, settings: Optional[ContourSettings] = None,
               continuation: bool = False) -> np.ndarray:
    """Two-parameter kernel K(x, y) as a 2x2 array"""
    return FiniteKernel(p, "int", settings, continuation=continuation)(x, y)


def kernel_bar(x: float, y: float, p: FiniteParams, mode: str = "two_param",
               settings: Optional[ContourSettings] = None, continuation: bool = False) -> np.ndarray:
    """
    Split kernel K-bar (mode "two_param") or stationary kernel (mode "limit")

    Raises:
        ParameterDomainError: For an unknown mode or parameters outside its domain
    """
    if mode not in ("two_param", "limit"):
        raise ParameterDomainError(f"Unknown kernel_bar mode {mode!r}", errors=["mode must be two_param or limit"])
    return FiniteKernel(p, mode, settings, continuation=continuation)(x, y)


def kernel_tilde(x: float, y: float, p: FiniteParams,
                 settings: Optional[ContourSettings] = None) -> Tuple[float, float]:
    """(K~12(x, y), K~22(x, y))"""
    k12, k22 = TildeKernel(p, settings).values([x], [y])
    return float(k12[0, 0]), float(k22[0, 0])
