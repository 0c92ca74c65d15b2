"""
Critical-scaling limit kernels

AsympKernel is the antisymmetric kernel A-bar of the limiting distribution
F^(delta,u); AsympTilde holds the pair (A~12, A~22) entering the border
functions. All double integrals run over Airy contours: zeta on a "down"
contour (e^{i pi/3} infinity to e^{-i pi/3} infinity) and omega on an "up"
contour, placed so that the conjugated entries decay on L^2(S, infinity).
"""
import math
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from models.params import AsympParams, ContourSettings
from numerics.contours import Contour, airy_node_count, make_airy, make_vertical, integrate2_separable
from numerics.pfaffian import QuadratureGrid
from numerics.special_funcs import (
    AIRY_OFFSET,
    GAUSS_DECAY,
    E1_contour,
    E1_profile,
    e_scal,
    g_scal,
    j_scal,
    laplace_sum,
    to_real,
)
from kernels.base import Kernel2x2, KernelFamily, SeparableTerm, BorderVectors, evaluate_terms, span_key
from utils.exceptions import ParameterDomainError
from utils.settings import NumericsSettings, DEFAULT_SETTINGS
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)

VARIANTS = ("standard", "delta_neg")


def _airy_pair(z_anchor: float, w_anchor: float, settings: ContourSettings,
               quad: float = 0.0) -> Tuple[Contour, Contour]:
    if not w_anchor < z_anchor:
        raise ParameterDomainError(
            "omega contour must cross left of the zeta contour",
            errors=[f"z_anchor={z_anchor}, w_anchor={w_anchor}"],
        )
    nodes = max(airy_node_count(settings.x_span, settings, z_anchor, quad),
                airy_node_count(settings.x_span, settings, w_anchor, quad))
    return (make_airy("down", z_anchor, settings.ray_length, nodes),
            make_airy("up", w_anchor, settings.ray_length, nodes))


def _cross(scale: float):
    return lambda z, w: (z + w) / (scale * (z - w))


def _resolvent_cross(z, w):
    return 1.0 / (z - w)


def conj_exponent(p: AsympParams, numerics: NumericsSettings = DEFAULT_SETTINGS) -> float:
    """mu = |delta| + asymp_conj_offset"""
    return abs(p.delta) + numerics.asymp_conj_offset


class AsympKernel(Kernel2x2):
    """
    Limit kernel A-bar with delta real and u >= 0

    Contour anchors depend on the conjugation exponent mu: the row-1 zeta
    anchors sit right of mu, the column-1 omega anchors left of -mu and the
    second-component anchors on the mirrored sides.
    """

    family = KernelFamily.ASYMP_ABAR

    def __init__(self, p: AsympParams, settings: Optional[ContourSettings] = None,
                 numerics: NumericsSettings = DEFAULT_SETTINGS):
        ParameterValidator.validate_asymp(p)
        mu = conj_exponent(p, numerics)
        super().__init__(conj_exponent=mu)
        self.p = p
        self.settings = settings or ContourSettings()
        self._cache: Dict[int, Dict[str, List[SeparableTerm]]] = {}
        self.balance = 0.0
        self.decay = 0.5
        logger.debug(f"{self.family.code}: delta={p.delta:.4g}, u={p.u:.4g}, mu={mu:.4g}")

    def terms_for(self, x_max: float) -> Dict[str, List[SeparableTerm]]:
        """Term tables whose rays resolve e^{-zeta x} for |x| <= x_max, cached per span bucket"""
        key = span_key(x_max)
        if key not in self._cache:
            self._cache[key] = self._build_terms(self.conj_exponent, self.settings.sized_for(1, key))
        return self._cache[key]

    def _build_terms(self, mu: float, s: ContourSettings) -> Dict[str, List[SeparableTerm]]:
        d, u = self.p.delta, self.p.u
        b12 = d + 0.25
        a1 = -d - 0.25
        b2 = d + 0.25
        return {
            "11": [SeparableTerm(
                -1.0,
                lambda z: z ** 3 / 3.0 - u * z * z + np.log((z - d) / z),
                lambda w: -w ** 3 / 3.0 - u * w * w + np.log((w + d) / w),
                _cross(4.0),
                (_airy_pair(mu + AIRY_OFFSET, -mu - AIRY_OFFSET, s, u),),
            )],
            "12": [SeparableTerm(
                -1.0,
                lambda z: z ** 3 / 3.0 - u * z * z + np.log((z - d) / z),
                lambda w: -w ** 3 / 3.0 + u * w * w - np.log(w - d),
                _cross(2.0),
                (_airy_pair(max(mu, b12) + AIRY_OFFSET, b12, s, u),),
            )],
            "22": [
                SeparableTerm(
                    1.0,
                    lambda z: z ** 3 / 3.0 + u * z * z - np.log(z + d),
                    lambda w: -w ** 3 / 3.0 + u * w * w,
                    _resolvent_cross,
                    (_airy_pair(a1, min(a1, mu) - AIRY_OFFSET, s, u),),
                ),
                SeparableTerm(
                    1.0,
                    lambda z: z ** 3 / 3.0 + u * z * z,
                    lambda w: -w ** 3 / 3.0 + u * w * w - np.log(w - d),
                    _resolvent_cross,
                    (_airy_pair(max(b2 + AIRY_OFFSET, -mu + AIRY_OFFSET), b2, s, u),),
                ),
            ],
        }

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

    def _step_terms(self, xs, ys, ex, ey) -> np.ndarray:
        """Conjugated E0 + E1"""
        sgn = np.sign(xs[:, None] - ys[None, :])
        return sgn * self._step_magnitude(np.abs(xs[:, None] - ys[None, :]), -(ex[:, None] + ey[None, :]))

    def _step_magnitude(self, dist: np.ndarray, conj: np.ndarray) -> np.ndarray:
        d, u = self.p.delta, self.p.u
        out = -np.exp(d * dist + 2.0 * d * d * u + conj)
        if u > 0.0:
            profile = E1_profile(dist.ravel(), self.p, self.settings).reshape(dist.shape)
            out -= profile * np.exp(conj)
        return out

    def step_profile(self, xs, ys, mu: float = 0.0, center: float = 0.0) -> np.ndarray:
        """Elementwise E with E0 + E1 = sgn(x - y) E(x, y), conjugated like the 22 entry"""
        xs, ys = np.broadcast_arrays(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
        return self._step_magnitude(np.abs(xs - ys), -mu * (xs - center) - mu * (ys - center))

    def describe(self):
        info = super().describe()
        info.update({"params": self.p.model_dump()})
        return info


class AsympTilde:
    """
    The pair (A~12, A~22) and the products with f^{-delta,u} on L^2(S, infinity)

    The omega contours stay left of -|delta| so that int_S^inf e^{(omega + delta) V} dV
    = -e^{(omega + delta) S}/(omega + delta) can be taken in closed form.
    """

    family = KernelFamily.ASYMP_ATILDE

    def __init__(self, p: AsympParams, settings: Optional[ContourSettings] = None,
                 numerics: NumericsSettings = DEFAULT_SETTINGS):
        ParameterValidator.validate_asymp(p)
        self.p = p
        self.settings = settings or ContourSettings()
        self.mu = conj_exponent(p, numerics)

    def terms(self, span: float) -> Tuple[SeparableTerm, SeparableTerm]:
        """(A~12, A~22) with rays resolving arguments up to |span|"""
        d, u, mu = self.p.delta, self.p.u, self.mu
        s = self.settings.sized_for(1, span_key(span))
        t12 = SeparableTerm(
            -1.0,
            lambda z: z ** 3 / 3.0 - u * z * z + np.log((z - d) / z),
            lambda w: -w ** 3 / 3.0 + u * w * w - np.log(w - d),
            _cross(2.0),
            (_airy_pair(mu + AIRY_OFFSET, -abs(d) - AIRY_OFFSET, s, u),),
        )
        t22 = SeparableTerm(
            1.0,
            lambda z: z ** 3 / 3.0 + u * z * z - np.log(z + d),
            lambda w: -w ** 3 / 3.0 + u * w * w - np.log(w - d),
            _cross(1.0),
            (_airy_pair(-d - AIRY_OFFSET, -abs(d) - 2 * AIRY_OFFSET, s, u),),
        )
        return t12, t22

    def values(self, xs, ys) -> Tuple[np.ndarray, np.ndarray]:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        t12, t22 = self.terms(max(float(np.max(np.abs(xs))), float(np.max(np.abs(ys)))))
        zx, zy = np.zeros(xs.size), np.zeros(ys.size)
        return (t12.evaluate(xs, ys, zx, zy, "Atilde12"),
                t22.evaluate(xs, ys, zx, zy, "Atilde22"))

    def against_exponential(self, ys, S: float) -> Tuple[np.ndarray, np.ndarray]:
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        t12, t22 = self.terms(max(float(np.max(np.abs(ys))), abs(S)))
        return (_against_exponential(t12, ys, S, self.p, "h2_asymp"),
                _against_exponential(t22, ys, S, self.p, "h1_asymp"))


def _against_exponential(term: SeparableTerm, ys, S: float, p: AsympParams, where: str) -> np.ndarray:
    """int_S^inf term(y, V) f^{-delta,u}(V) dV, valid when Re(omega + delta) < 0 on the contours"""
    d, u = p.delta, p.u
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    for _, cw in term.contours:
        worst = float(np.max(cw.nodes.real + d))
        if worst >= 0.0:
            raise ParameterDomainError(
                "omega contour must lie left of -delta for the exponential product",
                errors=[f"max Re(omega + delta) = {worst:.3g}"],
            )
    integrated = SeparableTerm(
        -term.coef,
        term.log_a,
        lambda w: term.log_b(w) - np.log(w + d),
        term.cross,
        term.contours,
    )
    shift = np.array([d * S - d ** 3 / 3.0 - d * d * u])
    return integrated.evaluate(ys, np.array([S]), np.zeros(ys.size), shift, where)[:, 0]


def E1_against_exponential(ys, S: float, p: AsympParams,
                           settings: Optional[ContourSettings] = None) -> np.ndarray:
    """
    int_S^inf E1(Y, V) f^{-delta,u}(V) dV for Y >= S

    With g(zeta) = e^{2 u zeta^2} 2 zeta/(zeta^2 - delta^2) on the line right of +-delta:
    f(Y) oint g (1/(zeta-delta) - 1/(zeta+delta)) + f(S) oint g e^{-zeta(Y-S)}/(zeta+delta).
    """
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if p.u == 0.0:
        return np.zeros_like(ys)
    d, u = p.delta, p.u
    contour = E1_contour(p, float(np.max(ys - S)) if ys.size else 0.0, settings)
    z = contour.nodes
    log_g = 2.0 * u * z * z + np.log(2 * z / (z * z - d * d))
    whole = laplace_sum([0.0], log_g + np.log(1.0 / (z - d) - 1.0 / (z + d)), contour, "E1_f")[0]
    tail = laplace_sum(ys - S, log_g - np.log(z + d), contour, "E1_f")
    pref = -d ** 3 / 3.0 - d * d * u
    return np.exp(pref + d * ys) * whole + np.exp(pref + d * S) * tail


def E0_against_exponential(ys, S: float, p: AsympParams) -> np.ndarray:
    """int_S^inf E0(Y, V) f^{-delta,u}(V) dV for Y >= S, convergent for delta < 0"""
    d, u = p.delta, p.u
    if d >= 0.0:
        raise ParameterDomainError("E0 f product needs delta < 0", errors=[f"delta={d}"])
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    return -np.exp(d * d * u - d ** 3 / 3.0 + d * ys) * ((ys - S) + 1.0 / (2.0 * d))


def _abar_for_product(p: AsympParams, settings: ContourSettings) -> Dict[str, List[SeparableTerm]]:
    """A-bar 12 and 22 double integrals with every omega contour left of -delta (delta < 0)"""
    d, u = p.delta, p.u
    b12 = 0.5 * d
    a1 = -d - 0.25
    return {
        "12": [SeparableTerm(
            -1.0,
            lambda z: z ** 3 / 3.0 - u * z * z + np.log((z - d) / z),
            lambda w: -w ** 3 / 3.0 + u * w * w - np.log(w - d),
            _cross(2.0),
            (_airy_pair(max(b12, 0.0) + AIRY_OFFSET, b12, settings, u),),
        )],
        "22": [
            SeparableTerm(
                1.0,
                lambda z: z ** 3 / 3.0 + u * z * z - np.log(z + d),
                lambda w: -w ** 3 / 3.0 + u * w * w,
                _resolvent_cross,
                (_airy_pair(a1, a1 - AIRY_OFFSET, settings, u),),
            ),
            SeparableTerm(
                1.0,
                lambda z: z ** 3 / 3.0 + u * z * z,
                lambda w: -w ** 3 / 3.0 + u * w * w - np.log(w - d),
                _resolvent_cross,
                (_airy_pair(b12 + AIRY_OFFSET, b12, settings, u),),
            ),
        ],
    }


def border_h_asymp(ys, S: float, p: AsympParams, grid: Optional[QuadratureGrid] = None,
                   variant: str = "standard",
                   settings: Optional[ContourSettings] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Border functions of the limiting distribution

    standard:  h1 = A~22 f + E1 f - g4 - j(S, .),  h2 = A~12 f + g3
    delta_neg: h1 = A-bar22 f - g4,                 h2 = A-bar12 f + g3   (delta < 0)

    Raises:
        ParameterDomainError: For delta_neg with delta >= 0 or an unknown variant
    """
    if variant not in VARIANTS:
        raise ParameterDomainError(f"Unknown variant {variant!r}", errors=[f"variant must be one of {VARIANTS}"])
    if variant == "delta_neg" and p.delta >= 0.0:
        raise ParameterDomainError("delta_neg variant needs delta < 0", errors=[f"delta={p.delta}"])
    if ys is None:
        if grid is None:
            raise ParameterDomainError("border_h_asymp needs points or a grid", errors=["ys and grid are both None"])
        ys = grid.nodes
    settings = settings or ContourSettings()
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    g3 = g_scal(3, ys, p, settings)
    g4 = g_scal(4, ys, p, settings)

    if variant == "standard":
        a12f, a22f = AsympTilde(p, settings).against_exponential(ys, S)
        h1 = a22f + E1_against_exponential(ys, S, p, settings) - g4 - j_scal(S, ys, p)
        return h1, a12f + g3

    terms = _abar_for_product(p, settings.sized_for(1, span_key(max(float(np.max(np.abs(ys))), abs(S)))))
    a12f = sum(_against_exponential(t, ys, S, p, "h2_tilde") for t in terms["12"])
    a22f = sum(_against_exponential(t, ys, S, p, "h1_tilde") for t in terms["22"])
    a22f = a22f + E0_against_exponential(ys, S, p) + E1_against_exponential(ys, S, p, settings)
    return a22f - g4, a12f + g3


def asymp_border(S: float, p: AsympParams, grid: QuadratureGrid, variant: str = "standard",
                 settings: Optional[ContourSettings] = None) -> BorderVectors:
    """Border vectors ((-g1, g2), (-h1, h2)) and e^{delta,u}(S) on the grid nodes"""
    nodes = grid.nodes
    h1, h2 = border_h_asymp(nodes, S, p, variant=variant, settings=settings)
    left = (-g_scal(1, nodes, p, settings), g_scal(2, nodes, p, settings))
    return BorderVectors(nodes=nodes, left=left, right=(-h1, h2), scalar=float(e_scal(S, p, settings)[0]))


# ----------------------------------------------------------------------
# delta < 0 representations

def abar22_vertical(X, Y, p: AsympParams, mu_line: Optional[float] = None,
                    settings: Optional[ContourSettings] = None) -> np.ndarray:
    """
    A-bar22 for delta < 0 as a double integral over vertical lines

    -int_{-m + iR} dzeta int_{m + iR} domega e^{zeta^3/3 + u zeta^2 - zeta X}
    / e^{omega^3/3 - u omega^2 - omega Y} (1/(zeta+delta) + 1/(omega-delta))/(zeta-omega)
    with 0 < m < min(-delta, u); no E term appears in this form.
    """
    d, u = p.delta, p.u
    errors = []
    if d >= 0.0:
        errors.append(f"delta must be negative, got {d}")
    if u <= 0.0:
        errors.append(f"u must be positive, got {u}")
    limit = min(-d, u)
    if mu_line is None:
        mu_line = 0.5 * limit
    elif not 0.0 < mu_line < limit:
        errors.append(f"line abscissa must lie in (0, {limit:.4g}), got {mu_line}")
    if errors:
        raise ParameterDomainError("Invalid vertical representation", errors=errors)

    settings = settings or ContourSettings()
    X = np.atleast_1d(np.asarray(X, dtype=float))
    Y = np.atleast_1d(np.asarray(Y, dtype=float))
    half_height = math.sqrt(GAUSS_DECAY / (u - mu_line))
    frequency = half_height ** 2 + u * half_height + max(float(np.max(np.abs(X))), float(np.max(np.abs(Y))))
    nodes = max(settings.vertical_nodes, int(math.ceil(2.0 * half_height * frequency / math.pi)) + 16)
    cz = make_vertical(-mu_line, half_height, nodes)
    cw = make_vertical(mu_line, half_height, nodes)
    z, w = cz.nodes, cw.nodes
    A = np.exp(z[None, :] ** 3 / 3.0 + u * z[None, :] ** 2 - np.outer(X, z))
    B = np.exp(-w[None, :] ** 3 / 3.0 + u * w[None, :] ** 2 + np.outer(Y, w))
    C = (1.0 / (z[:, None] + d) + 1.0 / (w[None, :] - d)) / (z[:, None] - w[None, :])
    val = integrate2_separable(A, C, B, cz, cw, coef=-1.0)
    mass = np.abs(A * cz.weights[None, :]) @ np.abs(C) @ np.abs(B * cw.weights[None, :]).T
    return to_real(val, mass, "Abar22_vertical")


def tilde_identities(X, Y, p: AsympParams, settings: Optional[ContourSettings] = None) -> Dict[str, np.ndarray]:
    """
    Residuals of the delta < 0 relations between tilde and bar kernels

    tilde22: A~22 + E1 - A-bar22 + g2(X) e^{-delta^3/3 + delta^2 u + delta Y}
             - 1_{X>Y} e^{2 delta^2 u}(e^{delta(X-Y)} + e^{-delta(X-Y)})
    tilde12: A~12 - A-bar12 - g1(X) e^{-delta^3/3 + delta^2 u + delta Y}
    """
    if p.delta >= 0.0:
        raise ParameterDomainError("The tilde relations need delta < 0", errors=[f"delta={p.delta}"])
    settings = settings or ContourSettings()
    X = np.atleast_1d(np.asarray(X, dtype=float))
    Y = np.atleast_1d(np.asarray(Y, dtype=float))
    d, u = p.delta, p.u
    a12t, a22t = AsympTilde(p, settings).values(X, Y)
    bar = AsympKernel(p, settings).block(X, Y)
    weight = np.exp(-d ** 3 / 3.0 + d * d * u + d * Y)[None, :]
    dist = X[:, None] - Y[None, :]
    E1_vals = -np.sign(dist) * E1_profile(np.abs(dist).ravel(), p, settings).reshape(dist.shape)
    step = np.where(dist > 0, np.exp(2.0 * d * d * u) * (np.exp(d * dist) + np.exp(-d * dist)), 0.0)
    g1 = g_scal(1, X, p, settings)[:, None]
    g2 = g_scal(2, X, p, settings)[:, None]
    return {
        "tilde22": a22t + E1_vals - bar[1, 1] + g2 * weight - step,
        "tilde12": a12t - bar[0, 1] - g1 * weight,
    }


def kernel_abar(X: float, Y: float, p: AsympParams, mode: str = "bar",
                settings: Optional[ContourSettings] = None):
    """
    A-bar(X, Y) as a 2x2 array (mode "bar") or (A~12, A~22) (mode "tilde")

    Raises:
        ParameterDomainError: For an unknown mode
    """
    if mode == "bar":
        return AsympKernel(p, settings)(X, Y)
    if mode == "tilde":
        a12, a22 = AsympTilde(p, settings).values([X], [Y])
        return float(a12[0, 0]), float(a22[0, 0])
    raise ParameterDomainError(f"Unknown kernel_abar mode {mode!r}", errors=["mode must be bar or tilde"])
