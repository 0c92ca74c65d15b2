"""
Correlation kernel of half-space LPP with geometric weights

Row parameters are x_1 = b and x_i = sqrt(q) for i >= 2, the diagonal carries the
extra parameter a. The kernel acts on l^2({s+1, s+2, ...}).

Two representations are available:
  circles: the kernel integrals on circles |z| = const around the origin, after
           inverting the variable that would otherwise grow; needs a < 1 for the
           22 entry.
  poles:   the same integrals with the z and w contours shrunk onto the poles
           sqrt(q), a, b and 1/sqrt(q), 1/a, 1/b; needs a, b, sqrt(q) distinct.
"""
import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.params import ContourSettings, FiniteParams, GeoParams
from numerics.contours import Contour, PoleSpec, integrate2_separable, make_origin_circle, make_pair, make_pole_contour
from numerics.special_funcs import to_real
from kernels.base import Kernel2x2, KernelFamily
from kernels.finite import FiniteKernel
from utils.exceptions import NonFiniteIntegrandError, ParameterDomainError
from utils.settings import DEFAULT_SETTINGS, NumericsSettings
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)

REPRESENTATIONS = ("auto", "poles", "circles")
ALIAS_DIGITS = 36.0


# ---------------------------------------------------------------------------
# integrand pieces

def _log_hb(z: np.ndarray, p: GeoParams) -> np.ndarray:
    """log H(z) + log B(z)"""
    sq = p.sqrt_q
    out = np.log(1.0 - p.b / z) - np.log(1.0 - p.b * z)
    if p.N > 1:
        out = out + (p.N - 1) * (np.log(1.0 - sq / z) - np.log(1.0 - sq * z))
    return out


def _z_part_odd(z: np.ndarray, p: GeoParams) -> np.ndarray:
    """z side of the 11 and 12 integrands, without z^{-k}"""
    return _log_hb(z, p) + p.n * np.log(1.0 - p.sqrt_q * z) + np.log(z - p.a) - np.log(z * z - 1.0)


def _z_part_even(z: np.ndarray, p: GeoParams) -> np.ndarray:
    """z side of the 22 integrand"""
    return _log_hb(z, p) - p.n * np.log(1.0 - p.sqrt_q / z) - np.log(1.0 - p.a * z)


def _w_part_11(w: np.ndarray, p: GeoParams) -> np.ndarray:
    """w side of the 11 integrand, w^{l-1} contributes the -log w"""
    return (-_log_hb(w, p) + p.n * np.log(1.0 - p.sqrt_q / w)
            + np.log(1.0 - p.a * w) - np.log(1.0 - w * w) - np.log(w))


def _w_part_12(w: np.ndarray, p: GeoParams) -> np.ndarray:
    """w side of the 12 and 22 integrands, 1/F(w) (w - a)^{-1} w^{l-1}"""
    return -_log_hb(w, p) - p.n * np.log(1.0 - p.sqrt_q * w) - np.log(w - p.a) - np.log(w)


def _cross(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return (z * w - 1.0) / (z - w)


def _e_log_integrand(z: np.ndarray, p: GeoParams) -> np.ndarray:
    """log of z^{-1}(1 - z^2)/((1 - a z)(z - a)(1 - sqrt(q)/z)^n (1 - sqrt(q) z)^n)"""
    sq = p.sqrt_q
    return (np.log((1.0 - z * z) / z) - np.log((1.0 - p.a * z) * (z - p.a))
            - p.n * (np.log(1.0 - sq / z) + np.log(1.0 - sq * z)))


def _power_entry(
    ks: np.ndarray,
    ls: np.ndarray,
    cz: Contour,
    cw: Contour,
    log_a: np.ndarray,
    log_b: np.ndarray,
    cross: np.ndarray,
    coef: float,
    row_shift: np.ndarray,
    col_shift: np.ndarray,
    where: str,
    singular: bool = True,
) -> np.ndarray:
    """coef * oint oint z^{-k} a(z) cross(z, w) b(w) w^l, shifts added in log space"""
    A = np.exp(-np.outer(ks, np.log(cz.nodes)) + log_a[None, :] + row_shift[:, None])
    B = np.exp(np.outer(ls, np.log(cw.nodes)) + log_b[None, :] + col_shift[:, None])
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise NonFiniteIntegrandError(f"Integrand overflow in {where}", where=where)
    val = integrate2_separable(A, cross, B, cz, cw, coef=coef, singular=singular)
    mass = np.abs(A * cz.weights[None, :]) @ np.abs(cross) @ np.abs(B * cw.weights[None, :]).T
    return to_real(val, abs(coef) * mass, where)


@dataclass(frozen=True)
class GeoTerm:
    """One double integral of a kernel entry, summed over its contour pairs"""
    coef: float
    log_a: Callable[[np.ndarray], np.ndarray]
    log_b: Callable[[np.ndarray], np.ndarray]
    contours: Tuple[Tuple[Contour, Contour], ...]
    singular: bool = True

    def evaluate(self, ks, ls, row_shift, col_shift, where: str) -> np.ndarray:
        out = np.zeros((ks.size, ls.size))
        for cz, cw in self.contours:
            out += _power_entry(ks, ls, cz, cw, self.log_a(cz.nodes), self.log_b(cw.nodes),
                                _cross(cz.nodes[:, None], cw.nodes[None, :]), self.coef,
                                row_shift, col_shift, where, self.singular)
        return out


# ---------------------------------------------------------------------------
# parameter-derived quantities

def special_points(p: GeoParams) -> List[float]:
    sq = p.sqrt_q
    pts = [0.0, 1.0, -1.0, sq, p.b, 1.0 / sq, 1.0 / p.b]
    if p.a > 0:
        pts += [p.a, 1.0 / p.a]
    return pts


def log_radii(p: GeoParams) -> Tuple[float, float]:
    """(log max(sqrt q, b), log max(sqrt q, a, b)): decay of the 11 entry, growth of the 22 entry"""
    m11 = max(p.sqrt_q, p.b) if p.N > 1 else p.b
    m22 = max(m11, p.a)
    return math.log(m11), math.log(m22) if m22 > 0 else -math.inf


def conj_exponent(p: GeoParams) -> float:
    """Midpoint of the window (max(0, log m22), -log m11) in which all conjugated entries decay"""
    l11, l22 = log_radii(p)
    return 0.5 * (max(0.0, l22) - l11)


def decay_rate(p: GeoParams) -> float:
    l11, l22 = log_radii(p)
    return 0.5 * (-l11 - max(0.0, l22))


def cutoff(p: GeoParams, s: int, numerics: Optional[NumericsSettings] = None) -> int:
    """
    Number of sites beyond s kept in the discrete Fredholm Pfaffian

    decay_target/rate sites after the bulk of L, which sits around
    2N sqrt(q)/(1 - sqrt(q)) with fluctuations of order N^{1/3}.
    """
    numerics = numerics or DEFAULT_SETTINGS
    sq = p.sqrt_q
    scale = (1.0 + p.N ** (1.0 / 3.0)) / (1.0 - sq)
    bulk = max(0.0, 2.0 * p.N * sq / (1.0 - sq) - s) + numerics.finite_scale_widths * scale
    sites = int(math.ceil(numerics.decay_target / decay_rate(p) + bulk))
    if sites > numerics.geo_cutoff_cap:
        logger.warning(f"Geometric cutoff {sites} capped at {numerics.geo_cutoff_cap}")
        sites = numerics.geo_cutoff_cap
    return max(sites, 8)


def pick_representation(p: GeoParams, representation: str = "auto") -> str:
    """
    Raises:
        ParameterDomainError: If the requested representation is not available
    """
    if representation not in REPRESENTATIONS:
        raise ParameterDomainError("Unknown kernel representation",
                                   errors=[f"representation must be one of {REPRESENTATIONS}"])
    poles_ok = p.distinct() and abs(p.a - 1.0) > 1e-9 and p.a > 0 and p.N > 1
    circles_ok = p.a < 1.0
    if representation == "poles" and not poles_ok:
        raise ParameterDomainError("Pole representation needs distinct a, b, sqrt(q), a != 1 and N > 1",
                                   errors=[f"a={p.a}, b={p.b}, sqrt(q)={p.sqrt_q}, N={p.N}"])
    if representation == "circles" and not circles_ok:
        raise ParameterDomainError("Circle representation needs a < 1", errors=[f"a={p.a}"])
    if representation != "auto":
        return representation
    if poles_ok:
        return "poles"
    if circles_ok:
        return "circles"
    raise ParameterDomainError("No contour representation for these parameters",
                               errors=[f"a={p.a} >= 1 with coinciding poles"])


def _pole_circle(enclosed: Sequence[float], p: GeoParams) -> PoleSpec:
    excluded = [x for x in special_points(p) if all(abs(x - e) > 1e-12 for e in enclosed)]
    return PoleSpec(tuple(enclosed), tuple(excluded))


def _nodes_for(contour: Contour, k_max: float, base: int) -> int:
    """Trapezoidal nodes resolving z^{-k} on every circle of the contour up to k_max"""
    need = base
    for c in contour.geometry.get("circles", []):
        center = abs(complex(c["center"], c.get("center_im", 0.0)))
        ratio = c["radius"] / max(center - c["radius"], 1e-300) if center > 0 else 1.0
        need = max(need, int(math.ceil(2.0 * k_max * ratio)) + 64)
    return need


def _pole_pair(z_points, w_points, p: GeoParams, k_max: float, settings: ContourSettings):
    z_spec = _pole_circle(z_points, p)
    w_spec = _pole_circle(w_points, p)
    cz, cw = make_pair(z_spec, w_spec, settings)
    nodes = max(_nodes_for(cz, k_max, settings.nodes), _nodes_for(cw, k_max, settings.nodes))
    if nodes > settings.nodes:
        cz, cw = make_pair(z_spec, w_spec, settings.model_copy(update={"nodes": nodes}))
    return cz, cw


def _circle_nodes(k_max: float, gap: float, base: int) -> int:
    return max(base, int(math.ceil(2.0 * k_max + ALIAS_DIGITS / max(gap, 1e-3))) + 16)


# ---------------------------------------------------------------------------
# E(k, l)

class EProfile:
    """
    The one-dimensional part E(k, l) = sgn(k - l) P(|k - l|) of the 22 entry

    P(d) = oint z^{-d} e(z) over a circle around 0, a, sqrt(q) when a < 1, else
    minus the same integrand around 1/a and 1/sqrt(q), which is valid for d >= 1.
    """

    def __init__(self, p: GeoParams, settings: Optional[ContourSettings] = None):
        self.p = p
        self.settings = (settings or ContourSettings()).sized_for(p.n + 1)
        self.origin = p.a < 1.0
        if self.origin:
            l_e = math.log(max(p.a, p.sqrt_q))
            self.log_radius = -0.5 * l_e
            self.gap = -0.5 * l_e
        elif abs(p.a - p.sqrt_q) < 1e-9 or abs(p.a - 1.0) < 1e-9:
            raise ParameterDomainError("E(k, l) contour needs a != sqrt(q) when a >= 1",
                                       errors=[f"a={p.a}, sqrt(q)={p.sqrt_q}"])

    def contour(self, d_max: float) -> Tuple[Contour, float]:
        if self.origin:
            nodes = _circle_nodes(d_max, self.gap, self.settings.nodes)
            return make_origin_circle(math.exp(self.log_radius), nodes), 1.0
        p = self.p
        poles = _pole_circle([1.0 / p.a, 1.0 / p.sqrt_q], p)
        contour = make_pole_contour(poles, self.settings)
        nodes = _nodes_for(contour, d_max, self.settings.nodes)
        if nodes > self.settings.nodes:
            contour = make_pole_contour(poles, self.settings.model_copy(update={"nodes": nodes}))
        return contour, -1.0

    def values(self, d: np.ndarray, log_shift: Optional[np.ndarray] = None) -> np.ndarray:
        """P(d) e^{log_shift} for integer d >= 0 (d = 0 only in the origin form)"""
        d = np.atleast_1d(np.asarray(d, dtype=float))
        if d.size == 0:
            return np.zeros(0)
        contour, sign = self.contour(float(np.max(d)))
        z = contour.nodes
        log_f = _e_log_integrand(z, self.p)
        shift = np.zeros(d.size) if log_shift is None else log_shift
        terms = np.exp(-np.outer(d, np.log(z)) + log_f[None, :] + shift[:, None]) * contour.weights[None, :]
        if not np.all(np.isfinite(terms)):
            raise NonFiniteIntegrandError("Integrand overflow in E(k, l)", where="geo_E")
        return sign * to_real(terms.sum(axis=1), np.abs(terms).sum(axis=1), "geo_E")

    def matrix(self, ks: np.ndarray, ls: np.ndarray, mu: float, center: float) -> np.ndarray:
        """E(k_i, l_j) e^{-mu(k_i - c) - mu(l_j - c)}"""
        diff = np.rint(ks[:, None] - ls[None, :]).astype(int)
        dist = np.abs(diff)
        out = np.zeros(diff.shape)
        mask = dist > 0
        if not np.any(mask):
            return out
        uniq, inverse = np.unique(dist[mask], return_inverse=True)
        profile = self.values(uniq)
        conj = np.exp(-mu * (ks[:, None] - center) - mu * (ls[None, :] - center))
        out[mask] = np.sign(diff[mask]) * profile[inverse] * conj[mask]
        return out


def geo_E(k: int, l: int, p: GeoParams, settings: Optional[ContourSettings] = None) -> float:
    """
    E(k, l) of the 22 entry

    E(k, k) = 0 exactly. With a < 1 the other values come from the contour around
    0, a and sqrt(q) for either sign of k - l, so antisymmetry is checkable;
    otherwise from the contour around 1/a, 1/sqrt(q) and antisymmetry.
    """
    ParameterValidator.validate_geo(p)
    d = k - l
    if d == 0:
        return 0.0
    prof = EProfile(p, settings)
    if prof.origin:
        if d > 0:
            return float(prof.values([d])[0])
        # the origin contour for negative d, kept separate from the antisymmetric shortcut
        contour, _ = prof.contour(abs(d))
        z = contour.nodes
        terms = np.exp(-d * np.log(z) + _e_log_integrand(z, p)) * contour.weights
        return float(to_real(np.array([terms.sum()]), np.array([np.abs(terms).sum()]), "geo_E")[0])
    return float(np.sign(d) * prof.values([abs(d)])[0])


# ---------------------------------------------------------------------------
# the kernel

class GeoKernel(Kernel2x2):
    """
    K^geo on integer sites

    Args:
        p: Geometric parameters
        representation: "auto", "poles" or "circles"
        settings: Contour settings

    Raises:
        ParameterDomainError: If the parameters are outside the model's domain
    """

    family = KernelFamily.GEO

    def __init__(self, p: GeoParams, representation: str = "auto", settings: Optional[ContourSettings] = None):
        ParameterValidator.validate_geo(p)
        super().__init__(conj_exponent=conj_exponent(p))
        self.p = p
        self.settings = (settings or ContourSettings()).sized_for(p.N + p.n)
        self.representation = pick_representation(p, representation)
        self.decay = decay_rate(p)
        self.e_profile = EProfile(p, self.settings)
        self._cache: Dict[int, Dict[str, List[GeoTerm]]] = {}
        logger.debug(f"geo kernel: {self.representation} representation, mu={self.conj_exponent:.4g}")

    def _terms(self, k_max: float) -> Dict[str, List[GeoTerm]]:
        key = int(math.ceil(k_max))
        if key not in self._cache:
            build = self._pole_terms if self.representation == "poles" else self._circle_terms
            self._cache = {key: build(float(key))}
        return self._cache[key]

    def _pole_terms(self, k_max: float) -> Dict[str, List[GeoTerm]]:
        p, st = self.p, self.settings
        sq, a, b = p.sqrt_q, p.a, p.b

        def pair(z_pts, w_pts):
            return _pole_pair(z_pts, w_pts, p, k_max, st)

        z_odd = lambda z: _z_part_odd(z, p)
        z_even = lambda z: _z_part_even(z, p)
        w11 = lambda w: _w_part_11(w, p)
        w12 = lambda w: _w_part_12(w, p)
        return {
            "11": [GeoTerm(-1.0, z_odd, w11, (pair([1 / sq], [sq]), pair([1 / sq], [b]), pair([1 / b], [sq])))],
            "12": [GeoTerm(-1.0, z_odd, w12, (pair([1 / sq], [sq, a, b]), pair([1 / b], [sq, a])))],
            "22": [GeoTerm(-1.0, z_even, w12, (pair([1 / sq, 1 / a, 1 / b], [sq]),
                                               pair([1 / sq, 1 / b], [a]),
                                               pair([1 / sq, 1 / a], [b])))],
        }

    def _circle_terms(self, k_max: float) -> Dict[str, List[GeoTerm]]:
        p, base = self.p, self.settings.nodes
        l11, l22 = log_radii(p)
        z_odd = lambda z: _z_part_odd(z, p)
        z_even = lambda z: _z_part_even(z, p)
        w11 = lambda w: _w_part_11(w, p)
        w12 = lambda w: _w_part_12(w, p)

        def circles(log_rz: float, log_rw: float, gap: float):
            nodes = _circle_nodes(k_max, gap, base)
            return ((make_origin_circle(math.exp(log_rz), nodes), make_origin_circle(math.exp(log_rw), nodes)),)

        lo = max(0.0, l22)
        log_rz12 = lo + 2.0 * (-l11 - lo) / 3.0
        log_rw12 = 0.5 * (l22 + log_rz12)
        terms = {
            "11": [GeoTerm(1.0, z_odd, w11, circles(-0.5 * l11, 0.5 * l11, -0.5 * l11))],
            "12": [GeoTerm(1.0, z_odd, w12, circles(log_rz12, log_rw12, min(log_rz12 - log_rw12, -l11 - log_rz12)))],
            "22": [GeoTerm(1.0, z_even, w12, circles(-l22 / 3.0, l22 / 3.0, -l22 / 3.0))],
        }
        return terms

    def entries(self, xs: np.ndarray, ys: np.ndarray, mu: float, center: float) -> np.ndarray:
        if np.any(xs < 1) or np.any(ys < 1):
            raise ParameterDomainError("Geometric kernel sites must be >= 1",
                                       errors=[f"min site {min(xs.min(), ys.min())}"])
        terms = self._terms(max(float(np.max(xs)), float(np.max(ys))))
        ex = mu * (xs - center)
        ey = mu * (ys - center)
        where = self.family.code
        out = np.empty((2, 2, xs.size, ys.size))
        out[0, 0] = sum(t.evaluate(xs, ys, ex, ey, where) for t in terms["11"])
        out[0, 1] = sum(t.evaluate(xs, ys, ex, -ey, where) for t in terms["12"])
        if xs is ys or (xs.shape == ys.shape and np.array_equal(xs, ys)):
            out[1, 0] = -out[0, 1].T
        else:
            out[1, 0] = -sum(t.evaluate(ys, xs, ey, -ex, where) for t in terms["12"]).T
        out[1, 1] = sum(t.evaluate(xs, ys, -ex, -ey, where) for t in terms["22"])
        out[1, 1] += self.e_profile.matrix(xs, ys, mu, center)
        return out

    def describe(self):
        info = super().describe()
        info.update({"representation": self.representation, "decay": self.decay,
                     "params": self.p.model_dump()})
        return info


def kernel_geo(k: int, l: int, p: GeoParams, representation: str = "auto",
               settings: Optional[ContourSettings] = None) -> np.ndarray:
    """K^geo(k, l) as a 2x2 matrix"""
    return GeoKernel(p, representation, settings)(k, l)


# ---------------------------------------------------------------------------
# exponential limit

def scaled_kernel(x: float, y: float, alpha: float, beta: float, eps: float, N: int, n: int = 0,
                  settings: Optional[ContourSettings] = None) -> np.ndarray:
    """
    Rescaled geometric kernel at a = 1 - eps alpha, b = 1 - eps beta, q = 1 - eps

    Entry ij is eps^{c_i + c_j} K^geo(x/eps, y/eps) with c = (-1 - n, n), which
    tends to the two-parameter exponential kernel as eps -> 0.
    """
    p = GeoParams.exponential_limit(alpha, beta, eps, N, n)
    k, l = int(round(x / eps)), int(round(y / eps))
    if k < 1 or l < 1:
        raise ParameterDomainError("Rescaled sites must be >= 1", errors=[f"x/eps={x / eps}, y/eps={y / eps}"])
    c = np.array([(-1.0 - n) * math.log(eps), n * math.log(eps)])
    return kernel_geo(k, l, p, settings=settings) * np.exp(c[:, None] + c[None, :])


def scaling_error(x: float, y: float, alpha: float, beta: float, eps: float, N: int, n: int = 0,
                  settings: Optional[ContourSettings] = None) -> float:
    """Largest entrywise distance between the rescaled geometric kernel and the exponential one"""
    target = FiniteKernel(FiniteParams(N=N, n=n, alpha=alpha, beta=beta), mode="int", settings=settings)
    return float(np.max(np.abs(scaled_kernel(x, y, alpha, beta, eps, N, n, settings) - target(x, y))))
