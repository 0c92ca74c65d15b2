"""
Conjugated limit kernel along delta = tau - u

For delta < 0 the kernel A-bar, conjugated by e^{+-(2u^3/3 + uX)} and written in
the shifted variables X = x + delta(2u + delta), has u-uniformly bounded
entries. As u grows the diagonal blocks vanish and the 12 block tends to the
shifted Airy kernel, which is how the Baik-Rains distribution is reached.
"""
import math
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from models.params import AsympParams, ContourSettings
from numerics.contours import Contour, airy_node_count, make_airy, make_vertical
from numerics.pfaffian import QuadratureGrid
from numerics.special_funcs import AIRY_OFFSET, GAUSS_DECAY, R_tau, airy_transform
from kernels.base import Kernel2x2, KernelFamily, SeparableTerm, BorderVectors, evaluate_terms, span_key
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)


def vertical_abscissa(u: float, tau: float) -> float:
    """r in (max(tau, 0), min(u, 2u - tau)), the midpoint"""
    return 0.5 * (max(tau, 0.0) + min(u, 2.0 * u - tau))


def _vertical_pair(r: float, x_max: float, settings: ContourSettings) -> Tuple[Contour, Contour]:
    """z on r + iR and w on -r + iR, both upwards, truncated where e^{-r t^2} < e^{-GAUSS_DECAY}"""
    half_height = math.sqrt(GAUSS_DECAY / r)
    frequency = half_height ** 2 + x_max
    nodes = max(settings.vertical_nodes, int(math.ceil(2.0 * half_height * frequency / math.pi)) + 16)
    return make_vertical(r, half_height, nodes), make_vertical(-r, half_height, nodes)


def _ray_pair(z_anchor: float, w_anchor: float, x_max: float, settings: ContourSettings) -> Tuple[Contour, Contour]:
    nodes = max(airy_node_count(x_max, settings, z_anchor), airy_node_count(x_max, settings, w_anchor))
    return (make_airy("down", z_anchor, settings.ray_length, nodes),
            make_airy("up", w_anchor, settings.ray_length, nodes))


def h2_anchor(u: float, tau: float) -> float:
    """omega anchor of the h2 double integral: right of tau - 2u, left of -tau, as close to -tau as allowed"""
    return max(-tau - AIRY_OFFSET, -u)


class BrPathKernel(Kernel2x2):
    """
    Conjugated and shifted A-bar with delta = tau - u, acting on L^2(s, infinity) in x

    Args:
        u: Distance parameter, u > max(0, tau)
        tau: Baik-Rains parameter
        settings: Contour settings
        x_max: Smallest |x| span the contours are sized for; wider grids get their own
    """

    family = KernelFamily.BR_CONJUGATED

    def __init__(self, u: float, tau: float, settings: Optional[ContourSettings] = None, x_max: float = 16.0):
        ParameterValidator.validate_br(u, tau)
        super().__init__(conj_exponent=0.0)
        self.u = u
        self.tau = tau
        self.settings = settings or ContourSettings()
        self.r = vertical_abscissa(u, tau)
        self.balance = 0.0
        self.decay = min(0.25, self.r)
        self.x_max = x_max
        self._cache: Dict[int, Dict[str, List[SeparableTerm]]] = {}
        logger.debug(f"{self.family.code}: u={u:.4g}, tau={tau:.4g}, r={self.r:.4g}")

    def terms_for(self, x_max: float) -> Dict[str, List[SeparableTerm]]:
        """Term tables resolving shifted arguments up to |x_max|, cached per span bucket"""
        key = span_key(max(abs(x_max), self.x_max))
        if key not in self._cache:
            self._cache[key] = self._build_terms(float(key) + self.tau ** 2)
            logger.debug(f"{self.family.code}: contours for |x| <= {key}")
        return self._cache[key]

    def _build_terms(self, span: float) -> Dict[str, List[SeparableTerm]]:
        u, tau, s = self.u, self.tau, self.settings
        b12 = max(tau - 2.0 * u, -AIRY_OFFSET) + 0.25
        return {
            "11": [SeparableTerm(
                -1.0,
                lambda z: z ** 3 / 3.0 + np.log((z - tau + 2 * u) / (z + u)),
                lambda w: -w ** 3 / 3.0 + np.log((w + tau - 2 * u) / (w - u)),
                lambda z, w: (w + z) / (4.0 * (z - w + 2 * u)),
                (_ray_pair(0.25, -0.25, span, s),),
            )],
            "12": [SeparableTerm(
                -1.0,
                lambda z: z ** 3 / 3.0 + np.log((z - tau + 2 * u) / (z + u)),
                lambda w: -w ** 3 / 3.0 - np.log(w - tau + 2 * u),
                lambda z, w: (w + z + 2 * u) / (2.0 * (z - w)),
                (_ray_pair(max(b12 + AIRY_OFFSET, 0.25), b12, span, s),),
            )],
            "22": [SeparableTerm(
                -1.0,
                lambda z: z ** 3 / 3.0 - np.log(z + tau - 2 * u),
                lambda w: -w ** 3 / 3.0 - np.log(w - tau + 2 * u),
                lambda z, w: (z + w) / (z - w - 2 * u),
                (_vertical_pair(self.r, span, s),),
            )],
        }

    @property
    def delta(self) -> float:
        return self.tau - self.u

    def shift(self) -> float:
        """delta (2u + delta), the offset between X and x"""
        return self.delta * (2.0 * self.u + self.delta)

    def asymp_params(self, s: float = 0.0) -> AsympParams:
        return AsympParams(delta=self.delta, u=self.u, S=s + self.shift())

    def entries(self, xs: np.ndarray, ys: np.ndarray, mu: float, center: float) -> np.ndarray:
        t2 = self.tau * self.tau
        xt, yt = xs + t2, ys + t2
        ex = mu * (xs - center)
        ey = mu * (ys - center)
        where = self.family.code
        terms = self.terms_for(max(float(np.max(np.abs(xs))), float(np.max(np.abs(ys)))))
        out = np.empty((2, 2, xs.size, ys.size))
        out[0, 0] = evaluate_terms(terms["11"], xt, yt, ex, ey, where)
        out[0, 1] = evaluate_terms(terms["12"], xt, yt, ex, -ey, where)
        if xs is ys or (xs.shape == ys.shape and np.array_equal(xs, ys)):
            out[1, 0] = -out[0, 1].T
        else:
            out[1, 0] = -evaluate_terms(terms["12"], yt, xt, ey, -ex, where).T
        out[1, 1] = evaluate_terms(terms["22"], xt, yt, -ex, -ey, where)
        return out

    # ------------------------------------------------------------------
    # border functions in the x variables

    def border_values(self, ys, s: float) -> Dict[str, np.ndarray]:
        """
        Conjugated g1, g2, h1, h2 at ys and the scalar R_{-tau}(s)

        The h functions carry the exact product with f^{-delta,u} on L^2(s, infinity):
        int_s^inf e^{(w + tau) v} dv = -e^{(w + tau) s}/(w + tau) with Re(w + tau) < 0.
        """
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        u, tau, st = self.u, self.tau, self.settings
        t2 = tau * tau
        yt = ys + t2
        span = max(float(np.max(np.abs(yt))), abs(s) + t2)
        w_anchor = h2_anchor(u, tau)
        pref = np.array([2.0 * tau ** 3 / 3.0 + s * tau])

        g1 = airy_transform(ys + t2, 0.0, lambda z: (z + tau) / (2.0 * (z + u)), 0.25, st, "g1_br")
        g2 = airy_transform(ys + t2, 0.0, lambda z: 1.0 / (z - tau), tau - AIRY_OFFSET, st, "g2_br")
        g4 = airy_transform(ys + t2, 0.0, lambda z: 2.0 * (z - u) / ((z - tau) * (z - 2 * u + tau)),
                            tau - AIRY_OFFSET, st, "g4_br")
        g3 = airy_transform(ys + t2, 0.0, lambda z: 1.0 / (z + tau), -tau + AIRY_OFFSET, st, "g3_br")

        h1_term = SeparableTerm(
            1.0,
            lambda z: z ** 3 / 3.0 - np.log(z + tau - 2 * u),
            lambda w: -w ** 3 / 3.0 - np.log((w - tau + 2 * u) * (w + tau)),
            lambda z, w: (z + w) / (z - w - 2 * u),
            (_vertical_pair(self.r, span, st),),
        )
        h2_term = SeparableTerm(
            1.0,
            lambda z: z ** 3 / 3.0 + np.log((z - tau + 2 * u) / (z + u)),
            lambda w: -w ** 3 / 3.0 - np.log((w - tau + 2 * u) * (w + tau)),
            lambda z, w: (w + z + 2 * u) / (2.0 * (z - w)),
            (_ray_pair(max(AIRY_OFFSET, w_anchor + 2 * AIRY_OFFSET), w_anchor, span, st),),
        )
        zero = np.zeros(ys.size)
        sv = np.array([s + t2])
        h1 = h1_term.evaluate(yt, sv, zero, pref, "h1_br")[:, 0] - g4
        h2 = h2_term.evaluate(yt, sv, zero, pref, "h2_br")[:, 0] + g3
        return {"g1": g1, "g2": g2, "h1": h1, "h2": h2, "e": np.array([R_tau(-tau, s, st)])}

    def border(self, s: float, grid: QuadratureGrid) -> BorderVectors:
        values = self.border_values(grid.nodes, s)
        return BorderVectors(
            nodes=grid.nodes,
            left=(-values["g1"], values["g2"]),
            right=(-values["h1"], values["h2"]),
            scalar=float(values["e"][0]),
        )

    def describe(self):
        info = super().describe()
        info.update({"u": self.u, "tau": self.tau, "r": self.r})
        return info


def kernel_br_path(x: float, y: float, s: float, tau: float, u: float,
                   settings: Optional[ContourSettings] = None) -> Tuple[np.ndarray, Dict[str, float]]:
    """
    Conjugated kernel value at (x, y) and the border values at y for L^2(s, infinity)

    Raises:
        ParameterDomainError: If u <= max(0, tau)
    """
    kern = BrPathKernel(u, tau, settings, x_max=max(abs(x), abs(y), abs(s)) + 4.0)
    values = kern.border_values([y], s)
    return kern(x, y), {k: float(v[0]) for k, v in values.items()}
