"""
Common machinery for 2x2 matrix kernels

A kernel is evaluated on whole grids at once: block(xs, ys, mu, center) returns an
array of shape (2, 2, len(xs), len(ys)) already conjugated by
diag(e^{mu(x-c)}, e^{-mu(x-c)}), so that Fredholm Pfaffians can be assembled
without ever forming the unconjugated, exponentially growing entries.
"""
import math
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from numerics.contours import Contour, integrate2_separable
from numerics.special_funcs import to_real
from utils.exceptions import NonFiniteIntegrandError

logger = logging.getLogger(__name__)

# row / column conjugation sign of the first and second component
CONJ_SIGNS = (1.0, -1.0)
MIN_SPAN = 8.0


def span_key(x_max: float) -> int:
    """Power-of-two bucket of the largest |x|, the key of contour caches"""
    return int(2 ** math.ceil(math.log2(max(abs(x_max), MIN_SPAN))))


class KernelFamily(Enum):
    """Kernel families with display names and codes"""
    FINITE_K = ("Two-parameter kernel K", "finite_K")
    FINITE_KBAR = ("Split kernel K-bar", "finite_Kbar")
    FINITE_KBAR_LIMIT = ("Stationary kernel K-bar", "finite_Kbar_limit")
    FINITE_KTILDE = ("Tilde kernel", "finite_Ktilde")
    ASYMP_ABAR = ("Limit kernel A-bar", "asymp_Abar")
    ASYMP_ATILDE = ("Limit tilde kernel", "asymp_Atilde")
    GEO = ("Geometric kernel", "geo")
    BR_CONJUGATED = ("Baik-Rains path kernel", "br_conjugated")

    def __init__(self, display_name: str, code: str):
        self.display_name = display_name
        self.code = code


Growth = Dict[str, Tuple[float, float]]


def conjugation_exponents(xs: np.ndarray, ys: np.ndarray, mu: float, center: float) -> np.ndarray:
    """Exponents of the conjugation factors, shape (2, 2, len(xs), len(ys))"""
    ex = mu * (np.asarray(xs, dtype=float) - center)
    ey = mu * (np.asarray(ys, dtype=float) - center)
    out = np.empty((2, 2, ex.size, ey.size))
    for a, sa in enumerate(CONJ_SIGNS):
        for b, sb in enumerate(CONJ_SIGNS):
            out[a, b] = sa * ex[:, None] + sb * ey[None, :]
    return out


def conjugate_growth(growth: Growth, mu: float) -> Growth:
    """Growth rates after conjugation with exponent mu"""
    out = {}
    for key, (gx, gy) in growth.items():
        sa = CONJ_SIGNS[int(key[0]) - 1]
        sb = CONJ_SIGNS[int(key[1]) - 1]
        out[key] = (gx + sa * mu, gy + sb * mu)
    return out


def separable_entry(
    xs: np.ndarray,
    ys: np.ndarray,
    cz: Contour,
    cw: Contour,
    log_a: np.ndarray,
    log_b: np.ndarray,
    cross: np.ndarray,
    coef: float,
    row_shift: np.ndarray,
    col_shift: np.ndarray,
    where: str,
) -> np.ndarray:
    """
    coef * oint oint e^{-x z + log_a(z) + row_shift(x)} cross(z, w) e^{y w + log_b(w) + col_shift(y)}

    The conjugation enters through row_shift / col_shift so that large exponents
    cancel before exponentiation.
    """
    A = np.exp(-np.outer(xs, cz.nodes) + log_a[None, :] + row_shift[:, None])
    B = np.exp(np.outer(ys, cw.nodes) + log_b[None, :] + col_shift[:, None])
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise NonFiniteIntegrandError(f"Integrand overflow in {where}", where=where)
    val = integrate2_separable(A, cross, B, cz, cw, coef=coef)
    mass = np.abs(A * cz.weights[None, :]) @ np.abs(cross) @ np.abs(B * cw.weights[None, :]).T
    return to_real(val, abs(coef) * mass, where)


@dataclass(frozen=True)
class SeparableTerm:
    """
    One separated double integral of a kernel entry

    coef * sum over contour pairs of oint oint e^{-x z} a(z) cross(z, w) b(w) e^{y w},
    with log a, log b and cross given as functions of the contour nodes.
    """
    coef: float
    log_a: Callable[[np.ndarray], np.ndarray]
    log_b: Callable[[np.ndarray], np.ndarray]
    cross: Callable[[np.ndarray, np.ndarray], np.ndarray]
    contours: Tuple[Tuple[Contour, Contour], ...]

    def evaluate(self, xs: np.ndarray, ys: np.ndarray, row_shift: np.ndarray,
                 col_shift: np.ndarray, where: str) -> np.ndarray:
        out = np.zeros((xs.size, ys.size))
        for cz, cw in self.contours:
            out += separable_entry(
                xs, ys, cz, cw,
                self.log_a(cz.nodes), self.log_b(cw.nodes),
                self.cross(cz.nodes[:, None], cw.nodes[None, :]),
                self.coef, row_shift, col_shift, where,
            )
        return out


def evaluate_terms(terms: Sequence[SeparableTerm], xs: np.ndarray, ys: np.ndarray,
                   row_shift: np.ndarray, col_shift: np.ndarray, where: str) -> np.ndarray:
    out = np.zeros((xs.size, ys.size))
    for term in terms:
        out += term.evaluate(xs, ys, row_shift, col_shift, where)
    return out


def single_entry(
    xs: np.ndarray,
    contour: Contour,
    log_f: np.ndarray,
    shift: np.ndarray,
    where: str,
    sign: float = -1.0,
) -> np.ndarray:
    """sum_k e^{sign x z_k + log_f_k + shift(x)} w_k, real part"""
    terms = np.exp(sign * np.outer(xs, contour.nodes) + log_f[None, :] + shift[:, None])
    terms = terms * contour.weights[None, :]
    if not np.all(np.isfinite(terms)):
        raise NonFiniteIntegrandError(f"Integrand overflow in {where}", where=where)
    return to_real(terms.sum(axis=1), np.abs(terms).sum(axis=1), where)


class Kernel2x2(ABC):
    """
    Base class for 2x2 matrix kernels

    Subclasses implement `entries`, which must return conjugated values; the base
    class supplies point evaluation, conjugation wrappers and metadata.
    """

    family: KernelFamily = KernelFamily.FINITE_K

    def __init__(self, growth: Optional[Growth] = None, conj_exponent: float = 0.0):
        self.growth: Growth = growth or {"11": (0.0, 0.0), "12": (0.0, 0.0),
                                         "21": (0.0, 0.0), "22": (0.0, 0.0)}
        self.conj_exponent = conj_exponent

    @abstractmethod
    def entries(self, xs: np.ndarray, ys: np.ndarray, mu: float, center: float) -> np.ndarray:
        """Conjugated kernel values, shape (2, 2, len(xs), len(ys))"""
        pass

    def block(self, xs, ys, mu: float = 0.0, center: float = 0.0) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        values = np.asarray(self.entries(xs, ys, mu, center), dtype=float)
        if not np.all(np.isfinite(values)):
            raise NonFiniteIntegrandError(f"{self.family.code} produced non-finite values",
                                          where=self.family.code)
        return values

    def __call__(self, x: float, y: float) -> np.ndarray:
        return self.block([x], [y])[:, :, 0, 0]

    def conjugate(self, mu: float, center: float = 0.0) -> "ConjugatedKernel":
        return ConjugatedKernel(self, mu, center)

    def describe(self) -> Dict[str, Any]:
        return {
            "family": self.family.code,
            "conj_exponent": self.conj_exponent,
            "growth": {k: list(v) for k, v in self.growth.items()},
        }

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(family={self.family.code}, mu={self.conj_exponent:.4g})"


class ConjugatedKernel(Kernel2x2):
    """A kernel multiplied by diag(e^{mu(x-c)}, e^{-mu(x-c)}) on both sides"""

    def __init__(self, base: Kernel2x2, mu: float, center: float = 0.0):
        super().__init__(conjugate_growth(base.growth, mu), base.conj_exponent - mu)
        self.base = base
        self.mu = mu
        self.center = center
        self.family = base.family

    def entries(self, xs, ys, mu, center):
        values = self.base.block(xs, ys, mu=self.mu, center=self.center)
        if mu == 0.0:
            return values
        return values * np.exp(conjugation_exponents(xs, ys, mu, center))


def conjugate(kern: Kernel2x2, mu: float, center: float = 0.0) -> Kernel2x2:
    """Conjugated kernel; mu = 0 returns the kernel itself"""
    if mu == 0.0:
        return kern
    return kern.conjugate(mu, center)


class FunctionKernel(Kernel2x2):
    """
    Kernel built from a plain evaluator (x, y) -> 2x2 matrix

    Used for oracles and for closed-form kernels in tests; the conjugation is
    applied after evaluation.
    """

    def __init__(self, evaluator: Callable[[float, float], np.ndarray],
                 family: KernelFamily = KernelFamily.FINITE_K, conj_exponent: float = 0.0):
        super().__init__(conj_exponent=conj_exponent)
        self.evaluator = evaluator
        self.family = family

    def entries(self, xs, ys, mu, center):
        out = np.empty((2, 2, xs.size, ys.size))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                out[:, :, i, j] = np.asarray(self.evaluator(float(x), float(y)), dtype=float)
        if mu != 0.0:
            out *= np.exp(conjugation_exponents(xs, ys, mu, center))
        return out


@dataclass(frozen=True)
class BorderVectors:
    """
    Border functions of a bracket <(c, d)|(1 - J^{-1}K)^{-1}(a, b)> on grid nodes

    left holds (c, d), right holds (a, b); scalar is the additive constant of the
    distribution formula (e^alpha(s) or its scaling limit).
    """
    nodes: np.ndarray
    left: Tuple[np.ndarray, np.ndarray]
    right: Tuple[np.ndarray, np.ndarray]
    scalar: float
