"""
Scalar functions of the finite-N, critical-scaling and Baik-Rains formulas

Every contour-defined function is evaluated as a vectorized sum over contour
nodes: for an array of arguments xs the values are exp(-outer(xs, z) + log F(z)) @ w.
Pole powers are combined in log space so that high-order poles at +-1/2 do not
overflow intermediate products.
"""
import math
import logging
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from models.params import FiniteParams, AsympParams, ContourSettings
from numerics.contours import (
    Contour,
    PoleSpec,
    make_pole_contour,
    make_airy,
    make_vertical,
    airy_node_count,
    integrate2_separable,
)
from utils.exceptions import ParameterDomainError, NonFiniteIntegrandError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray, Sequence[float]]

HALF = 0.5
IMAG_TOL = 1e-8
SINH_SERIES_CUTOFF = 1e-6
AIRY_OFFSET = 0.5
GAUSS_DECAY = 40.0


# ---------------------------------------------------------------------------
# shared helpers

def log_phi(z: np.ndarray, N: int) -> np.ndarray:
    """log of ((1/2 + z)/(1/2 - z))^(N-1), valid as an exponent for integer powers"""
    z = np.asarray(z, dtype=complex)
    if N == 1:
        return np.zeros_like(z)
    return (N - 1) * (np.log(HALF + z) - np.log(HALF - z))


def to_real(values: np.ndarray, mass: Union[float, np.ndarray], where: str) -> np.ndarray:
    """
    Drops the imaginary part of a value that is real by conjugate symmetry

    Raises:
        NonFiniteIntegrandError: If the imaginary part is not at round-off level
    """
    values = np.asarray(values, dtype=complex)
    bound = IMAG_TOL * (1.0 + np.abs(values.real) + np.asarray(mass))
    if np.any(np.abs(values.imag) > bound):
        worst = float(np.max(np.abs(values.imag)))
        raise NonFiniteIntegrandError(
            f"Imaginary residue {worst:.3g} in {where} is above round-off", where=where
        )
    return values.real


def laplace_sum(
    xs: ArrayLike,
    log_f: np.ndarray,
    contour: Contour,
    where: str,
    sign: float = -1.0,
) -> np.ndarray:
    """
    sum_k exp(sign * x * z_k + log_f_k) w_k for every x, real part

    Args:
        xs: Arguments
        log_f: log of the x-independent integrand factor at the contour nodes
        contour: Integration contour
        where: Label used in error messages
        sign: Sign of the linear exponent
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    terms = np.exp(sign * np.outer(xs, contour.nodes) + log_f[None, :]) * contour.weights[None, :]
    if not np.all(np.isfinite(terms)):
        raise NonFiniteIntegrandError(f"Integrand is not finite in {where}", where=where)
    return to_real(terms.sum(axis=1), np.abs(terms).sum(axis=1), where)


def _shape_like(values: np.ndarray, x: ArrayLike) -> Union[float, np.ndarray]:
    if np.ndim(x) == 0:
        return float(values[0])
    return values.reshape(np.shape(x))


def _pole_contour(enclosed, excluded, settings: Optional[ContourSettings]) -> Contour:
    return make_pole_contour(PoleSpec(tuple(enclosed), tuple(excluded)), settings)


def finite_settings(settings: Optional[ContourSettings], order: int, x: ArrayLike = 0.0) -> ContourSettings:
    """Settings resolving poles of the given order at +-1/2 and e^{-xz} over the arguments x"""
    x = np.asarray(x, dtype=float)
    span = float(np.max(np.abs(x))) if x.size else 0.0
    return (settings or ContourSettings()).sized_for(order, span)


# ---------------------------------------------------------------------------
# finite-N functions

def phi_cap(x: ArrayLike, z: Union[complex, np.ndarray], N: int) -> Union[complex, np.ndarray]:
    """
    Phi(x, z) = e^{-x z} ((1/2 + z)/(1/2 - z))^(N-1)

    Raises:
        ParameterDomainError: At the pole z = 1/2 when N > 1
    """
    z_arr = np.asarray(z, dtype=complex)
    if N > 1 and np.any(np.abs(z_arr - HALF) == 0.0):
        raise ParameterDomainError("Phi has a pole at z = 1/2", errors=[f"z=1/2 with N={N}"])
    out = np.exp(-np.asarray(x, dtype=float) * z_arr + log_phi(z_arr, N))
    return complex(out) if np.ndim(out) == 0 else out


def f_pm(sign: str, rate: float, x: ArrayLike, p: FiniteParams) -> Union[float, np.ndarray]:
    """
    Exponential border functions

    f_plus^r(x) = Phi(x, r) (1/2 - r)^n and f_minus^r(x) = Phi(x, r) / (1/2 + r)^n,
    so that f_plus^{-alpha} = Phi(x, -alpha) (1/2 + alpha)^n.
    """
    if abs(rate) >= HALF:
        raise ParameterDomainError("f_pm rate outside (-1/2, 1/2)", errors=[f"rate={rate}"])
    x_arr = np.asarray(x, dtype=float)
    base = -x_arr * rate + float(np.real(log_phi(np.asarray(rate, dtype=complex), p.N)))
    if sign == "plus":
        out = np.exp(base + p.n * math.log(HALF - rate))
    elif sign == "minus":
        out = np.exp(base - p.n * math.log(HALF + rate))
    else:
        raise ValueError(f"Unknown sign {sign!r}, expected 'plus' or 'minus'")
    return float(out) if np.ndim(out) == 0 else out


def log_minus_type(z: np.ndarray, p: FiniteParams) -> np.ndarray:
    # Phi(x, z) (1/2 - z)^n without the e^{-xz}
    return (p.N - 1) * np.log(HALF + z) - (p.N - 1 - p.n) * np.log(HALF - z)


def log_plus_type(z: np.ndarray, p: FiniteParams) -> np.ndarray:
    # Phi(x, z) / (1/2 + z)^n without the e^{-xz}
    return (p.N - 1 - p.n) * np.log(HALF + z) - (p.N - 1) * np.log(HALF - z)


def _beta(p: FiniteParams, index: str) -> float:
    if p.beta is None:
        raise ParameterDomainError(f"{index} needs beta", errors=["beta is required"])
    return p.beta


# index -> (power type, rational factor, enclosed points, excluded points)
G_TABLE: Dict[str, Tuple[str, Callable, Callable, Callable]] = {
    "g1": ("minus",
           lambda z, a, b: (z + a) / (2 * z),
           lambda a, b: [HALF], lambda a, b: [0.0]),
    "g2": ("plus",
           lambda z, a, b: 1.0 / (z - a),
           lambda a, b: [HALF, a], lambda a, b: []),
    "g3": ("minus",
           lambda z, a, b: 1.0 / (z - b),
           lambda a, b: [HALF], lambda a, b: [b]),
    "g4": ("plus",
           lambda z, a, b: 2 * z / ((z - a) * (z + a) * (z - b)),
           lambda a, b: [HALF, a, -a, b], lambda a, b: []),
    "g5": ("minus",
           lambda z, a, b: (z - a) * (z + b) / (2 * z * (z - b)),
           lambda a, b: [HALF], lambda a, b: [0.0, b]),
    "g6": ("plus",
           lambda z, a, b: (z + b) / ((z + a) * (z - b)),
           lambda a, b: [HALF], lambda a, b: [-a, b]),
    "gs3": ("minus",
            lambda z, a, b: 1.0 / (z + a),
            lambda a, b: [HALF], lambda a, b: [-a]),
    "gs4": ("plus",
            lambda z, a, b: 2 * z / ((z - a) * (z + a) ** 2),
            lambda a, b: [HALF, a, -a], lambda a, b: []),
}

NEEDS_BETA = {"g3", "g4", "g5", "g6"}


def g_contour(index: str, p: FiniteParams, settings: Optional[ContourSettings] = None,
              x: ArrayLike = 0.0) -> Contour:
    if index not in G_TABLE:
        raise ValueError(f"Unknown g function {index!r}")
    _, _, enclosed, excluded = G_TABLE[index]
    b = _beta(p, index) if index in NEEDS_BETA else 0.0
    return _pole_contour(enclosed(p.alpha, b), excluded(p.alpha, b), finite_settings(settings, p.N + 1, x))


def g_finite(
    index: str,
    x: ArrayLike,
    p: FiniteParams,
    settings: Optional[ContourSettings] = None,
) -> Union[float, np.ndarray]:
    """
    g1..g6 of the two-parameter decomposition and their beta -> -alpha limits gs3, gs4

    Args:
        index: One of g1, g2, g3, g4, g5, g6, gs3, gs4
        x: Argument(s)
        p: Finite parameters; g3..g6 need beta
        settings: Contour node counts and placement

    Returns:
        Real value(s) shaped like x
    """
    if index not in G_TABLE:
        raise ValueError(f"Unknown g function {index!r}")
    power, rational, _, _ = G_TABLE[index]
    b = _beta(p, index) if index in NEEDS_BETA else 0.0
    contour = g_contour(index, p, settings, x)
    z = contour.nodes
    log_power = log_minus_type(z, p) if power == "minus" else log_plus_type(z, p)
    log_f = log_power + np.log(rational(z, p.alpha, b).astype(complex))
    values = laplace_sum(x, log_f, contour, index)
    return _shape_like(values, x)


def e_alpha(s: ArrayLike, p: FiniteParams, settings: Optional[ContourSettings] = None) -> Union[float, np.ndarray]:
    """
    e^alpha(s) = -oint_{1/2, alpha} Phi(s,z)/Phi(s,alpha) (1/2+alpha)^n/(1/2+z)^n dz/(z-alpha)^2
    """
    a = p.alpha
    contour = _pole_contour([HALF, a], [], finite_settings(settings, p.N + 2, s))
    z = contour.nodes
    log_f = (
        log_plus_type(z, p)
        - float(np.real(log_phi(np.asarray(a, dtype=complex), p.N)))
        + p.n * math.log(HALF + a)
        - 2.0 * np.log(z - a)
    )
    # the e^{-s z}/e^{-s alpha} ratio is kept as one exponent e^{-s (z - alpha)}
    shifted = Contour(contour.kind, contour.nodes - a, contour.weights, contour.geometry, contour.scale)
    values = -laplace_sum(s, log_f, shifted, "e_alpha")
    return _shape_like(values, s)


def sinh_ratio(a: float, t: ArrayLike) -> np.ndarray:
    """sinh(a t)/a, continuous through a = 0"""
    t = np.asarray(t, dtype=float)
    at = a * t
    small = np.abs(at) < SINH_SERIES_CUTOFF
    safe = np.where(small, 1.0, at)
    return np.where(small, t * (1.0 + at * at / 6.0), t * np.sinh(safe) / safe)


def j_alpha(s: float, y: ArrayLike, p: FiniteParams) -> Union[float, np.ndarray]:
    """j^alpha(s, y) = (sinh(alpha (y-s))/alpha + (y-s) e^{alpha (y-s)}) f_minus^{-alpha}(s)"""
    t = np.asarray(y, dtype=float) - s
    a = p.alpha
    out = (sinh_ratio(a, t) + t * np.exp(a * t)) * f_pm("minus", -a, s, p)
    return float(out) if np.ndim(out) == 0 else out


def eps(kind: str, x: ArrayLike, y: ArrayLike, p: FiniteParams,
        settings: Optional[ContourSettings] = None) -> Union[float, np.ndarray]:
    """
    Antisymmetric step kernels e0, e1, e2

    e0 = -sgn(x-y) e^{alpha|x-y|}/(1/4-alpha^2)^n, e2 is e0 with -alpha, and
    e1 = -sgn(x-y) oint_{1/2} 2z e^{-z|x-y|}/((z^2-alpha^2)(1/4-z^2)^n).
    """
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    d = np.abs(x_arr - y_arr)
    sgn = np.sign(x_arr - y_arr)
    a = p.alpha
    norm = (0.25 - a * a) ** p.n
    if kind == "e0":
        out = -sgn * np.exp(a * d) / norm
    elif kind == "e2":
        out = -sgn * np.exp(-a * d) / norm
    elif kind == "e1":
        out = -sgn * eps1_profile(d.ravel(), p, settings).reshape(d.shape)
    else:
        raise ValueError(f"Unknown eps kind {kind!r}")
    return float(out) if np.ndim(out) == 0 else out


def eps1_profile(d: np.ndarray, p: FiniteParams, settings: Optional[ContourSettings] = None) -> np.ndarray:
    """oint_{1/2} 2z e^{-z d}/((z^2-alpha^2)(1/4-z^2)^n) as a function of d >= 0"""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if p.n == 0:
        return np.zeros_like(d)
    a = p.alpha
    contour = _pole_contour([HALF], [a, -a, -HALF], finite_settings(settings, p.n + 2, d))
    z = contour.nodes
    log_f = np.log(2 * z / (z * z - a * a)) - p.n * (np.log(HALF - z) + np.log(HALF + z))
    return laplace_sum(d, log_f, contour, "eps1")


# ---------------------------------------------------------------------------
# critical-scaling functions

def f_scal(X: ArrayLike, delta: float, u: float) -> Union[float, np.ndarray]:
    """f^{-delta,u}(X) = exp(-delta^3/3 - delta^2 u + delta X)"""
    out = np.exp(-delta ** 3 / 3.0 - delta * delta * u + delta * np.asarray(X, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def airy_transform(
    X: ArrayLike,
    quad: float,
    rational: Callable[[np.ndarray], np.ndarray],
    anchor: float,
    settings: Optional[ContourSettings] = None,
    where: str = "airy",
) -> np.ndarray:
    """
    int_down e^{zeta^3/3 + quad zeta^2 - zeta X} rational(zeta) dzeta/(2 pi i)

    The down-oriented contour leaves the real axis at `anchor`; its nodes grow
    with the largest |X|.
    """
    settings = settings or ContourSettings()
    X_arr = np.atleast_1d(np.asarray(X, dtype=float))
    nodes = airy_node_count(float(np.max(np.abs(X_arr))), settings, anchor, quad)
    contour = make_airy("down", anchor, settings.ray_length, nodes)
    z = contour.nodes
    log_f = z ** 3 / 3.0 + quad * z * z + np.log(rational(z).astype(complex))
    return laplace_sum(X, log_f, contour, where)


def _g_scal(index: int, X: ArrayLike, p: AsympParams, settings: Optional[ContourSettings]) -> np.ndarray:
    d, u = p.delta, p.u
    if index == 1:
        return airy_transform(X, -u, lambda z: (z + d) / (2 * z), AIRY_OFFSET, settings, "g1_scal")
    if index == 2:
        return airy_transform(X, u, lambda z: 1.0 / (z - d), d - AIRY_OFFSET, settings, "g2_scal")
    if index == 3:
        return airy_transform(X, -u, lambda z: 1.0 / (z + d), -d + AIRY_OFFSET, settings, "g3_scal")
    if index == 4:
        return airy_transform(
            X, u, lambda z: 2 * z / ((z - d) * (z + d) ** 2), -abs(d) - AIRY_OFFSET, settings, "g4_scal"
        )
    raise ValueError(f"Unknown scaled g index {index}")


def e_scal(S: ArrayLike, p: AsympParams, settings: Optional[ContourSettings] = None) -> np.ndarray:
    """e^{delta,u}(S) = -int_{down, left of delta} e^{c(zeta) - c(delta)} dzeta/(zeta-delta)^2"""
    d, u = p.delta, p.u
    settings = settings or ContourSettings()
    S_arr = np.atleast_1d(np.asarray(S, dtype=float))
    nodes = airy_node_count(float(np.max(np.abs(S_arr - d))), settings, d - AIRY_OFFSET, u)
    contour = make_airy("down", d - AIRY_OFFSET, settings.ray_length, nodes)
    z = contour.nodes
    log_f = z ** 3 / 3.0 + u * z * z - (d ** 3 / 3.0 + u * d * d) - 2.0 * np.log(z - d)
    shifted = Contour(contour.kind, z - d, contour.weights, contour.geometry, contour.scale)
    return -laplace_sum(S, log_f, shifted, "e_scal")


def j_scal(S: float, X: ArrayLike, p: AsympParams) -> np.ndarray:
    """j^{delta,u}(S, X) = [sinh(delta(X-S))/delta + (X-S) e^{delta(X-S)}] f^{-delta,-u}(S)"""
    t = np.asarray(X, dtype=float) - S
    d = p.delta
    return (sinh_ratio(d, t) + t * np.exp(d * t)) * f_scal(S, d, -p.u)


def E0(X: ArrayLike, Y: ArrayLike, p: AsympParams) -> np.ndarray:
    X, Y = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
    return -np.sign(X - Y) * np.exp(p.delta * np.abs(X - Y) + 2.0 * p.delta ** 2 * p.u)


def E1_contour(p: AsympParams, d_max: float, settings: Optional[ContourSettings] = None) -> Contour:
    """Downward vertical line right of +-delta with Gaussian truncation of e^{2 u zeta^2}"""
    settings = settings or ContourSettings()
    c = abs(p.delta) + AIRY_OFFSET
    half_height = math.sqrt(GAUSS_DECAY / (2.0 * p.u))
    frequency = d_max + 4.0 * p.u * c
    nodes = max(settings.vertical_nodes, int(math.ceil(2.0 * half_height * frequency / math.pi)) + 16)
    return make_vertical(c, half_height, nodes).reversed()


def E1_profile(d: np.ndarray, p: AsympParams, settings: Optional[ContourSettings] = None) -> np.ndarray:
    """int_{down, right of +-delta} e^{-zeta d + 2 zeta^2 u} 2 zeta/(zeta^2 - delta^2)"""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if p.u == 0.0:
        return np.zeros_like(d)
    contour = E1_contour(p, float(np.max(d)) if d.size else 0.0, settings)
    z = contour.nodes
    log_f = 2.0 * p.u * z * z + np.log(2 * z / (z * z - p.delta ** 2))
    return laplace_sum(d, log_f, contour, "E1")


def E1(X: ArrayLike, Y: ArrayLike, p: AsympParams, settings: Optional[ContourSettings] = None) -> np.ndarray:
    X, Y = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))
    d = np.abs(X - Y)
    return -np.sign(X - Y) * E1_profile(d.ravel(), p, settings).reshape(d.shape)


def asymp_func(
    name: str,
    p: AsympParams,
    X: ArrayLike = 0.0,
    Y: ArrayLike = 0.0,
    S: Optional[float] = None,
    settings: Optional[ContourSettings] = None,
) -> Union[float, np.ndarray]:
    """
    Named scalar function of the critical-scaling limit

    Args:
        name: f_scal, e_scal, j_scal, g1_scal..g4_scal, E0 or E1
        p: Scaling parameters (delta, u, S)
        X, Y: Arguments; e_scal reads X as S
        S: Lower integration bound for j_scal, defaults to p.S
    """
    S = p.S if S is None else S
    if name == "f_scal":
        out = f_scal(X, p.delta, p.u)
    elif name == "e_scal":
        out = e_scal(X, p, settings)
    elif name == "j_scal":
        out = j_scal(S, X, p)
    elif name in ("g1_scal", "g2_scal", "g3_scal", "g4_scal"):
        out = _g_scal(int(name[1]), X, p, settings)
    elif name == "E0":
        out = E0(X, Y, p)
    elif name == "E1":
        out = E1(X, Y, p, settings)
    else:
        raise ValueError(f"Unknown asymptotic function {name!r}")
    out = np.asarray(out, dtype=float)
    if np.ndim(X) == 0 and np.ndim(Y) == 0:
        return float(out.ravel()[0])
    return out.reshape(np.broadcast(np.asarray(X), np.asarray(Y)).shape)


def g_scal(index: int, X: ArrayLike, p: AsympParams, settings: Optional[ContourSettings] = None) -> np.ndarray:
    return _g_scal(index, X, p, settings)


# ---------------------------------------------------------------------------
# Baik-Rains ingredients

def _br_prefactor(tau: float, s: float) -> float:
    return math.exp(-2.0 * tau ** 3 / 3.0 - s * tau)


def R_tau(tau: float, s: float, settings: Optional[ContourSettings] = None) -> float:
    """R_tau(s) = -e^{-2tau^3/3 - s tau} int_{down, left of -tau} e^{z^3/3 - z(s+tau^2)}/(z+tau)^2"""
    val = airy_transform(
        s + tau * tau, 0.0, lambda z: 1.0 / (z + tau) ** 2, -tau - AIRY_OFFSET, settings, "R_tau"
    )
    return float(-_br_prefactor(tau, s) * val[0])


def Psi_tau(tau: float, x: ArrayLike, settings: Optional[ContourSettings] = None) -> np.ndarray:
    """Psi_tau(x) = int_{down, left of -tau} e^{z^3/3 - z(x+tau^2)}/(z+tau)"""
    x = np.asarray(x, dtype=float)
    return airy_transform(x + tau * tau, 0.0, lambda z: 1.0 / (z + tau), -tau - AIRY_OFFSET, settings, "Psi_tau")


def br_contours(tau: float, settings: Optional[ContourSettings] = None,
                x_max: float = 0.0) -> Tuple[Contour, Contour]:
    """z down contour and w up contour with w right of tau and left of z"""
    settings = settings or ContourSettings()
    w_anchor = tau + 0.25
    nodes = airy_node_count(x_max, settings, max(abs(w_anchor), abs(w_anchor + AIRY_OFFSET)))
    cz = make_airy("down", w_anchor + AIRY_OFFSET, settings.ray_length, nodes)
    cw = make_airy("up", w_anchor, settings.ray_length, nodes)
    return cz, cw


def Phi_tau(tau: float, s: float, y: ArrayLike, settings: Optional[ContourSettings] = None) -> np.ndarray:
    """
    Phi_tau(y) = e^{-2tau^3/3 - s tau} int_down dz int_up dw
                 e^{z^3/3 - z(y+tau^2)} / e^{w^3/3 - w(s+tau^2)} / ((z-w)(w-tau))
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    span = max(float(np.max(np.abs(y + tau * tau))), abs(s + tau * tau))
    cz, cw = br_contours(tau, settings, span)
    z, w = cz.nodes, cw.nodes
    A = np.exp(z[None, :] ** 3 / 3.0 - np.outer(y + tau * tau, z))
    B = np.exp(-w ** 3 / 3.0 + w * (s + tau * tau))[None, :]
    C = 1.0 / ((z[:, None] - w[None, :]) * (w[None, :] - tau))
    val = integrate2_separable(A, C, B, cz, cw, coef=_br_prefactor(tau, s))[:, 0]
    return to_real(val, np.abs(val), "Phi_tau")


def airy_kernel_contours(settings: Optional[ContourSettings] = None,
                         x_max: float = 0.0) -> Tuple[Contour, Contour]:
    settings = settings or ContourSettings()
    nodes = airy_node_count(x_max, settings, 0.25)
    cz = make_airy("down", 0.25, settings.ray_length, nodes)
    cw = make_airy("up", -0.25, settings.ray_length, nodes)
    return cz, cw


def K_Ai_shift(
    x: ArrayLike,
    y: ArrayLike,
    tau: float = 0.0,
    settings: Optional[ContourSettings] = None,
) -> np.ndarray:
    """
    Shifted Airy kernel on the grid x times y

    -int_down dz int_{up, left of z} dw e^{z^3/3 - z(x+tau^2)}/e^{w^3/3 - w(y+tau^2)}/(z-w)
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    span = max(float(np.max(np.abs(x))), float(np.max(np.abs(y)))) + tau * tau
    cz, cw = airy_kernel_contours(settings, span)
    z, w = cz.nodes, cw.nodes
    A = np.exp(z[None, :] ** 3 / 3.0 - np.outer(x + tau * tau, z))
    B = np.exp(-w[None, :] ** 3 / 3.0 + np.outer(y + tau * tau, w))
    C = 1.0 / (z[:, None] - w[None, :])
    val = integrate2_separable(A, C, B, cz, cw, coef=-1.0)
    return to_real(val, np.abs(val), "K_Ai_shift")


def br_func(
    name: str,
    tau: float,
    s: float,
    x: ArrayLike = 0.0,
    y: ArrayLike = 0.0,
    settings: Optional[ContourSettings] = None,
) -> Union[float, np.ndarray]:
    """
    Named Baik-Rains ingredient

    Args:
        name: R_tau, Psi_tau, Phi_tau or K_Ai_shift
        tau: Shift parameter
        s: Lower bound of L^2(s, infinity)
        x, y: Arguments
    """
    if name == "R_tau":
        return R_tau(tau, s, settings)
    if name == "Psi_tau":
        out = Psi_tau(tau, x, settings)
    elif name == "Phi_tau":
        out = Phi_tau(tau, s, x, settings)
    elif name == "K_Ai_shift":
        out = K_Ai_shift(x, y, tau, settings)
        if np.ndim(x) == 0 and np.ndim(y) == 0:
            return float(out[0, 0])
        return out
    else:
        raise ValueError(f"Unknown Baik-Rains function {name!r}")
    return float(out[0]) if np.ndim(x) == 0 else out
