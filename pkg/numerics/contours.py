"""
Discretized complex contours and contour quadrature

Every contour stores its nodes together with weights that already include the
1/(2*pi*i) factor, so that sum(f(z_k) * w_k) approximates the normalized integral
of f along the oriented path.
"""
import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Any, List, Optional, Sequence, Tuple

import numpy as np

from models.params import ContourSettings
from utils.exceptions import (
    InfeasiblePoleSpecError,
    ContourCollisionError,
    NonFiniteIntegrandError,
    NoConvergenceError,
)

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi
POINT_TOL = 1e-12
WINDING_TOL = 1e-6
COLLISION_FRACTION = 0.05
REFINE_START = 32
REFINE_CAP = 2 ** 13
AIRY_PANEL = 1.5
NODE_GRAIN = 16
# Gauss-Legendre nodes per width-3 ray panel: slack plus nodes per unit of |x|
AIRY_SLACK = 16
AIRY_PER_X = 1.3


class ContourKind(Enum):
    CIRCLE = ("Circle", "circle")
    AIRY_DOWN = ("Airy down", "airy_down")
    AIRY_UP = ("Airy up", "airy_up")
    VERTICAL = ("Vertical line", "vertical")

    def __init__(self, display_name: str, code: str):
        self.display_name = display_name
        self.code = code


@dataclass(frozen=True)
class Contour:
    kind: ContourKind
    nodes: np.ndarray
    weights: np.ndarray
    geometry: Dict[str, Any] = field(default_factory=dict)
    scale: float = 1.0

    @property
    def node_count(self) -> int:
        return int(self.nodes.size)

    def reversed(self) -> "Contour":
        return Contour(self.kind, self.nodes, -self.weights, dict(self.geometry), self.scale)

    def edges(self) -> List[float]:
        """Real-axis crossings of the circles of a circle group"""
        out = []
        for circ in self.geometry.get("circles", []):
            out.extend([circ["center"] - circ["radius"], circ["center"] + circ["radius"]])
        return out

    def winding(self, p: complex) -> float:
        return float(np.real(np.sum(self.weights / (self.nodes - p))))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.code,
            "geometry": self.geometry,
            "nodes": [
                {"re": float(z.real), "im": float(z.imag), "wre": float(w.real), "wim": float(w.imag)}
                for z, w in zip(self.nodes, self.weights)
            ],
        }

    @classmethod
    def join(cls, parts: Sequence["Contour"]) -> "Contour":
        """Union of disjoint closed contours, integrated as one"""
        if len(parts) == 1:
            return parts[0]
        circles = []
        for c in parts:
            circles.extend(c.geometry.get("circles", []))
        return cls(
            kind=parts[0].kind,
            nodes=np.concatenate([c.nodes for c in parts]),
            weights=np.concatenate([c.weights for c in parts]),
            geometry={"circles": circles},
            scale=min(c.scale for c in parts),
        )


@dataclass(frozen=True)
class PoleSpec:
    """
    Pole placement request for a closed contour

    enclosed points are wound around once, excluded points stay outside, and
    partner points belong to a second contour of a 1/(z-w) double integral.
    """
    enclosed: Tuple[complex, ...]
    excluded: Tuple[complex, ...] = ()
    partner: Tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "enclosed", _dedupe(self.enclosed))
        object.__setattr__(self, "excluded", _dedupe(self.excluded))
        object.__setattr__(self, "partner", _dedupe(self.partner))

    def check_feasible(self) -> None:
        for e in self.excluded:
            if _contains(self.enclosed, e):
                raise InfeasiblePoleSpecError(
                    f"Point {e} is both enclosed and excluded",
                    enclosed=list(self.enclosed), excluded=list(self.excluded),
                )
        for p in self.partner:
            if _contains(self.enclosed, p):
                raise InfeasiblePoleSpecError(
                    f"Point {p} is enclosed by both contours",
                    enclosed=list(self.enclosed), excluded=list(self.partner),
                )
        if not self.enclosed:
            raise InfeasiblePoleSpecError("No enclosed points", excluded=list(self.excluded))

    def is_real(self) -> bool:
        pts = list(self.enclosed) + list(self.excluded) + list(self.partner)
        return all(abs(complex(p).imag) < POINT_TOL for p in pts)

    def partition(self) -> List[List[float]]:
        """Clusters of enclosed real points not separated by an excluded or partner point"""
        blockers = sorted(complex(p).real for p in list(self.excluded) + list(self.partner))
        pts = sorted(complex(p).real for p in self.enclosed)
        clusters = [[pts[0]]]
        for prev, cur in zip(pts, pts[1:]):
            if any(prev - POINT_TOL <= b <= cur + POINT_TOL for b in blockers):
                clusters.append([cur])
            else:
                clusters[-1].append(cur)
        return clusters


def _dedupe(points: Sequence[complex]) -> Tuple[complex, ...]:
    out: List[complex] = []
    for p in points:
        if not _contains(out, p):
            out.append(complex(p))
    return tuple(out)


def _contains(points: Sequence[complex], p: complex) -> bool:
    return any(abs(complex(q) - complex(p)) < POINT_TOL for q in points)


def _circle(center: complex, radius: float, node_count: int) -> Contour:
    k = np.arange(node_count)
    offsets = radius * np.exp(2j * math.pi * k / node_count)
    return Contour(
        kind=ContourKind.CIRCLE,
        nodes=center + offsets,
        weights=offsets / node_count,
        geometry={"circles": [{"center": float(np.real(center)), "radius": float(radius),
                               "center_im": float(np.imag(center))}]},
        scale=float(radius),
    )


def _check_winding(c: Contour, poles: PoleSpec) -> None:
    for p in poles.enclosed:
        wn = c.winding(p)
        if abs(wn - 1.0) > WINDING_TOL:
            raise InfeasiblePoleSpecError(
                f"Winding number {wn:.6f} around enclosed point {p}",
                enclosed=list(poles.enclosed), excluded=list(poles.excluded),
            )
    for p in list(poles.excluded) + list(poles.partner):
        wn = c.winding(p)
        if abs(wn) > WINDING_TOL:
            raise InfeasiblePoleSpecError(
                f"Winding number {wn:.6f} around excluded point {p}",
                enclosed=list(poles.enclosed), excluded=list(poles.excluded),
            )


def _alias_nodes(ratio: float, order: int, target: float) -> float:
    """
    Smallest n with C(n, order-1) ratio^n below e^{-target}

    ratio is the distance of a singularity from the centre over the radius (or
    its inverse for outside points); the binomial accounts for poles of high order.
    """
    rate = -math.log(min(ratio, 1.0 - 1e-12))
    n = target / rate
    if order > 1:
        for _ in range(6):
            n = (target + (order - 1) * math.log(max(1.0, math.e * n / (order - 1)))) / rate
    return n


def trapezoid_nodes(
    center: complex,
    radius: float,
    inside: Sequence[complex],
    outside: Sequence[complex],
    settings: ContourSettings,
) -> int:
    """
    Nodes for which the trapezoid rule on |z - center| = radius reaches settings.digits

    The rule is exact for Laurent polynomials of degree below n, so the error is
    the aliasing of the singularities inside and outside the circle plus that of
    the entire factor e^{-xz} with |x| <= settings.x_span. Capped at settings.max_nodes.
    """
    target = settings.digits * math.log(10.0)
    order = settings.pole_order
    need = float(max(settings.nodes, 2 * order + NODE_GRAIN))
    q_in = max((abs(complex(p) - center) / radius for p in inside), default=0.0)
    q_out = max((radius / abs(complex(p) - center) for p in outside), default=0.0)
    for ratio in (q_in, q_out):
        if ratio > POINT_TOL:
            need = max(need, _alias_nodes(ratio, order, target))
    if settings.x_span > 0:
        need = max(need, math.e * settings.x_span * radius + target)
    nodes = NODE_GRAIN * int(math.ceil(need / NODE_GRAIN))
    if nodes > settings.max_nodes:
        logger.warning(f"Circle at {center:.4g} (radius {radius:.3g}) wants {nodes} nodes, "
                       f"capped at {settings.max_nodes}")
        nodes = settings.max_nodes
    return nodes


def _refine_on_winding(build: Callable[[int], Contour], counts: Sequence[int], poles: PoleSpec,
                       cap: int) -> Contour:
    """Builds with node counts scaled by 1, 2, 4, ... until the winding numbers are right"""
    factor = 1
    while True:
        contour = build(factor)
        try:
            _check_winding(contour, poles)
            return contour
        except InfeasiblePoleSpecError:
            if all(n * factor >= cap for n in counts):
                raise
            factor *= 2
            logger.debug(f"Winding check failed, refining circles by a factor {factor}")


def make_circle(poles: PoleSpec, node_count: int = 128, settings: Optional[ContourSettings] = None) -> Contour:
    """
    Single circle around all enclosed points

    The circle is centred at the centroid of the enclosed points; its radius is
    the largest distance to an enclosed point plus a quarter of the clearance to
    the nearest excluded point (0.1 when nothing is excluded). With settings the
    node count is sized from the geometry, node_count being the minimum.

    Raises:
        InfeasiblePoleSpecError: If no such circle separates the two sets
    """
    poles.check_feasible()
    enclosed = np.array(poles.enclosed, dtype=complex)
    center = complex(np.mean(enclosed))
    max_dist = float(np.max(np.abs(enclosed - center)))
    blockers = list(poles.excluded) + list(poles.partner)
    if blockers:
        gap = min(abs(complex(e) - center) for e in blockers) - max_dist
        if gap <= 0:
            raise InfeasiblePoleSpecError(
                "No circle around the centroid separates enclosed from excluded points",
                enclosed=list(poles.enclosed), excluded=blockers,
            )
    else:
        gap = 0.1
    radius = max_dist + 0.25 * gap
    if settings is None:
        contour = _circle(center, radius, node_count)
        _check_winding(contour, poles)
        return contour
    settings = settings.model_copy(update={"nodes": max(node_count, settings.nodes)})
    nodes = trapezoid_nodes(center, radius, poles.enclosed, blockers, settings)
    return _refine_on_winding(lambda f: _circle(center, radius, min(nodes * f, settings.max_nodes)),
                              [nodes], poles, settings.max_nodes)


def make_origin_circle(radius: float, node_count: int = 128) -> Contour:
    """Positively oriented circle |z| = radius"""
    if not radius > 0:
        raise InfeasiblePoleSpecError(f"Circle radius must be positive, got {radius}")
    return _circle(0j, radius, node_count)


def make_pole_contour(poles: PoleSpec, settings: Optional[ContourSettings] = None) -> Contour:
    """
    Union of circles around clusters of real poles

    Each cluster spans an interval of the real axis which is widened towards its
    neighbours by settings.fill of the gap to an excluded point, by
    settings.partner_fill of the gap to a partner point, and on a free side by
    settings.reach times the spread of all points. Neither side reaches further
    than the other side or the cluster width, so a lone pole sits at the centre of
    its circle. Node counts come from trapezoid_nodes; circles whose winding
    numbers still miss are refined up to settings.max_nodes.
    """
    settings = settings or ContourSettings()
    poles.check_feasible()
    if not poles.is_real():
        return make_circle(poles, settings.nodes, settings)

    enclosed = [complex(p).real for p in poles.enclosed]
    excluded = [complex(p).real for p in poles.excluded]
    partner = [complex(p).real for p in poles.partner]
    everything = enclosed + excluded + partner
    spread = max(everything) - min(everything)
    free = settings.reach * (spread if spread > POINT_TOL else 1.0)

    circles, counts = [], []
    for cluster in poles.partition():
        lo, hi = min(cluster), max(cluster)
        ext_left = _extension(lo, -1, excluded, partner, settings, free)
        ext_right = _extension(hi, +1, excluded, partner, settings, free)
        width = hi - lo
        ext_left, ext_right = min(ext_left, max(ext_right, width)), min(ext_right, max(ext_left, width))
        left, right = lo - ext_left, hi + ext_right
        center, radius = 0.5 * (left + right), 0.5 * (right - left)
        others = [p for p in enclosed if not any(abs(p - c) < POINT_TOL for c in cluster)]
        outside = others + excluded + [_partner_reach(p, center, radius, settings) for p in partner]
        circles.append((center, radius))
        counts.append(trapezoid_nodes(center, radius, cluster, outside, settings))

    def build(factor: int) -> Contour:
        return Contour.join([_circle(c, r, min(n * factor, settings.max_nodes))
                             for (c, r), n in zip(circles, counts)])

    contour = _refine_on_winding(build, counts, poles, settings.max_nodes)
    logger.debug(
        f"Pole contour: {len(circles)} circle(s) on "
        + ", ".join(f"[{c['center'] - c['radius']:.4g}, {c['center'] + c['radius']:.4g}]"
                    for c in contour.geometry["circles"])
        + f" with {contour.node_count} nodes"
    )
    return contour


def _partner_reach(p: float, center: float, radius: float, settings: ContourSettings) -> float:
    """Nearest point the partner circle around p may reach towards this circle"""
    gap = abs(p - center) - radius
    return p - math.copysign(settings.partner_fill * max(gap, 0.0), p - center)


def _extension(
    edge: float,
    direction: int,
    excluded: List[float],
    partner: List[float],
    settings: ContourSettings,
    free: float,
) -> float:
    ext = free
    for points, fraction in ((excluded, settings.fill), (partner, settings.partner_fill)):
        gaps = [direction * (p - edge) for p in points if direction * (p - edge) > POINT_TOL]
        if gaps:
            ext = min(ext, fraction * min(gaps))
    return ext


def make_pair(
    z_poles: PoleSpec,
    w_poles: PoleSpec,
    settings: Optional[ContourSettings] = None,
) -> Tuple[Contour, Contour]:
    """
    Disjoint z and w contours for a double integral with a 1/(z-w) factor

    The z contour is placed first, avoiding the points w encloses; the w contour
    then avoids both the points z encloses and the z circles themselves.
    """
    z_spec = PoleSpec(z_poles.enclosed, z_poles.excluded,
                      tuple(z_poles.partner) + tuple(w_poles.enclosed))
    cz = make_pole_contour(z_spec, settings)
    w_spec = PoleSpec(w_poles.enclosed, w_poles.excluded,
                      tuple(w_poles.partner) + tuple(z_poles.enclosed) + tuple(cz.edges()))
    cw = make_pole_contour(w_spec, settings)
    return cz, cw


def _gauss_legendre(a: float, b: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _ray_panels(length: float, node_count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre panels on [0, length]: a dense panel near the anchor, then width-3 panels"""
    if length <= AIRY_PANEL:
        return _gauss_legendre(0.0, length, node_count)
    ts, ws = [], []
    t, w = _gauss_legendre(0.0, AIRY_PANEL, max(8, node_count // 2))
    ts.append(t)
    ws.append(w)
    edges = list(np.arange(AIRY_PANEL, length, 2 * AIRY_PANEL)) + [length]
    for a, b in zip(edges, edges[1:]):
        if b - a <= 1e-12:
            continue
        t, w = _gauss_legendre(a, b, max(8, node_count // 4))
        ts.append(t)
        ws.append(w)
    return np.concatenate(ts), np.concatenate(ws)


def make_airy(direction: str, anchor: float, ray_length: float = 12.0, node_count: int = 48) -> Contour:
    """
    Pair of rays leaving the real point `anchor`

    direction "down": from e^{i pi/3} infinity through the anchor to e^{-i pi/3} infinity.
    direction "up": from e^{-2i pi/3} infinity through the anchor to e^{2i pi/3} infinity.
    """
    if ray_length <= 0:
        raise ValueError(f"ray_length must be positive, got {ray_length}")
    t, wt = _ray_panels(ray_length, node_count)
    if direction == "down":
        incoming, outgoing, kind = np.exp(1j * math.pi / 3), np.exp(-1j * math.pi / 3), ContourKind.AIRY_DOWN
    elif direction == "up":
        incoming, outgoing, kind = np.exp(-2j * math.pi / 3), np.exp(2j * math.pi / 3), ContourKind.AIRY_UP
    else:
        raise ValueError(f"Unknown Airy contour direction: {direction}")
    nodes = np.concatenate([anchor + t * incoming, anchor + t * outgoing])
    weights = np.concatenate([-incoming * wt, outgoing * wt]) / TWO_PI_I
    return Contour(
        kind=kind,
        nodes=nodes,
        weights=weights,
        geometry={"anchor": float(anchor), "ray_length": float(ray_length)},
        scale=1.0,
    )


def airy_node_count(x_max: float, settings: Optional[ContourSettings] = None,
                    anchor: float = 0.0, quad: float = 0.0) -> int:
    """
    Gauss-Legendre nodes per Airy ray for e^{z^3/3 + quad z^2 - zx} with |x| <= x_max

    e^{-zx} turns by about 0.87 |x| radians per unit length of the ray. A ray
    leaving the axis at a != 0 adds about 0.87 (a^2 + 2|a|t) from the cubic and
    0.87 |quad| (2|a| + 2t) from the quadratic term at distance t, which the
    count takes at the end of the first wide panel.
    """
    settings = settings or ContourSettings()
    t = 2 * AIRY_PANEL
    a = abs(anchor)
    rate = abs(x_max) + a * a + 2 * a * t + abs(quad) * (2 * a + 2 * t)
    per_panel = AIRY_SLACK + AIRY_PER_X * rate * t
    return max(settings.airy_nodes, 4 * int(math.ceil(per_panel)))


def make_vertical(abscissa: float, half_height: float, node_count: int = 96, panel: float = 2.0) -> Contour:
    """Line abscissa + i t, |t| <= half_height, oriented upwards"""
    n_panels = max(1, int(math.ceil(half_height / panel)))
    per_panel = max(8, int(math.ceil(node_count / n_panels)))
    edges = np.linspace(0.0, half_height, n_panels + 1)
    ts, ws = [], []
    for a, b in zip(edges, edges[1:]):
        t, w = _gauss_legendre(a, b, per_panel)
        ts.append(t)
        ws.append(w)
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    t = np.concatenate([-t[::-1], t])
    w = np.concatenate([w[::-1], w])
    return Contour(
        kind=ContourKind.VERTICAL,
        nodes=abscissa + 1j * t,
        weights=w / (2.0 * math.pi),
        geometry={"abscissa": float(abscissa), "half_height": float(half_height)},
        scale=1.0,
    )


def _require_finite(values: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteIntegrandError(f"Integrand is not finite on {where}", where=where)


def integrate(f: Callable[[np.ndarray], np.ndarray], c: Contour) -> complex:
    """Normalized contour integral of f(z) dz/(2 pi i)"""
    values = np.asarray(f(c.nodes), dtype=complex)
    _require_finite(values, c.kind.code)
    return complex(np.sum(values * c.weights))


def check_separation(cz: Contour, cw: Contour) -> float:
    """
    Minimal node distance between two contours

    Raises:
        ContourCollisionError: If closer than 5% of the smaller contour scale
    """
    dist = float(np.min(np.abs(cz.nodes[:, None] - cw.nodes[None, :])))
    limit = COLLISION_FRACTION * min(cz.scale, cw.scale)
    if dist < limit:
        raise ContourCollisionError(
            f"Contours {cz.kind.code}/{cw.kind.code} are {dist:.3g} apart, need {limit:.3g}",
            min_distance=dist,
        )
    return dist


def integrate2(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    cz: Contour,
    cw: Contour,
    singular: bool = False,
) -> complex:
    """Tensor-product double integral of f(z, w) dz dw/(2 pi i)^2"""
    if singular:
        check_separation(cz, cw)
    Z, W = np.meshgrid(cz.nodes, cw.nodes, indexing="ij")
    values = np.asarray(f(Z, W), dtype=complex)
    _require_finite(values, f"{cz.kind.code} x {cw.kind.code}")
    return complex(cz.weights @ values @ cw.weights)


def integrate2_separable(
    A: np.ndarray,
    C: np.ndarray,
    B: np.ndarray,
    cz: Contour,
    cw: Contour,
    coef: complex = 1.0,
    singular: bool = True,
) -> np.ndarray:
    """
    Grid of double integrals with a separable integrand

    Computes coef * sum_{k,l} A[i,k] wz_k C[k,l] ww_l B[j,l] for all (i, j), the
    quadrature of A(x_i, z) C(z, w) B(y_j, w) over cz x cw.
    """
    if singular:
        check_separation(cz, cw)
    left = A * cz.weights[None, :]
    right = B * cw.weights[None, :]
    out = coef * (left @ C @ right.T)
    _require_finite(out, f"{cz.kind.code} x {cw.kind.code}")
    return out


def refine_until(
    thunk: Callable[[int], complex],
    rel_tol: float,
    start: int = REFINE_START,
    cap: int = REFINE_CAP,
) -> Tuple[complex, float]:
    """
    Doubles the node count until successive values agree

    Args:
        thunk: Integral as a function of the node count
        rel_tol: Relative tolerance between successive values

    Returns:
        Last value and the last relative change

    Raises:
        NoConvergenceError: If the cap is reached above tolerance
    """
    nodes = start
    value = thunk(nodes)
    delta = math.inf
    while nodes < cap:
        nodes *= 2
        new = thunk(nodes)
        delta = abs(new - value) / max(abs(new), 1e-300)
        value = new
        if delta < rel_tol:
            logger.debug(f"refine_until converged at {nodes} nodes, delta={delta:.3g}")
            return value, delta
    raise NoConvergenceError(
        f"No convergence to {rel_tol:g} within {cap} nodes (last delta {delta:.3g})",
        achieved_tol=delta,
    )
