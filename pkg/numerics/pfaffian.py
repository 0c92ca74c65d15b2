"""
Dense and Fredholm Pfaffians

Kernels are discretized on a QuadratureGrid in interleaved order: row 2i holds
component 1 at node x_i, row 2i+1 component 2. Block (i, j) of the discrete
operator is sqrt(w_i w_j) K(x_i, x_j), a symmetric weighting that keeps the
matrix antisymmetric.
"""
import math
import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional, Protocol, Tuple

import numpy as np
from scipy import linalg

from models.results import PfaffianResult
from utils.exceptions import AntisymmetryError, SingularSystemError, ParameterDomainError
from utils.io import write_matrix

logger = logging.getLogger(__name__)

ANTISYM_TOL = 1e-10
KERNEL_ANTISYM_TOL = 1e-6
MAX_DIMENSION = 20000
SINGULAR_PIVOT = 1e-13
# extra Gauss-Legendre nodes on each side of x_i in the product integration of a jump
STEP_EXTRA_NODES = 16

Panel = Tuple[int, int, float, float]


class BlockKernel(Protocol):
    def block(self, xs: np.ndarray, ys: np.ndarray, mu: float = 0.0, center: float = 0.0) -> np.ndarray:
        ...


@dataclass(frozen=True)
class QuadratureGrid:
    base: float
    cutoff: float
    nodes: np.ndarray
    weights: np.ndarray
    mu: float = 0.0
    center: Optional[float] = None
    # (start, stop, lo, hi): nodes[start:stop] are Gauss-Legendre nodes of the panel (lo, hi)
    panels: Tuple[Panel, ...] = ()

    @property
    def conj_center(self) -> float:
        """Point about which the conjugation e^{mu(x-c)} is taken, base unless set"""
        return self.base if self.center is None else self.center

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def with_mu(self, mu: float) -> "QuadratureGrid":
        return replace(self, mu=mu)

    def balanced(self, mu: float, balance: float) -> "QuadratureGrid":
        """
        Conjugation e^{mu(x-s) + balance} on the first component

        A constant diag(c, 1/c) factor leaves Fredholm Pfaffians and brackets unchanged;
        it is realized by moving the conjugation center.
        """
        if mu == 0.0 or balance == 0.0:
            return self.with_mu(mu)
        return replace(self, mu=mu, center=self.base - balance / mu)

    def describe(self) -> dict:
        return {"base": self.base, "cutoff": self.cutoff, "nodes": self.size, "mu": self.mu,
                "center": self.conj_center}


def make_grid(s: float, cutoff: float, m: int, mu: float = 0.0) -> QuadratureGrid:
    """
    Gauss-Legendre discretization of L^2(s, s + cutoff)

    Raises:
        ParameterDomainError: If m < 4 or cutoff <= 0
    """
    errors = []
    if m < 4:
        errors.append(f"grid needs at least 4 nodes, got {m}")
    if not cutoff > 0:
        errors.append(f"cutoff must be positive, got {cutoff}")
    if errors:
        raise ParameterDomainError("Invalid quadrature grid", errors=errors)
    x, w = np.polynomial.legendre.leggauss(m)
    half = 0.5 * cutoff
    return QuadratureGrid(base=s, cutoff=cutoff, nodes=s + half * (x + 1.0), weights=half * w, mu=mu,
                          panels=((0, m, float(s), float(s + cutoff)),))


def make_graded_grid(s: float, core: float, cutoff: float, m: int, mu: float = 0.0,
                     ratio: float = 3.0) -> QuadratureGrid:
    """
    Composite Gauss-Legendre grid on (s, s + cutoff)

    Three fifths of the nodes go to (s, s + core), the rest to geometrically
    growing panels beyond it, where the kernels are sums of slowly decaying
    exponentials. Falls back to make_grid when the tail is short.
    """
    if cutoff <= 1.5 * core or core <= 0:
        return make_grid(s, cutoff, m, mu)
    m_core = max(4, int(math.ceil(0.6 * m)))
    edges = [core]
    width = core
    while edges[-1] < cutoff:
        width *= ratio
        edges.append(min(cutoff, edges[-1] + width))
    tail = list(zip(edges, edges[1:]))
    m_panel = max(8, int(math.ceil((m - m_core) / len(tail))))
    core_grid = make_grid(s, core, m_core)
    nodes, weights = [core_grid.nodes], [core_grid.weights]
    panels = list(core_grid.panels)
    for lo, hi in tail:
        x, w = np.polynomial.legendre.leggauss(m_panel)
        half = 0.5 * (hi - lo)
        start = panels[-1][1]
        panels.append((start, start + m_panel, float(s + lo), float(s + hi)))
        nodes.append(s + lo + half * (x + 1.0))
        weights.append(half * w)
    logger.debug(f"Graded grid: core {core:.4g} with {m_core} nodes, {len(tail)} tail panel(s) to {cutoff:.4g}")
    return QuadratureGrid(base=s, cutoff=cutoff, nodes=np.concatenate(nodes),
                          weights=np.concatenate(weights), mu=mu, panels=tuple(panels))


def make_discrete_grid(s: int, cutoff: int, mu: float = 0.0) -> QuadratureGrid:
    """Integer sites s+1, ..., s+cutoff with unit weights"""
    if cutoff < 1:
        raise ParameterDomainError("Invalid discrete grid", errors=[f"cutoff must be >= 1, got {cutoff}"])
    nodes = np.arange(s + 1, s + cutoff + 1, dtype=float)
    return QuadratureGrid(base=float(s), cutoff=float(cutoff), nodes=nodes, weights=np.ones(cutoff), mu=mu)


def antisymmetry_defect(A: np.ndarray) -> float:
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(A + A.T))) / scale


def pfaffian_dense(A: np.ndarray, tol: float = ANTISYM_TOL) -> PfaffianResult:
    """
    Pfaffian by skew-symmetric Parlett-Reid elimination with partial pivoting

    Args:
        A: Antisymmetric matrix of even dimension
        tol: Accepted relative antisymmetry defect before antisymmetrizing

    Returns:
        Value with its log-scale and sign, and the pivot growth factor

    Raises:
        AntisymmetryError: For odd dimension or a defect above tol
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise AntisymmetryError(f"Pfaffian needs a square matrix, got shape {A.shape}")
    if n % 2 == 1:
        raise AntisymmetryError(f"Pfaffian needs an even dimension, got {n}")
    if n == 0:
        return PfaffianResult(value=1.0, log_scale=0.0, sign=1.0, pivot_growth=1.0)

    defect = antisymmetry_defect(A)
    if defect > tol:
        raise AntisymmetryError(f"Matrix is not antisymmetric (defect {defect:.3g})", defect=defect)
    A = 0.5 * (A - A.T)

    initial = float(np.max(np.abs(A))) or 1.0
    growth = 1.0
    sign = 1.0
    log_scale = 0.0

    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(A[k + 1:, k]).argmax())
        if kp != k + 1:
            A[[k + 1, kp], k:] = A[[kp, k + 1], k:]
            A[k:, [k + 1, kp]] = A[k:, [kp, k + 1]]
            sign = -sign
        pivot = A[k, k + 1]
        if pivot == 0.0:
            return PfaffianResult(value=0.0, log_scale=-math.inf, sign=0.0, pivot_growth=growth)
        sign *= math.copysign(1.0, pivot)
        log_scale += math.log(abs(pivot))
        if k + 2 < n:
            tau = A[k, k + 2:] / pivot
            col = A[k + 2:, k + 1].copy()
            A[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
            growth = max(growth, float(np.max(np.abs(A[k + 2:, k + 2:]))) / initial)

    value = sign * math.exp(log_scale) if log_scale < 700.0 else sign * math.inf
    return PfaffianResult(value=value, log_scale=log_scale, sign=sign, pivot_growth=growth)


def pf(A: np.ndarray, tol: float = ANTISYM_TOL) -> float:
    return pfaffian_dense(A, tol).value


def interleave(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    out = np.empty(2 * first.size, dtype=float)
    out[0::2] = first
    out[1::2] = second
    return out


def j_matrix(m: int) -> np.ndarray:
    """Block-diagonal J with blocks [[0, 1], [-1, 0]]"""
    return np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Barycentric interpolation weights of distinct nodes, up to a common factor"""
    t = nodes - 0.5 * (nodes[0] + nodes[-1])
    t = t / (float(np.max(np.abs(t))) or 1.0)
    diff = t[:, None] - t[None, :]
    np.fill_diagonal(diff, 1.0)
    sign = np.prod(np.sign(diff), axis=1)
    log_w = -np.sum(np.log(np.abs(diff)), axis=1)
    return sign * np.exp(log_w - log_w.max())


def lagrange_matrix(nodes: np.ndarray, weights: np.ndarray, points: np.ndarray) -> np.ndarray:
    """L[r, j] = l_j(points[r]) for the Lagrange basis on nodes"""
    diff = points[:, None] - nodes[None, :]
    hit = diff == 0.0
    diff[hit] = 1.0
    terms = weights[None, :] / diff
    L = terms / terms.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    L[rows] = hit[rows].astype(float)
    return L


def step_correction(kern: BlockKernel, grid: QuadratureGrid) -> Optional[np.ndarray]:
    """
    Product-integration correction of a sgn(x - y) jump in the 22 entry

    Kernels with a jump write K22 = smooth + sgn(x - y) E(x, y), with E smooth on
    either side of the diagonal, and expose E as `step_profile` (elementwise,
    conjugated). A Nystrom sum across the jump converges only algebraically; within
    each panel it is replaced by the integral of sgn(x_i - y) E(x_i, y) against the
    panel interpolant of the unknown, split at x_i. Returns the change of the 22 block in the symmetric
    weighting, or None when there is nothing to correct.
    """
    step_profile = getattr(kern, "step_profile", None)
    if step_profile is None or not grid.panels:
        return None
    m = grid.size
    sw = grid.sqrt_weights()
    out = np.zeros((m, m))
    for start, stop, lo, hi in grid.panels:
        ys = grid.nodes[start:stop]
        wy = grid.weights[start:stop]
        bary = barycentric_weights(ys)
        t, tw = np.polynomial.legendre.leggauss(ys.size + STEP_EXTRA_NODES)
        for r, x in enumerate(ys):
            sub = np.concatenate([lo + 0.5 * (x - lo) * (t + 1.0), x + 0.5 * (hi - x) * (t + 1.0)])
            sub_w = np.concatenate([0.5 * (x - lo) * tw, -0.5 * (hi - x) * tw])
            points = np.concatenate([sub, ys])
            values = np.asarray(step_profile(np.full(points.size, x), points, grid.mu, grid.conj_center), dtype=float)
            exact = (sub_w * values[:sub.size]) @ lagrange_matrix(ys, bary, sub)
            nystrom = wy * np.sign(x - ys) * values[sub.size:]
            i = start + r
            out[i, start:stop] = (exact - nystrom) * sw[i] / sw[start:stop]
    defect = float(np.max(np.abs(out + out.T))) if out.size else 0.0
    logger.debug(f"Step correction on {len(grid.panels)} panel(s), antisymmetry defect {defect:.3g}")
    return 0.5 * (out - out.T)


def assemble(kern: BlockKernel, grid: QuadratureGrid) -> np.ndarray:
    """
    Discrete operator of a conjugated 2x2 kernel

    Raises:
        ParameterDomainError: If the matrix would exceed the dimension guard
        AntisymmetryError: If the discretized kernel is not antisymmetric
    """
    m = grid.size
    if 2 * m > MAX_DIMENSION:
        raise ParameterDomainError("Grid too large", errors=[f"2M={2 * m} exceeds {MAX_DIMENSION}"])
    values = np.asarray(kern.block(grid.nodes, grid.nodes, mu=grid.mu, center=grid.conj_center), dtype=float)
    sw = grid.sqrt_weights()
    scale = np.outer(sw, sw)
    A = np.empty((2 * m, 2 * m), dtype=float)
    for a in range(2):
        for b in range(2):
            A[a::2, b::2] = values[a, b] * scale
    defect = antisymmetry_defect(A)
    if defect > KERNEL_ANTISYM_TOL:
        raise AntisymmetryError(f"Discretized kernel is not antisymmetric (defect {defect:.3g})", defect=defect)
    if defect > ANTISYM_TOL:
        logger.debug(f"Antisymmetrizing discretized kernel, defect {defect:.3g}")
    A = 0.5 * (A - A.T)
    correction = step_correction(kern, grid)
    if correction is not None:
        A[1::2, 1::2] += correction
    return A


def fredholm_pf(kern: BlockKernel, grid: QuadratureGrid) -> float:
    """pf(J - K) on L^2(s, s+T) x L^2(s, s+T), conjugated with grid.mu about grid.base"""
    A = assemble(kern, grid)
    return pf(j_matrix(grid.size) - A)


def fredholm_pf_discrete(kern: BlockKernel, s: int, cutoff: int, mu: float = 0.0) -> float:
    """pf(J - K) on l^2({s+1, ..., s+cutoff}) with unit weights"""
    return fredholm_pf(kern, make_discrete_grid(s, cutoff, mu))


def fredholm_det_block(kern: BlockKernel, grid: QuadratureGrid) -> float:
    """det(1 - J^{-1} K) on the same discretization, the square of fredholm_pf"""
    A = assemble(kern, grid)
    Jinv = -j_matrix(grid.size)
    return float(np.linalg.det(np.eye(A.shape[0]) - Jinv @ A))


def border_vectors(
    grid: QuadratureGrid,
    left: Tuple[np.ndarray, np.ndarray],
    right: Tuple[np.ndarray, np.ndarray],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Weighted and conjugated border vectors

    left (c, d) picks up (e^{mu(x-s)}, e^{-mu(x-s)}) and right (a, b) the inverse,
    matching the kernel conjugation diag(e^{mu(x-s)}, e^{-mu(x-s)}).
    """
    sw = grid.sqrt_weights()
    e = np.exp(grid.mu * (grid.nodes - grid.conj_center))
    c, d = (np.asarray(v, dtype=float) for v in left)
    a, b = (np.asarray(v, dtype=float) for v in right)
    v_left = interleave(sw * c * e, sw * d / e)
    v_right = interleave(sw * a / e, sw * b * e)
    return v_left, v_right


def bracket_pf(
    kern: BlockKernel,
    left: Tuple[np.ndarray, np.ndarray],
    right: Tuple[np.ndarray, np.ndarray],
    grid: QuadratureGrid,
    A: Optional[np.ndarray] = None,
) -> Tuple[float, float]:
    """
    pf(J-K) <(c,d)|(1 - J^{-1}K)^{-1}(a,b)> as a difference of two Pfaffians

    pf(J-K) - pf(J - K - |b,-a><c,d| - |c,d><-b,a|), with border functions given
    as values on the grid nodes.

    Returns:
        (pf(J-K), pf(J-K) times the bracket)
    """
    if A is None:
        A = assemble(kern, grid)
    M = j_matrix(grid.size) - A
    v_left, v_right = border_vectors(grid, left, right)
    a_part = v_right[0::2]
    b_part = v_right[1::2]
    u = interleave(b_part, -a_part)
    aug = np.outer(u, v_left) - np.outer(v_left, u)
    base = pf(M)
    augmented = pf(M - aug)
    return base, base - augmented


def resolvent_inner(
    kern: BlockKernel,
    left: Tuple[np.ndarray, np.ndarray],
    right: Tuple[np.ndarray, np.ndarray],
    grid: QuadratureGrid,
) -> float:
    """
    <(c,d)|(1 - J^{-1}K)^{-1}(a,b)> by a direct linear solve

    Raises:
        SingularSystemError: If the discretized 1 - J^{-1}K is numerically singular
    """
    A = assemble(kern, grid)
    Jinv = -j_matrix(grid.size)
    system = np.eye(A.shape[0]) - Jinv @ A
    lu, piv = linalg.lu_factor(system)
    pivots = np.abs(np.diag(lu))
    smallest = float(pivots.min())
    if smallest < SINGULAR_PIVOT * float(pivots.max()):
        raise SingularSystemError(f"1 - J^-1 K is singular (pivot {smallest:.3g})", pivot=smallest)
    v_left, v_right = border_vectors(grid, left, right)
    return float(v_left @ linalg.lu_solve((lu, piv), v_right))


def scalar_matrix(kernel: Callable[[np.ndarray, np.ndarray], np.ndarray], grid: QuadratureGrid) -> np.ndarray:
    sw = grid.sqrt_weights()
    return np.asarray(kernel(grid.nodes, grid.nodes), dtype=float) * np.outer(sw, sw)


def fredholm_det(kernel: Callable[[np.ndarray, np.ndarray], np.ndarray], grid: QuadratureGrid) -> float:
    """det(1 - K) for a scalar kernel on L^2(s, s+T)"""
    Kd = scalar_matrix(kernel, grid)
    sign, logdet = np.linalg.slogdet(np.eye(grid.size) - Kd)
    return float(sign * math.exp(logdet))


def bracket_det(
    kernel: Callable[[np.ndarray, np.ndarray], np.ndarray],
    left: np.ndarray,
    right: np.ndarray,
    grid: QuadratureGrid,
) -> Tuple[float, float]:
    """
    det(1-K) <left|(1-K)^{-1} right> as det(1-K) - det(1-K-|right><left|)

    Returns:
        (det(1-K), det(1-K) times the bracket)
    """
    Kd = scalar_matrix(kernel, grid)
    sw = grid.sqrt_weights()
    base_matrix = np.eye(grid.size) - Kd
    base = float(np.linalg.det(base_matrix))
    augmented = float(np.linalg.det(base_matrix - np.outer(sw * right, sw * left)))
    return base, base - augmented


def dump_matrix(kern: BlockKernel, grid: QuadratureGrid, path: str) -> np.ndarray:
    """Writes the discretized operator J - K to a binary file and returns it"""
    M = j_matrix(grid.size) - assemble(kern, grid)
    write_matrix(path, M)
    return M
