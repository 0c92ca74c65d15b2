import math
from enum import Enum
from typing import Optional, List, Dict, Any
from pydantic import BaseModel, Field


class WeightMode(Enum):
    STATIONARY = ("Stationary", "stationary")
    TWO_PARAM = ("Two-parameter", "two_param")
    GEOMETRIC = ("Geometric", "geometric")

    def __init__(self, display_name: str, code: str):
        self.display_name = display_name
        self.code = code

    @classmethod
    def from_code(cls, code: str) -> "WeightMode":
        for mode in cls:
            if mode.code == code or mode.name.lower() == code.lower():
                return mode
        raise ValueError(f"Unknown weight mode: {code}")


class FiniteParams(BaseModel):
    N: int = Field(ge=1, description="Lattice size")
    n: int = Field(default=0, ge=0, description="Offset of the endpoint (N, N-n)")
    alpha: float = Field(gt=-0.5, lt=0.5, description="Boundary rate parameter")
    beta: Optional[float] = Field(
        default=None, gt=-0.5, lt=0.5,
        description="Corner rate parameter of the two-parameter model"
    )

    @property
    def two_param(self) -> bool:
        return self.beta is not None

    def stationary(self) -> "FiniteParams":
        return self.model_copy(update={"beta": None})

    def with_beta(self, beta: float) -> "FiniteParams":
        return self.model_copy(update={"beta": beta})

    def mean(self) -> float:
        """
        Mean of the stationary LPP time L_{N,N-n}

        N - 1 first-row steps of mean 1/(1/2 - alpha), then N - n - 1 vertical
        increments of mean 1/(1/2 + alpha); the corner weight is zero.
        """
        return (self.N - 1) / (0.5 - self.alpha) + (self.N - self.n - 1) / (0.5 + self.alpha)


class AsympParams(BaseModel):
    delta: float = Field(description="Boundary strength in the critical scaling")
    u: float = Field(ge=0.0, description="Distance from the diagonal in the critical scaling")
    S: float = Field(default=0.0, description="Rescaled LPP value")

    def mean(self) -> float:
        """Mean of the limiting law"""
        return self.delta * (2.0 * self.u + self.delta)

    def shifted(self, S: float) -> float:
        """Shift S -> S + delta(2u + delta) used to compare centred laws"""
        return S + self.mean()

    def scaled_finite(self, N: int, S: Optional[float] = None) -> "tuple[FiniteParams, float]":
        """
        Map (delta, u, S) to the finite-N parameters (alpha, n, s)

        Args:
            N: Lattice size
            S: Rescaled value, defaults to self.S

        Returns:
            Finite parameters and the unscaled threshold s
        """
        S = self.S if S is None else S
        alpha = self.delta * 2.0 ** (-4.0 / 3.0) * N ** (-1.0 / 3.0)
        n = int(round(self.u * 2.0 ** (5.0 / 3.0) * N ** (2.0 / 3.0)))
        n = min(n, N - 1)
        s = 4.0 * N - 4.0 * self.u * (2.0 * N) ** (2.0 / 3.0) + S * 2.0 ** (4.0 / 3.0) * N ** (1.0 / 3.0)
        return FiniteParams(N=N, n=n, alpha=alpha), s


class GeoParams(BaseModel):
    a: float = Field(ge=0.0, description="Diagonal parameter")
    b: float = Field(gt=0.0, lt=1.0, description="First-row parameter x_1")
    q: float = Field(gt=0.0, lt=1.0, description="Bulk parameter, x_i = sqrt(q) for i >= 2")
    N: int = Field(ge=1, description="Lattice size")
    n: int = Field(default=0, ge=0, description="Offset of the endpoint (N, N-n)")

    @property
    def sqrt_q(self) -> float:
        return math.sqrt(self.q)

    def x_params(self) -> List[float]:
        return [self.b] + [self.sqrt_q] * (self.N - 1)

    def distinct(self, tol: float = 1e-9) -> bool:
        """True when a, b and sqrt(q) are pairwise distinct"""
        pts = [self.a, self.b, self.sqrt_q]
        return all(abs(pts[i] - pts[j]) > tol for i in range(3) for j in range(i + 1, 3))

    @classmethod
    def exponential_limit(cls, alpha: float, beta: float, eps: float, N: int, n: int = 0) -> "GeoParams":
        """Geometric parameters whose eps -> 0 limit is the two-parameter exponential model"""
        return cls(a=1.0 - eps * alpha, b=1.0 - eps * beta, q=1.0 - eps, N=N, n=n)


class ModelParams(BaseModel):
    mode: WeightMode = Field(description="Weight distribution of the half-space lattice")
    N: int = Field(ge=1)
    n: int = Field(default=0, ge=0)
    alpha: float = Field(default=0.0, description="Boundary rate parameter")
    beta: Optional[float] = Field(default=None, description="Corner rate parameter")
    a: Optional[float] = Field(default=None, description="Geometric diagonal parameter")
    b: Optional[float] = Field(default=None, description="Geometric first-row parameter")
    q: Optional[float] = Field(default=None, description="Geometric bulk parameter")

    def finite(self) -> FiniteParams:
        beta = self.beta if self.mode == WeightMode.TWO_PARAM else None
        return FiniteParams(N=self.N, n=self.n, alpha=self.alpha, beta=beta)

    def geometric(self) -> GeoParams:
        return GeoParams(a=self.a, b=self.b, q=self.q, N=self.N, n=self.n)


class ContourSettings(BaseModel):
    nodes: int = Field(default=128, ge=8, description="Minimum nodes per circle")
    max_nodes: int = Field(default=4096, ge=8, description="Cap on the nodes of one circle")
    digits: float = Field(default=16.0, gt=0.0, description="Target accuracy of the circle quadrature in digits")
    pole_order: int = Field(default=1, ge=1, description="Largest pole order of the integrands at the special points")
    x_span: float = Field(default=0.0, ge=0.0, description="Largest |x| of an e^{-xz} factor on the circles")
    airy_nodes: int = Field(default=128, ge=8, description="Minimum Gauss-Legendre nodes per Airy ray")
    vertical_nodes: int = Field(default=96, ge=8, description="Nodes per vertical half-line")
    ray_length: float = Field(default=12.0, gt=0.0, description="Truncation length of Airy rays")
    fill: float = Field(
        default=0.5, gt=0.0, lt=1.0,
        description="Fraction of the gap to an excluded pole a circle may extend over"
    )
    partner_fill: float = Field(
        default=1.0 / 3.0, gt=0.0, lt=1.0,
        description="Fraction of the gap to a partner contour a circle may extend over"
    )
    reach: float = Field(
        default=0.5, gt=0.0,
        description="Extension on a free side, as a fraction of the pole spread"
    )

    @classmethod
    def for_large_n(cls) -> "ContourSettings":
        """Circles pushed towards the saddle point at the origin"""
        return cls(nodes=512, fill=0.9, partner_fill=0.5)

    def sized_for(self, pole_order: int, x_span: float = 0.0) -> "ContourSettings":
        """Copy whose circles resolve poles up to pole_order and e^{-xz} for |x| <= x_span"""
        return self.model_copy(update={
            "pole_order": max(self.pole_order, int(pole_order)),
            "x_span": max(self.x_span, float(x_span)),
        })


class GridSettings(BaseModel):
    nodes: Optional[int] = Field(default=None, ge=4, description="Gauss-Legendre nodes on (s, s+T)")
    cutoff: Optional[float] = Field(default=None, gt=0.0, description="Truncation length T")
    deriv_step: Optional[float] = Field(default=None, gt=0.0, description="Step of the outer s-derivative")
    richardson: bool = Field(default=True, description="Richardson-extrapolate the s-derivative")


class RunConfig(BaseModel):
    command: str
    params: Dict[str, Any] = Field(default_factory=dict)
    s_values: List[float] = Field(default_factory=list)
    contour: ContourSettings = Field(default_factory=ContourSettings)
    grid: GridSettings = Field(default_factory=GridSettings)
    samples: int = Field(default=100000, ge=1)
    seed: int = Field(default=0, ge=0)
    threads: Optional[int] = Field(default=None, ge=1)
    suite: Optional[str] = None
    out: Optional[str] = None
    fmt: str = Field(default="json", pattern="^(json|csv)$")
