from typing import Optional, List, Dict, Any
from datetime import datetime
from pydantic import BaseModel, Field


class CurvePoint(BaseModel):
    s: float
    F: float
    err: float = Field(default=0.0, ge=0.0)


class DistributionCurve(BaseModel):
    params: Dict[str, Any] = Field(default_factory=dict, description="Model or scaling parameters")
    method: Dict[str, Any] = Field(default_factory=dict, description="Grid, contour and derivative provenance")
    points: List[CurvePoint] = Field(default_factory=list)

    @property
    def s_values(self) -> List[float]:
        return [p.s for p in self.points]

    @property
    def F_values(self) -> List[float]:
        return [p.F for p in self.points]

    @property
    def err(self) -> List[float]:
        return [p.err for p in self.points]

    def cdf_violations(self, slack: float = 0.0) -> List[str]:
        """List every place where the curve fails to be a CDF up to its error bars"""
        problems = []
        for p in self.points:
            tol = p.err + slack
            if p.F < -tol or p.F > 1.0 + tol:
                problems.append(f"F({p.s:g}) = {p.F:.6g} outside [0, 1]")
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.s < prev.s:
                problems.append(f"s-grid not sorted at {cur.s:g}")
            elif cur.F < prev.F - 2.0 * (prev.err + cur.err) - slack:
                problems.append(f"F decreases between s={prev.s:g} and s={cur.s:g}")
        return problems


class PfaffianResult(BaseModel):
    value: float
    log_scale: float = Field(description="log|value|, -inf for a zero Pfaffian")
    sign: float = Field(description="Sign of the Pfaffian, 0 for a zero Pfaffian")
    pivot_growth: float = Field(default=1.0, description="Largest entry during elimination over the initial largest")


class McSummary(BaseModel):
    mode: str
    target: str = Field(default="L")
    samples: int
    mean: float
    variance: float
    grid: List[float] = Field(default_factory=list, description="Evaluation points of the empirical CDF")
    empirical_cdf: List[float] = Field(default_factory=list)
    dkw_band: float = Field(default=0.0, description="Dvoretzky-Kiefer-Wolfowitz half-width at 99.7%")
    ks_stats: Dict[str, float] = Field(default_factory=dict)
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None


class CheckResult(BaseModel):
    check: str
    status: str = Field(pattern="^(pass|fail|skip)$")
    value: Optional[float] = None
    tolerance: Optional[float] = None
    details: Optional[str] = None


class VerificationReport(BaseModel):
    suite: str
    checks: List[CheckResult] = Field(default_factory=list)
    created_at: datetime = Field(default_factory=datetime.now)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failed_checks(self) -> List[str]:
        return [c.check for c in self.checks if c.status == "fail"]


class IncrementReport(BaseModel):
    """Marginal and independence screens for LPP increments"""
    sites: List[str] = Field(default_factory=list, description="Increment labels in path order")
    samples: int
    ks_pvalues: Dict[str, float] = Field(default_factory=dict)
    correlations: Dict[str, float] = Field(default_factory=dict)
    chi2_pvalues: Dict[str, float] = Field(default_factory=dict)
    significance: float = 1e-3
    corr_bound: float = Field(description="Largest admissible |correlation|")

    @property
    def passed(self) -> bool:
        return (
            all(p > self.significance for p in self.ks_pvalues.values())
            and all(p > self.significance for p in self.chi2_pvalues.values())
            and all(abs(c) < self.corr_bound for c in self.correlations.values())
        )


class RunResult(BaseModel):
    command: str
    status: str = Field(pattern="^(completed|failed)$")
    output: Any = Field(default=None, description="Curve, summary, report or table produced by the run")
    config: Dict[str, Any] = Field(default_factory=dict, description="Effective configuration of the run")
    errors: List[str] = Field(default_factory=list)
    processed_at: datetime = Field(default_factory=datetime.now)
