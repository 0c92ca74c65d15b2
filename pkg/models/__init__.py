from .params import (
    WeightMode, FiniteParams, AsympParams, GeoParams, ModelParams,
    ContourSettings, GridSettings, RunConfig,
)
from .results import (
    CurvePoint, DistributionCurve, PfaffianResult, McSummary, CheckResult, VerificationReport,
    IncrementReport, RunResult,
)

__all__ = [
    'WeightMode', 'FiniteParams', 'AsympParams', 'GeoParams', 'ModelParams',
    'ContourSettings', 'GridSettings', 'RunConfig',
    'CurvePoint', 'DistributionCurve', 'PfaffianResult', 'McSummary', 'CheckResult',
    'VerificationReport', 'IncrementReport', 'RunResult',
]
