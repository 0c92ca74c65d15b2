from .validators import ParameterValidator
from .exceptions import (
    LppError, ParameterDomainError, InfeasiblePoleSpecError, ContourCollisionError,
    NonFiniteIntegrandError, NoConvergenceError, AntisymmetryError, SingularSystemError,
    VerificationError, CurveInvariantError,
)
from .settings import NumericsSettings, DEFAULT_SETTINGS, resolve_threads

__all__ = [
    'ParameterValidator', 'LppError', 'ParameterDomainError', 'InfeasiblePoleSpecError',
    'ContourCollisionError', 'NonFiniteIntegrandError', 'NoConvergenceError',
    'AntisymmetryError', 'SingularSystemError', 'VerificationError', 'CurveInvariantError',
    'NumericsSettings', 'DEFAULT_SETTINGS', 'resolve_threads',
]
