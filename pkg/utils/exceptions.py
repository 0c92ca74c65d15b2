class LppError(Exception):
    """Base exception for lpp-lab numerics and simulation errors"""
    pass


class ParameterDomainError(LppError):
    """Raised when model or numerical parameters leave their admissible domain"""
    def __init__(self, message: str, errors: list = None):
        super().__init__(message)
        self.errors = errors or []


class InfeasiblePoleSpecError(LppError):
    """Raised when no circle can separate enclosed from excluded poles"""
    def __init__(self, message: str, enclosed: list = None, excluded: list = None):
        super().__init__(message)
        self.enclosed = enclosed or []
        self.excluded = excluded or []


class ContourCollisionError(LppError):
    """Raised when two contours of a 1/(z-w) double integral come too close"""
    def __init__(self, message: str, min_distance: float = None):
        super().__init__(message)
        self.min_distance = min_distance


class NonFiniteIntegrandError(LppError):
    """Raised when an integrand evaluates to NaN or infinity on a node"""
    def __init__(self, message: str, where: str = None):
        super().__init__(message)
        self.where = where


class NoConvergenceError(LppError):
    """Raised when node refinement hits its cap above tolerance"""
    def __init__(self, message: str, achieved_tol: float = None):
        super().__init__(message)
        self.achieved_tol = achieved_tol


class AntisymmetryError(LppError):
    """Raised when a matrix handed to a Pfaffian routine is not antisymmetric"""
    def __init__(self, message: str, defect: float = None):
        super().__init__(message)
        self.defect = defect


class SingularSystemError(LppError):
    """Raised when the discretized 1 - J^{-1}K system is numerically singular"""
    def __init__(self, message: str, pivot: float = None):
        super().__init__(message)
        self.pivot = pivot


class VerificationError(LppError):
    """Raised when a verification suite has failing checks"""
    def __init__(self, message: str, failed_checks: list = None):
        super().__init__(message)
        self.failed_checks = failed_checks or []


class CurveInvariantError(LppError):
    """Raised when an evaluated distribution curve is not a CDF within its error bars"""
    def __init__(self, message: str, violations: list = None):
        super().__init__(message)
        self.violations = violations or []
