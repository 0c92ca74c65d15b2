import math
from typing import Dict, Any, Type, TypeVar
from pydantic import BaseModel, ValidationError as PydanticValidationError

from models.params import FiniteParams, AsympParams, GeoParams, ModelParams, WeightMode
from utils.exceptions import ParameterDomainError

ModelT = TypeVar("ModelT", bound=BaseModel)


class ParameterValidator:
    """Validates model parameters against the domains of the exact formulas"""

    HALF = 0.5
    MIN_SEPARATION = 1e-9
    MIN_SAMPLES = 1

    @classmethod
    def build(cls, model: Type[ModelT], **fields: Any) -> ModelT:
        """
        Constructs a parameter record, turning field errors into a domain error

        Args:
            model: Pydantic model class to build
            **fields: Field values

        Raises:
            ParameterDomainError: If any field constraint fails
        """
        try:
            return model(**fields)
        except PydanticValidationError as exc:
            errors = [
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
                for err in exc.errors()
            ]
            raise ParameterDomainError(f"Invalid {model.__name__}", errors=errors) from exc

    @classmethod
    def validate_finite(
        cls,
        p: FiniteParams,
        require_beta: bool = False,
        forbid_beta: bool = False,
        continuation: bool = False,
    ) -> None:
        """
        Validates finite-N parameters

        Args:
            p: Finite parameters
            require_beta: The two-parameter model is requested
            forbid_beta: The stationary model is requested
            continuation: Allow beta <= 0 with alpha + beta > 0

        Raises:
            ParameterDomainError: If validation fails
        """
        errors = []

        if p.n > p.N - 1:
            errors.append(f"n must satisfy 0 <= n <= N-1, got n={p.n}, N={p.N}")
        if abs(p.alpha) >= cls.HALF:
            errors.append(f"alpha must lie in (-1/2, 1/2), got {p.alpha}")

        if require_beta and p.beta is None:
            errors.append("beta is required for the two-parameter model")
        if forbid_beta and p.beta is not None:
            errors.append("beta must be absent for the stationary model")

        if p.beta is not None:
            if p.alpha + p.beta <= 0:
                errors.append(f"alpha + beta must be positive, got {p.alpha + p.beta}")
            if p.beta <= 0 and not continuation:
                errors.append(f"beta must lie in (0, 1/2), got {p.beta}")
            if abs(p.alpha - p.beta) < cls.MIN_SEPARATION:
                errors.append("alpha and beta must differ")
            if abs(p.beta) < cls.MIN_SEPARATION:
                errors.append("beta must be nonzero")

        if errors:
            raise ParameterDomainError("Finite-N parameter validation failed", errors=errors)

    @classmethod
    def validate_asymp(cls, p: AsympParams) -> None:
        """Validates (delta, u, S) of the limiting family"""
        errors = []
        for name in ("delta", "u", "S"):
            if not math.isfinite(getattr(p, name)):
                errors.append(f"{name} must be finite")
        if p.u < 0:
            errors.append(f"u must be nonnegative, got {p.u}")
        if errors:
            raise ParameterDomainError("Asymptotic parameter validation failed", errors=errors)

    @classmethod
    def validate_geo(cls, p: GeoParams, for_kernel: bool = True) -> None:
        """
        Validates geometric-model parameters

        Args:
            p: Geometric parameters
            for_kernel: Also require a > 0, needed by the E(k, l) contour

        Raises:
            ParameterDomainError: If validation fails
        """
        errors = []
        if p.n > p.N - 1:
            errors.append(f"n must satisfy 0 <= n <= N-1, got n={p.n}, N={p.N}")
        if p.a * p.sqrt_q >= 1.0:
            errors.append(f"a*sqrt(q) must be < 1, got {p.a * p.sqrt_q}")
        if p.a * p.b >= 1.0:
            errors.append(f"a*b must be < 1, got {p.a * p.b}")
        if for_kernel and p.a <= 0.0:
            errors.append("a must be positive for the correlation kernel")
        if errors:
            raise ParameterDomainError("Geometric parameter validation failed", errors=errors)

    @classmethod
    def validate_model(cls, m: ModelParams) -> None:
        """Validates a simulation configuration for its weight mode"""
        errors = []
        if m.n > m.N - 1:
            errors.append(f"n must satisfy 0 <= n <= N-1, got n={m.n}, N={m.N}")

        if m.mode == WeightMode.STATIONARY:
            if abs(m.alpha) >= cls.HALF:
                errors.append(f"alpha must lie in (-1/2, 1/2), got {m.alpha}")
        elif m.mode == WeightMode.TWO_PARAM:
            if abs(m.alpha) >= cls.HALF:
                errors.append(f"alpha must lie in (-1/2, 1/2), got {m.alpha}")
            if m.beta is None:
                errors.append("beta is required for the two-parameter model")
            else:
                if m.beta <= -cls.HALF:
                    errors.append(f"beta must exceed -1/2, got {m.beta}")
                if m.alpha + m.beta <= 0:
                    errors.append(f"alpha + beta must be positive, got {m.alpha + m.beta}")
        elif m.mode == WeightMode.GEOMETRIC:
            if m.a is None or m.b is None or m.q is None:
                errors.append("a, b and q are required for the geometric model")
            else:
                try:
                    cls.validate_geo(m.geometric(), for_kernel=False)
                except ParameterDomainError as exc:
                    errors.extend(exc.errors)
                except PydanticValidationError as exc:
                    errors.extend(err["msg"] for err in exc.errors())

        if errors:
            raise ParameterDomainError(f"{m.mode.display_name} model validation failed", errors=errors)

    @classmethod
    def validate_br(cls, u: float, tau: float) -> None:
        """Validates the Baik-Rains path parameters, u > max(0, tau)"""
        errors = []
        if u <= max(0.0, tau):
            errors.append(f"u must exceed max(0, tau), got u={u}, tau={tau}")
        if errors:
            raise ParameterDomainError("Baik-Rains path validation failed", errors=errors)

    @classmethod
    def validate_sampling(cls, samples: int, chunk_size: int) -> None:
        errors = []
        if samples < cls.MIN_SAMPLES:
            errors.append(f"samples must be positive, got {samples}")
        if chunk_size < 1:
            errors.append(f"chunk size must be positive, got {chunk_size}")
        if errors:
            raise ParameterDomainError("Sampling validation failed", errors=errors)

    @classmethod
    def describe(cls, p: BaseModel) -> Dict[str, Any]:
        """Parameter record as a plain dict for output provenance"""
        data = p.model_dump()
        return {k: (v.code if isinstance(v, WeightMode) else v) for k, v in data.items()}
