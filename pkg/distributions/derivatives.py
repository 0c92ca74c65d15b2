"""
Outer s-derivatives of the G functions

The distribution formulas are derivatives of smooth functions G(s) that we can
only evaluate, so the derivative is taken by 5-point central differences and
one Richardson step on the halved step.
"""
import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

logger = logging.getLogger(__name__)

STENCIL = (-2.0, -1.0, 1.0, 2.0)
STENCIL_WEIGHTS = (1.0, -8.0, 8.0, -1.0)
# 5-point stencil error is O(h^4)
RICHARDSON_FACTOR = 2.0 ** 4 - 1.0


@dataclass(frozen=True)
class Derivative:
    value: float
    err: float
    step: float
    unstable: bool = False


class CachedFunction:
    """Memoizes G on the points it is evaluated at; stencils of nearby s share nodes"""

    def __init__(self, func: Callable[[float], float], digits: int = 12):
        self.func = func
        self.digits = digits
        self.cache: Dict[float, float] = {}
        self.calls = 0

    def __call__(self, s: float) -> float:
        key = round(s, self.digits)
        if key not in self.cache:
            self.cache[key] = float(self.func(s))
            self.calls += 1
        return self.cache[key]


def five_point(func: Callable[[float], float], s: float, h: float) -> float:
    """(G(s-2h) - 8G(s-h) + 8G(s+h) - G(s+2h)) / 12h"""
    total = sum(w * func(s + k * h) for k, w in zip(STENCIL, STENCIL_WEIGHTS))
    return total / (12.0 * h)


def derivative(
    func: Callable[[float], float],
    s: float,
    h: float,
    richardson: bool = True,
    budget: float = 1e-4,
    where: Optional[str] = None,
) -> Derivative:
    """
    G'(s) with an error estimate

    Args:
        func: The function G
        s: Evaluation point
        h: Base step
        richardson: Combine steps h and h/2
        budget: Disagreement above which the result is flagged unstable
        where: Label used in log messages

    Returns:
        Derivative with value, error estimate, step and instability flag
    """
    if not h > 0:
        raise ValueError(f"derivative step must be positive, got {h}")
    coarse = five_point(func, s, h)
    if not richardson:
        return Derivative(value=coarse, err=0.0, step=h)

    fine = five_point(func, s, 0.5 * h)
    correction = (fine - coarse) / RICHARDSON_FACTOR
    value = fine + correction
    err = abs(correction)
    unstable = not math.isfinite(value) or err > budget
    if unstable:
        logger.warning(f"{where or 'derivative'} at s={s:.6g}: Richardson estimates differ by {err:.3g} "
                       f"(budget {budget:.3g})")
    else:
        logger.debug(f"{where or 'derivative'} at s={s:.6g}: h={h:.4g}, correction {err:.3g}")
    return Derivative(value=value, err=err, step=h, unstable=unstable)
