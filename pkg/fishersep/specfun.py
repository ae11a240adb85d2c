"""Principal branch of the Lambert W function."""

import logging
import math

from fishersep.errors import DomainError, NumericalError
from fishersep.models import LambertResult

logger = logging.getLogger(__name__)

BRANCH_POINT = -math.exp(-1.0)
TOLERANCE = 1e-12
MAX_ITERATIONS = 50

# above this the iteration runs on log(w) + w = log(x), which cannot overflow
_LOG_FORM_ABOVE = math.e


def _initial_guess(x: float) -> float:
    if x >= 0.0:
        return math.log1p(x)
    if x < -0.25:
        # series around the branch point
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    return x


def _halley_direct(x: float, w: float) -> tuple[float, int]:
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if w <= -1.0:
            w = -1.0 + 1e-12
        if abs(step) <= 4.0 * math.ulp(1.0 + abs(w)):
            break
    return w, iterations


def _halley_log(x: float, w: float) -> tuple[float, int]:
    log_x = math.log(x)
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        g = w + math.log(w) - log_x
        g1 = 1.0 + 1.0 / w
        g2 = -1.0 / (w * w)
        step = 2.0 * g * g1 / (2.0 * g1 * g1 - g * g2)
        w -= step
        if abs(step) <= 4.0 * math.ulp(w):
            break
    return w, iterations


def _residual(w: float, x: float) -> float:
    if x > _LOG_FORM_ABOVE:
        return abs(x) * abs(math.expm1(w + math.log(w) - math.log(x)))
    return abs(w * math.exp(w) - x)


def lambert_w0(x: float) -> LambertResult:
    """Solve w·e^w = x for w >= -1 with Halley's method."""
    x = float(x)
    if math.isnan(x) or x < BRANCH_POINT:
        raise DomainError(f"Lambert W0 is undefined for x={x!r} < -1/e")
    if x == 0.0:
        return LambertResult(w=0.0, iterations=0, residual=0.0)
    if x == BRANCH_POINT:
        return LambertResult(w=-1.0, iterations=0, residual=_residual(-1.0, x))
    if math.isinf(x):
        raise DomainError("Lambert W0 of infinity")

    guess = _initial_guess(x)
    if x > _LOG_FORM_ABOVE:
        w, iterations = _halley_log(x, guess)
    else:
        w, iterations = _halley_direct(x, guess)

    residual = _residual(w, x)
    if residual > TOLERANCE * max(1.0, abs(x)):
        raise NumericalError(
            "Lambert W0 did not converge", {"x": x, "w": w, "iterations": iterations, "residual": residual}
        )
    logger.debug("W0(%g) = %.17g after %d iterations", x, w, iterations)
    return LambertResult(w=w, iterations=iterations, residual=residual)
