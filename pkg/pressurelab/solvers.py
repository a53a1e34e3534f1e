"""
Scalar root finding and minimisation used by the pressure, fibre-pressure and spectrum modules.

All solvers keep a sign-change bracket and only accept a Newton step when it stays inside the bracket; otherwise
they bisect. Iteration counts and final residuals are logged at DEBUG level.
"""

import logging
import math

from scipy import optimize

from pressurelab.config import get_settings
from pressurelab.exceptions import ConvergenceError

__author__ = 'pressurelab developers'
__all__ = [
    'safeguarded_newton',
    'expand_bracket',
    'golden_then_newton',
]


_LOGGER = logging.getLogger(__name__)


def safeguarded_newton(func, lower, upper, *, tolerance=None, max_iterations=None, operation='safeguarded_newton'):
    """
    Find the root of a function inside a sign-change bracket.

    :param func: Callable returning (value, derivative) at a point.
    :param lower: Left end of the bracket.
    :param upper: Right end of the bracket; func must change sign on [lower, upper].
    :param tolerance: Absolute tolerance on the argument; the iteration also stops on an exact zero.
    :param max_iterations: Iteration budget before ConvergenceError.
    :param operation: The operation name reported in errors.
    :return: The root.
    """
    settings = get_settings()
    tolerance = settings.root_tolerance if tolerance is None else tolerance
    max_iterations = 4 * settings.newton_max_iterations if max_iterations is None else max_iterations

    f_lower, _ = func(lower)
    f_upper, _ = func(upper)
    if f_lower == 0.0:
        return lower
    if f_upper == 0.0:
        return upper
    if (f_lower > 0) == (f_upper > 0):
        raise ConvergenceError("No sign change on [%r, %r]." % (lower, upper),
                               module='solvers', operation=operation)

    # Orient so that func(low) < 0 < func(high).
    low, high = (lower, upper) if f_lower < 0 else (upper, lower)
    x = 0.5 * (lower + upper)
    value, slope = func(x)
    for iteration in range(max_iterations):
        if value == 0.0:
            break
        if value < 0:
            low = x
        else:
            high = x
        candidate = x - value / slope if slope != 0.0 and math.isfinite(slope) else math.nan
        if not (min(low, high) < candidate < max(low, high)):
            candidate = 0.5 * (low + high)
        step = abs(candidate - x)
        x = candidate
        value, slope = func(x)
        if step < tolerance or abs(high - low) < tolerance:
            break
    else:
        raise ConvergenceError("Root search did not converge in %d iterations." % max_iterations,
                               module='solvers', operation=operation)
    _LOGGER.debug("%s: root %r after %d iterations, residual %r", operation, x, iteration + 1, value)
    return x


def expand_bracket(sign_at, start=1.0, cap=math.inf, operation='expand_bracket'):
    """
    Double the symmetric interval [-start, start] until a function changes sign from negative to positive across it.

    :param sign_at: Callable returning a value whose sign is inspected; must be increasing.
    :param start: Initial half width.
    :param cap: Largest half width tried before ConvergenceError.
    :return: (lower, upper) with sign_at(lower) <= 0 <= sign_at(upper).
    """
    half = start
    while True:
        half_capped = min(half, cap)
        lower, upper = -half_capped, half_capped
        if sign_at(lower) <= 0 <= sign_at(upper):
            return lower, upper
        if half_capped >= cap:
            raise ConvergenceError("No sign change within |s| <= %r." % cap, module='solvers', operation=operation)
        half *= 2.0


def golden_then_newton(objective, slope_and_curvature, start=(-1.0, 1.0), *, tolerance=None,
                       operation='golden_then_newton'):
    """
    Minimise a smooth strictly convex function of one variable: golden-section search to locate the basin, then
    Newton steps on the derivative to polish.

    :param objective: Callable returning the function value.
    :param slope_and_curvature: Callable returning (first derivative, second derivative).
    :param start: Two points used to seed the downhill bracket search.
    :return: (argmin, minimum).
    """
    settings = get_settings()
    tolerance = settings.root_tolerance if tolerance is None else tolerance

    result = optimize.minimize_scalar(objective, bracket=start, method='golden', tol=1e-8)
    x = float(result.x)
    for _ in range(settings.newton_max_iterations):
        slope, curvature = slope_and_curvature(x)
        if curvature <= 0.0 or not math.isfinite(curvature):
            break
        step = slope / curvature
        x -= step
        if abs(step) < tolerance:
            break
    value = objective(x)
    if not math.isfinite(value):
        raise ConvergenceError("Minimisation produced a non-finite value.", module='solvers', operation=operation)
    _LOGGER.debug("%s: minimum %r at %r", operation, value, x)
    return x, value
