"""
The escape-rate spectrum alpha -> delta_alpha of a branch model.

delta_alpha is computed three independent ways: as the root in s of the fibre-induced pressure of (s phi, psi -
alpha); as the solution (delta, q) of P(s phi + q (psi - alpha)) = 0 with vanishing Gibbs drift, by two-dimensional
Newton; and as the infimum over r of the implicit surface s(r, -alpha r) defined by P(s phi + q psi + a) = 0.
"""

import collections
import concurrent.futures
import logging
import math

import numpy as np

from pressurelab.config import get_settings
from pressurelab.enums import Orientation
from pressurelab.exceptions import NumericalError, PressureLabError, RangeError, SingularJacobianError
from pressurelab.fibre import fibre_pressure
from pressurelab.pressure import bowen_delta, equilibrium, gibbs_covariance, gibbs_expectation, measure_entropy
from pressurelab.solvers import expand_bracket, golden_then_newton, safeguarded_newton
from pressurelab.symbolic import BranchModel

__author__ = 'pressurelab developers'
__all__ = [
    'SpectrumPoint',
    'SpectrumCurve',
    'GapReport',
    'delta_alpha_root',
    'delta_alpha_newton',
    'delta_alpha_legendre',
    'legendre_surface',
    'contour_level',
    'spectrum_sweep',
    'default_grid',
    'drift_and_gap',
    'spectrum_slope',
    'gibbs_dimension',
    'closed_form_oracle',
    'recurrent_dimension',
    'escape_dimension',
    'alpha_max',
]


_LOGGER = logging.getLogger(__name__)

# Residual bound of the two-dimensional Newton solve.
NEWTON_RESIDUAL = 1e-11

# Largest half width tried when bracketing a root of the implicit surface.
SURFACE_BRACKET_CAP = 1e6

# Relative margin of the default grid from the endpoints of the step range.
GRID_MARGIN = 1e-3

DEFAULT_GRID_POINTS = 201

# Dimension gaps and drifts below this are treated as zero.
GAP_TOLERANCE = 1e-10

# Offset beyond the Bowen root that closes the bracket of delta_alpha.
ROOT_MARGIN = 1e-9


def _potentials(model, alpha):
    assert isinstance(model, BranchModel)
    return model.geometric_potential(), model.step_potential().shifted(alpha)


def _position(model, alpha):
    """Return 'outside', 'boundary' or 'interior' for alpha against the step range."""
    bounds = model.psi_bounds()
    tolerance = get_settings().boundary_tolerance
    if not bounds.contains(alpha, tolerance):
        return 'outside'
    if bounds.contains_interior(alpha, tolerance):
        return 'interior'
    return 'boundary'


def _require_interior(model, alpha, operation):
    if _position(model, alpha) != 'interior':
        raise RangeError("alpha = %r is not strictly inside the step range %r." % (alpha, tuple(model.psi_bounds())),
                         module='spectrum', operation=operation)


def delta_alpha_root(model, alpha):
    """
    Return delta_alpha, the root in s of the fibre-induced pressure of (s phi, psi - alpha). Values of alpha outside
    the step range give 0; the endpoints use the pressure restricted to the branches with step alpha.
    """
    if _position(model, alpha) == 'outside':
        return 0.0
    phi, psi_alpha = _potentials(model, alpha)

    def pressure_and_slope(s):
        result = fibre_pressure(s * phi, psi_alpha)
        return result.value, gibbs_expectation(result.measure, phi)

    # The fibre-induced pressure at the Bowen root is 0 at the spectrum maximum and negative elsewhere.
    upper = bowen_delta(model) + ROOT_MARGIN
    delta = safeguarded_newton(pressure_and_slope, 0.0, upper, operation='delta_alpha_root')
    _LOGGER.debug("delta_alpha_root(%r) = %r", alpha, delta)
    return delta


def _newton_residual(phi, psi_alpha, s, q):
    value, measure = equilibrium(s * phi + q * psi_alpha)
    return np.array([value.value, gibbs_expectation(measure, psi_alpha)]), measure


def _nested_solve(model, alpha):
    delta = delta_alpha_root(model, alpha)
    phi, psi_alpha = _potentials(model, alpha)
    q = fibre_pressure(delta * phi, psi_alpha).minimizer
    return delta, q


def delta_alpha_newton(model, alpha):
    """
    Return (delta_alpha, q_alpha) solving P(s phi + q psi_alpha) = 0 and mu(psi_alpha) = 0 by Newton's method with the
    analytic Jacobian [[mu(phi), mu(psi_alpha)], [Cov(psi_alpha, phi), Var(psi_alpha)]], started at (delta, 0) and
    damped by step halving. Falls back to nested one-dimensional solves when the Jacobian is singular or the
    iteration stalls.
    """
    _require_interior(model, alpha, 'delta_alpha_newton')
    phi, psi_alpha = _potentials(model, alpha)
    point = np.array([bowen_delta(model), 0.0])
    residual, measure = _newton_residual(phi, psi_alpha, *point)
    norm = np.abs(residual).max()

    for _ in range(get_settings().newton_max_iterations):
        if norm < NEWTON_RESIDUAL * 1e-2:
            break
        jacobian = np.array([
            [gibbs_expectation(measure, phi), gibbs_expectation(measure, psi_alpha)],
            [gibbs_covariance(measure, psi_alpha, phi), gibbs_covariance(measure, psi_alpha)],
        ])
        if abs(np.linalg.det(jacobian)) < 1e-14 * max(1.0, np.abs(jacobian).max() ** 2):
            break
        step = np.linalg.solve(jacobian, -residual)
        damping = 1.0
        while True:
            candidate = point + damping * step
            candidate_residual, candidate_measure = _newton_residual(phi, psi_alpha, *candidate)
            candidate_norm = np.abs(candidate_residual).max()
            if candidate_norm < norm or damping < 1e-3:
                break
            damping *= 0.5
        if candidate_norm >= norm:
            break
        point, residual, measure, norm = candidate, candidate_residual, candidate_measure, candidate_norm

    if norm < NEWTON_RESIDUAL:
        return float(point[0]), float(point[1])

    _LOGGER.info("delta_alpha_newton(%r): residual %r, falling back to nested solves", alpha, norm)
    try:
        return _nested_solve(model, alpha)
    except NumericalError as error:
        raise SingularJacobianError("Newton and nested solves both failed at alpha = %r: %s" % (alpha, error),
                                    module='spectrum', operation='delta_alpha_newton')


def legendre_surface(model, q, a=0.0):
    """Return s(q, a), the unique s with P(s phi + q psi) = -a."""
    phi = model.geometric_potential()
    psi = model.step_potential()

    def excess(s):
        value, measure = equilibrium(s * phi + q * psi)
        return value.value + a, gibbs_expectation(measure, phi)

    lower, upper = expand_bracket(lambda s: -excess(s)[0], start=1.0, cap=SURFACE_BRACKET_CAP,
                                  operation='legendre_surface')
    return safeguarded_newton(excess, lower, upper, operation='legendre_surface')


def contour_level(model, d, q):
    """Return the a with s(q, a) = d, that is -P(d phi + q psi)."""
    phi = model.geometric_potential()
    psi = model.step_potential()
    return -equilibrium(d * phi + q * psi)[0].value


def delta_alpha_legendre(model, alpha):
    """
    Return inf over r of s(r, -alpha r), minimised by golden-section search and polished by Newton steps using the
    implicit derivatives of the surface.
    """
    _require_interior(model, alpha, 'delta_alpha_legendre')
    phi, psi_alpha = _potentials(model, alpha)

    def along_ray(r):
        return legendre_surface(model, r, -alpha * r)

    def slope_and_curvature(r):
        s = along_ray(r)
        _, measure = equilibrium(s * phi + r * psi_alpha)
        g_s = gibbs_expectation(measure, phi)
        g_r = gibbs_expectation(measure, psi_alpha)
        slope = -g_r / g_s
        curvature = -(gibbs_covariance(measure, phi) * slope ** 2
                      + 2.0 * gibbs_covariance(measure, phi, psi_alpha) * slope
                      + gibbs_covariance(measure, psi_alpha)) / g_s
        return slope, curvature

    _, delta = golden_then_newton(along_ray, slope_and_curvature, operation='delta_alpha_legendre')
    return delta


class SpectrumPoint(collections.namedtuple('SpectrumPoint', [
        'alpha', 'delta', 'q', 'slope', 'delta_root', 'delta_newton', 'delta_legendre', 'discrepancy', 'error'])):
    """
    One point of the spectrum. Interior points carry all three method values; endpoints only the root value; points
    outside the step range are exactly 0. A point whose computation failed keeps the error record and NaN values.
    """

    __slots__ = ()

    @property
    def ok(self):
        """Whether the point was computed."""
        return self.error is None


def alpha_max(model):
    """The drift of the measure of maximal dimension, the maximiser of the spectrum."""
    phi = model.geometric_potential()
    _, measure = equilibrium(bowen_delta(model) * phi)
    return gibbs_expectation(measure, model.step_potential())


def _spectrum_point(model, alpha):
    position = _position(model, alpha)
    if position == 'outside':
        return SpectrumPoint(alpha, 0.0, None, 0.0, 0.0, None, None, 0.0, None)
    try:
        root = delta_alpha_root(model, alpha)
        if position == 'boundary':
            return SpectrumPoint(alpha, root, None, None, root, None, None, 0.0, None)
        newton, q = delta_alpha_newton(model, alpha)
        legendre = delta_alpha_legendre(model, alpha)
        phi, psi_alpha = _potentials(model, alpha)
        _, measure = equilibrium(newton * phi + q * psi_alpha)
        slope = q / gibbs_expectation(measure, phi)
        values = (root, newton, legendre)
        discrepancy = max(values) - min(values)
        return SpectrumPoint(alpha, root, q, slope, root, newton, legendre, discrepancy, None)
    except PressureLabError as error:
        _LOGGER.warning("Spectrum point alpha = %r failed: %s", alpha, error)
        return SpectrumPoint(alpha, math.nan, None, None, None, None, None, math.nan, error.to_record())


def default_grid(model, points=DEFAULT_GRID_POINTS):
    """Evenly spaced interior points a small margin away from the endpoints, plus both endpoints."""
    bounds = model.psi_bounds()
    margin = GRID_MARGIN * bounds.width
    interior = np.linspace(bounds.lower + margin, bounds.upper - margin, points)
    return [bounds.lower] + [float(alpha) for alpha in interior] + [bounds.upper]


class SpectrumCurve:
    """Spectrum points ordered by alpha, with the model they belong to and summary values."""

    def __init__(self, model, points, summary):
        self.model = model
        self.points = sorted(points, key=lambda point: point.alpha)
        self.summary = summary

    @property
    def alphas(self):
        """The grid."""
        return np.array([point.alpha for point in self.points])

    @property
    def deltas(self):
        """The spectrum values on the grid."""
        return np.array([point.delta for point in self.points])

    def argmax(self):
        """The grid point of largest delta_alpha."""
        return float(self.alphas[int(np.nanargmax(self.deltas))])

    def is_unimodal(self, tolerance=1e-9):
        """Whether the computed values rise to a single maximum and then fall, up to the tolerance."""
        values = self.deltas[np.isfinite(self.deltas)]
        if values.size < 3:
            return True
        peak = int(np.argmax(values))
        rising = np.diff(values[:peak + 1])
        falling = np.diff(values[peak:])
        return bool(np.all(rising > -tolerance) and np.all(falling < tolerance))

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return 'SpectrumCurve(%d points, summary=%r)' % (len(self.points), self.summary)


def spectrum_sweep(model, alphas=None, points=DEFAULT_GRID_POINTS):
    """
    Compute the spectrum on a grid, by default the interior grid of default_grid() with both endpoints. Points are
    independent and are evaluated on the configured number of threads; a failing point is recorded and the sweep
    continues.
    """
    alphas = default_grid(model, points) if alphas is None else [float(alpha) for alpha in alphas]
    threads = get_settings().threads
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(lambda alpha: _spectrum_point(model, alpha), alphas))
    else:
        results = [_spectrum_point(model, alpha) for alpha in alphas]

    report = drift_and_gap(model)
    summary = {
        'alpha_max': report.drift,
        'delta': report.delta,
        'delta0': report.delta0,
        'gap': report.gap,
        'failed_points': sum(1 for result in results if not result.ok),
    }
    curve = SpectrumCurve(model, results, summary)
    _LOGGER.debug("spectrum_sweep: %r", curve)
    return curve


class GapReport(collections.namedtuple('GapReport', ['delta', 'delta0', 'gap', 'drift', 'recurrent_dimension',
                                                     'transient_plus', 'transient_minus'])):
    """
    Dimensions of the recurrent and transient sets. The supersets T1, T2 and T3(r) of the transient sets share the
    dimensions of T.
    """

    __slots__ = ()

    @property
    def has_gap(self):
        """Whether delta exceeds delta0."""
        return self.gap > GAP_TOLERANCE

    def transient_dimensions(self):
        """Return the dimension of every transient set and superset by name."""
        dimensions = {}
        for prefix in ('T', 'T1', 'T2', 'T3'):
            dimensions[prefix + '+'] = self.transient_plus
            dimensions[prefix + '-'] = self.transient_minus
        return dimensions


def drift_and_gap(model):
    """
    Return the Bowen root delta, the recurrent dimension delta0, their gap, the drift of the Gibbs measure of
    delta phi and the transient set dimensions. A non-negative drift gives dim T- = delta0 and dim T+ = delta, a
    non-positive drift the mirror assignment.
    """
    delta = bowen_delta(model)
    delta0 = delta_alpha_root(model, 0.0)
    _, measure = equilibrium(delta * model.geometric_potential())
    drift = gibbs_expectation(measure, model.step_potential())
    gap = max(delta - delta0, 0.0)
    if abs(drift) <= GAP_TOLERANCE:
        plus = minus = delta
    elif drift > 0.0:
        plus, minus = delta, delta0
    else:
        plus, minus = delta0, delta
    return GapReport(delta, delta0, gap, drift, delta0, plus, minus)


def spectrum_slope(model, alpha):
    """Return d delta_alpha / d alpha = q_alpha / mu(phi) under the Gibbs measure of delta_alpha phi + q_alpha psi."""
    delta, q = delta_alpha_newton(model, alpha)
    phi, psi_alpha = _potentials(model, alpha)
    _, measure = equilibrium(delta * phi + q * psi_alpha)
    return q / gibbs_expectation(measure, phi)


def gibbs_dimension(model, alpha):
    """Return the entropy over the Lyapunov exponent of the Gibbs measure of delta_alpha phi + q_alpha psi_alpha."""
    delta, q = delta_alpha_newton(model, alpha)
    phi, psi_alpha = _potentials(model, alpha)
    _, measure = equilibrium(delta * phi + q * psi_alpha)
    return measure_entropy(measure) / -gibbs_expectation(measure, phi)


def closed_form_oracle(family, params, alpha, orientation=Orientation.PRINTED):
    """Evaluate the published closed-form spectrum of a registered example family."""
    from pressurelab.families import get_family
    return get_family(family).delta(alpha, params, orientation)


def recurrent_dimension(model):
    """The Hausdorff dimension of the recurrent and uniformly recurrent sets."""
    return delta_alpha_root(model, 0.0)


def escape_dimension(model, alpha):
    """The Hausdorff dimension of the alpha-escaping and uniformly alpha-escaping sets."""
    return delta_alpha_root(model, alpha)
