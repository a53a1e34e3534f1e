"""
Cross-method consistency checks run by the verify subcommand.

Every check compares two independent computations of the same quantity (a closed form against a numerical solve,
a spectral value against a dynamic programme, an analytic derivative against a finite difference, a simulation
against an exact law) and reports the largest discrepancy it saw.
"""

import collections
import logging
import math
import time

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from pressurelab.config import overridden
from pressurelab.enums import Orientation
from pressurelab.escape import conjugacy_check, exact_level_distribution, sample_orbits
from pressurelab.exceptions import PressureLabError, RangeError
from pressurelab.families import get_family
from pressurelab.fibre import corridor_partition, fibre_pressure, fibre_pressure_estimate, symmetry_on_average_ratio
from pressurelab.pressure import classical_pressure, gibbs_expectation, gibbs_measure
from pressurelab.spectrum import (alpha_max, delta_alpha_newton, delta_alpha_root, drift_and_gap, spectrum_slope,
                                  spectrum_sweep)
from pressurelab.symbolic import CylinderPotential

__author__ = 'pressurelab developers'
__all__ = [
    'CheckResult',
    'CHECKS',
    'run_verification',
]


_LOGGER = logging.getLogger(__name__)

SEED = 20240917


class CheckResult(collections.namedtuple('CheckResult', ['name', 'passed', 'worst', 'bound', 'detail', 'seconds'])):
    """The outcome of one check: the worst discrepancy seen against the bound it had to stay under."""

    __slots__ = ()

    def to_record(self):
        """Return a JSON-ready dictionary."""
        return dict(self._asdict())


def _walk_model(c1, c2):
    return get_family('random-walk').build_model((c1, c2), Orientation.MIRRORED)


def _random_walk_models(count):
    generator = np.random.default_rng(SEED)
    models = []
    while len(models) < count:
        c1 = float(generator.uniform(0.05, 0.9))
        c2 = float(generator.uniform(0.05, 1.0 - c1))
        models.append((c1, c2))
    return models


def check_random_walk_fibre_pressure(quick):
    """Fibre-induced pressure of t phi for the random walk against log 2 + t (log c1 + log c2) / 2."""
    family = get_family('random-walk')
    worst = 0.0
    for params in ((0.5, 0.5), (0.4, 0.6), (0.3, 0.7)):
        model = _walk_model(*params)
        for t in (0.0, 0.5, 1.0, 2.0):
            value = fibre_pressure(t * model.geometric_potential(), model.step_potential()).value
            worst = max(worst, abs(value - family.fibre_pressure(t, params)))
    return worst, 1e-9, {}


def check_recurrent_dimension(quick):
    """delta_0 of random two-branch walks against log 4 / (log(1/c1) + log(1/c2))."""
    family = get_family('random-walk')
    worst = 0.0
    for params in _random_walk_models(5 if quick else 20):
        worst = max(worst, abs(delta_alpha_root(_walk_model(*params), 0.0) - family.delta0(params)))
    return worst, 1e-8, {}


def check_gap_criterion(quick):
    """A dimension gap appears exactly when the drift is non-zero; the symmetric walk has no gap."""
    mismatches = []
    for params in _random_walk_models(5 if quick else 20):
        report = drift_and_gap(_walk_model(*params))
        if (report.gap > 1e-10) != (abs(report.drift) > 1e-10):
            mismatches.append(params)
    symmetric_gap = drift_and_gap(_walk_model(0.5, 0.5)).gap
    worst = symmetric_gap if not mismatches else math.inf
    return worst, 1e-12, {'mismatches': mismatches}


_SPECTRUM_CASES = (
    ('random-walk', (0.5, 0.5)),
    ('random-walk', (0.3, 0.7)),
    ('asymmetric-step', (0.5, 0, 1)),
    ('multi-branch', (1.0 / 3.0, 1, 2)),
)


def _spectrum_case(family_name, params, points):
    family = get_family(family_name)
    model = family.build_model(params, family.shorthand_orientation)
    peak = alpha_max(model)
    delta = drift_and_gap(model).delta
    orientation = min(Orientation.iter(), key=lambda o: abs(family.delta(peak, params, o) - delta))
    bounds = model.psi_bounds()
    margin = 1e-3 * bounds.width
    curve = spectrum_sweep(model, np.linspace(bounds.lower + margin, bounds.upper - margin, points))
    return family, model, orientation, curve


def check_spectrum_closed_forms(quick):
    """Swept spectra of the example families against their published formulas, plus the Cantor endpoint."""
    worst = 0.0
    failed = 0
    for family_name, params in _SPECTRUM_CASES:
        family, _, orientation, curve = _spectrum_case(family_name, params, 11 if quick else 41)
        for point in curve:
            if not point.ok:
                failed += 1
                continue
            worst = max(worst, abs(point.delta - family.delta(point.alpha, params, orientation)))
    cantor = get_family('multi-branch').build_model((1.0 / 3.0, 1, 2))
    endpoint_error = abs(delta_alpha_root(cantor, 1.0) - math.log(2.0) / math.log(3.0))
    if failed:
        worst = math.inf
    return worst, 1e-7, {'endpoint_error': endpoint_error, 'endpoint_ok': endpoint_error <= 1e-9,
                         'failed_points': failed}


def check_three_methods(quick):
    """Root, Newton and Legendre values of delta_alpha agree."""
    worst = 0.0
    for family_name, params in _SPECTRUM_CASES:
        _, _, _, curve = _spectrum_case(family_name, params, 11 if quick else 41)
        for point in curve:
            worst = max(worst, point.discrepancy if point.ok else math.inf)
    return worst, 1e-6, {}


def check_direct_series(quick):
    """(1/n) log zeta_n(delta_alpha phi, psi_alpha, 2) is within the finite-horizon bound of 0."""
    horizon = 1000 if quick else 4000
    model = _walk_model(0.4, 0.6)
    bound = 0.7 * math.log(horizon) / horizon + 1e-3
    worst = 0.0
    for alpha in (0.0, alpha_max(model)):
        delta = delta_alpha_root(model, alpha)
        table = corridor_partition(delta * model.geometric_potential(), model.step_potential(), alpha, 2.0, horizon)
        worst = max(worst, abs(table.log_zeta[-1] / horizon))
    return worst, bound, {'horizon': horizon}


def check_slope_identity(quick):
    """The analytic spectrum slope against central differences with h = 1e-4."""
    step = 1e-4
    worst = 0.0
    for params in ((0.5, 0.5), (0.3, 0.7)):
        model = _walk_model(*params)
        for alpha in np.linspace(-0.8, 0.8, 4 if quick else 10):
            difference = (delta_alpha_newton(model, alpha + step)[0]
                          - delta_alpha_newton(model, alpha - step)[0]) / (2.0 * step)
            worst = max(worst, abs(spectrum_slope(model, alpha) - difference))
    return worst, 1e-5, {}


def _central_difference(f, g, step):
    return (classical_pressure(f + step * g).value - classical_pressure(f - step * g).value) / (2.0 * step)


def check_pressure_properties(quick):
    """
    Convexity of t -> P(f + t g), and its derivative against the Gibbs expectation, depths 1 and 2. Central
    differences at h = 1e-3 and 1e-4 must close in at the O(h^2) rate (errors shrinking about 100 times), and their
    Richardson combination must match the expectation. The spectral solves run at a tolerance of 1e-14 here.
    """
    generator = np.random.default_rng(SEED + 1)
    worst = 0.0
    convex = True
    ratios = []
    with overridden(power_tolerance=1e-14):
        for depth in (1, 2):
            f = CylinderPotential(generator.normal(size=3 ** depth), 3, depth)
            g = CylinderPotential(generator.normal(size=3 ** depth), 3, depth)
            values = [classical_pressure(f + float(t) * g).value for t in np.linspace(-2.0, 2.0, 21)]
            convex = convex and bool(np.all(np.diff(values, 2) > -1e-10))
            expectation = gibbs_expectation(gibbs_measure(f), g)
            coarse = _central_difference(f, g, 1e-3)
            fine = _central_difference(f, g, 1e-4)
            worst = max(worst, abs((100.0 * fine - coarse) / 99.0 - expectation))
            # Ratios are only taken where the coarse error stands clear of rounding.
            if abs(coarse - expectation) >= 1e-7:
                ratios.append(abs(coarse - expectation) / max(abs(fine - expectation), 1e-300))
    ratio_ok = all(50.0 <= ratio <= 200.0 for ratio in ratios)
    return (worst if convex else math.inf), 1e-8, {'convex': convex, 'ratios': ratios, 'ratio_ok': ratio_ok}


def check_corridor_properties(quick):
    """Unconstrained corridor sums reproduce the full partition sum, and the estimate does not depend on K."""
    model = _walk_model(0.4, 0.6)
    f = model.geometric_potential() * 0.8
    psi = model.step_potential()
    horizon = 50
    table = corridor_partition(f, psi, 0.0, math.inf, horizon)
    row_error = abs(table.log_zeta[-1] - horizon * float(logsumexp(f.values)))

    length = 1000 if quick else 4000
    estimates = [fibre_pressure_estimate(f, psi, width, length)[-1][1] for width in (1.0, 2.0, 5.0)]
    spread = max(estimates) - min(estimates)
    return spread, 2e-2, {'row_error': row_error, 'row_ok': row_error <= 1e-10 * horizon, 'estimates': estimates}


def check_spectrum_shape(quick):
    """The spectrum is unimodal with its peak at the drift, and vanishes outside the step range."""
    model = _walk_model(0.4, 0.6)
    curve = spectrum_sweep(model, points=21 if quick else 61)
    grid_step = float(np.diff(curve.alphas[1:-1]).max())
    peak_error = abs(curve.argmax() - alpha_max(model))
    outside = max(abs(delta_alpha_root(model, alpha)) for alpha in (-1.5, 1.0001, 2.0))
    ok = curve.is_unimodal() and peak_error <= grid_step and outside == 0.0
    return (0.0 if ok else math.inf), 0.0, {'peak_error': peak_error, 'grid_step': grid_step}


def check_conjugacy(quick):
    """
    Lift orbits shadow the skew product over n = 20 steps on random 60-symbol prefixes. The symmetric walk is held
    to 1e-9 outright; for the other models the distance is carried back through the derivative of F^n, so what is
    bounded is how far the computed orbit lies from a true one.
    """
    generator = np.random.default_rng(SEED + 2)
    horizon = 20
    symmetric = _walk_model(0.5, 0.5)
    models = [symmetric, _walk_model(0.4, 0.6), get_family('multi-branch').build_model((1 / 3, 1, 2))]
    worst = 0.0
    absolute = {}
    shadow = 0.0
    for model in models:
        absolute[model.name] = 0.0
        for _ in range(20 if quick else 100):
            prefix = generator.integers(1, model.alphabet_size + 1, size=60)
            level = int(generator.integers(-5, 6))
            deviation = conjugacy_check(model, prefix, level, horizon)
            absolute[model.name] = max(absolute[model.name], deviation)
            if model is symmetric:
                worst = max(worst, deviation)
            else:
                shadow = max(shadow, deviation * float(np.prod(model.contractions[prefix[:horizon] - 1])))
    return worst, 1e-9, {'horizon': horizon, 'absolute': absolute, 'shadow': shadow, 'shadow_ok': shadow <= 1e-12}


def check_orbit_statistics(quick):
    """
    Sampled drifts against the Gibbs drift (10^4 orbits of 10^4 steps, kept in summary mode), and sampled levels
    against the exact law (chi-square).
    """
    model = _walk_model(0.4, 0.6)
    measure = gibbs_measure(model.geometric_potential())
    psi = model.step_potential()
    count = 2000 if quick else 10 ** 4
    batch = sample_orbits(measure, count, count, SEED, psi)
    drift, error = batch.drift_estimate()
    drift_score = abs(drift - gibbs_expectation(measure, psi)) / error

    horizon = 20
    samples = 10 ** 4 if quick else 10 ** 5
    batch = sample_orbits(measure, horizon, samples, SEED + 3, psi)
    law = exact_level_distribution(measure, psi, horizon).distribution()
    levels = sorted(level for level, p in law.items() if p * samples >= 5.0)
    observed = np.array([np.count_nonzero(batch.final_levels == level) for level in levels], dtype=float)
    expected = np.array([law[level] * samples for level in levels])
    observed = np.append(observed, samples - observed.sum())
    expected = np.append(expected, samples - expected.sum())
    keep = expected > 0.0
    p_value = float(stats.chisquare(observed[keep], expected[keep]).pvalue)
    return drift_score, 4.0, {'drift_hat': drift, 'drift_se': error, 'chi_square_p': p_value,
                              'chi_square_ok': p_value > 1e-3}


def check_symmetry_on_average(quick):
    """The symmetric walk is symmetric on average; the drifting walk is not."""
    horizon = 200 if quick else 500
    symmetric = _walk_model(0.5, 0.5)
    drifting = _walk_model(0.4, 0.6)
    ratio_symmetric = symmetry_on_average_ratio(symmetric.geometric_potential(), symmetric.step_potential(), horizon)
    ratio_drifting = symmetry_on_average_ratio(drifting.geometric_potential(), drifting.step_potential(), horizon)
    ok = abs(ratio_symmetric - 1.0) <= 0.1 and ratio_drifting > 10.0
    return (abs(ratio_symmetric - 1.0) if ok else math.inf), 0.1, {'symmetric': ratio_symmetric,
                                                                  'drifting': ratio_drifting}


CHECKS = collections.OrderedDict([
    ('random-walk-fibre-pressure', check_random_walk_fibre_pressure),
    ('recurrent-dimension', check_recurrent_dimension),
    ('gap-criterion', check_gap_criterion),
    ('spectrum-closed-forms', check_spectrum_closed_forms),
    ('three-methods', check_three_methods),
    ('direct-series', check_direct_series),
    ('slope-identity', check_slope_identity),
    ('pressure-properties', check_pressure_properties),
    ('corridor-properties', check_corridor_properties),
    ('spectrum-shape', check_spectrum_shape),
    ('conjugacy', check_conjugacy),
    ('orbit-statistics', check_orbit_statistics),
    ('symmetry-on-average', check_symmetry_on_average),
])


def run_verification(quick=False, names=None):
    """
    Run the named checks (all of them by default) and return their results in order. A check that raises is
    reported as failed with the error record as its detail.
    """
    unknown = set(names or ()) - set(CHECKS)
    if unknown:
        raise RangeError("Unknown checks: %s" % ', '.join(sorted(unknown)), module='verification',
                         operation='run_verification')
    results = []
    for name, check in CHECKS.items():
        if names is not None and name not in names:
            continue
        started = time.perf_counter()
        try:
            worst, bound, detail = check(quick)
            passed = worst <= bound and all(value for key, value in detail.items() if key.endswith('_ok'))
        except PressureLabError as error:
            worst, bound, detail, passed = math.inf, math.nan, error.to_record(), False
        seconds = time.perf_counter() - started
        _LOGGER.info("verify %s: %s (worst %r, bound %r, %.2fs)", name, 'ok' if passed else 'FAILED', worst, bound,
                     seconds)
        results.append(CheckResult(name, passed, worst, bound, detail, seconds))
    return results
