"""
Fibre-induced pressure of a potential f along an integer-valued step potential psi.

The fibre-induced pressure is computed two ways: variationally, as the minimum over s of the classical pressure
P(s psi + f), and directly from corridor partition sums, the total weight of words whose psi-sum stays within a
corridor of half width K around n alpha. Corridor sums come from a dynamic programme over integer lift levels and
(depth-1)-word states (the lattice walk), never from enumerating words.
"""

import collections
import logging
import math

import numpy as np

from pressurelab.config import get_settings
from pressurelab.enums import GrowthTag, Regime
from pressurelab.exceptions import BoundaryDepthError, DepthError, RangeError, RegimeError, WidthError
from pressurelab.pressure import SubAlphabet, equilibrium, gibbs_covariance, gibbs_expectation
from pressurelab.solvers import expand_bracket, safeguarded_newton
from pressurelab.symbolic import CylinderPotential, psi_bounds

__author__ = 'pressurelab developers'
__all__ = [
    'FibrePressureResult',
    'CorridorTable',
    'SeriesDiagnostic',
    'LatticeWalk',
    'fibre_pressure',
    'minimizer_t',
    'corridor_partition',
    'fibre_pressure_estimate',
    'recurrence_series',
    'symmetry_on_average_ratio',
    'default_half_width',
]


_LOGGER = logging.getLogger(__name__)

# Largest exponent allowed in e^{s psi} while searching for the minimiser.
EXPONENT_CAP = 700.0

# Lattice detection tolerance on the fractional parts of psi.
LATTICE_TOLERANCE = 1e-9


class FibrePressureResult(collections.namedtuple('FibrePressureResult', [
        'value', 'minimizer', 'regime', 'boundary_alphabet', 'curvature', 'measure'])):
    """
    The fibre-induced pressure of (f, psi) with the data of the regime that produced it. The minimiser and the
    curvature (the Gibbs variance of psi at the minimiser) are only present in the interior regime; the boundary
    sub-alphabet I0 only in a boundary regime. The measure is the Gibbs measure realising the value, if any.
    """

    __slots__ = ()

    @property
    def is_finite(self):
        """Whether the value is a real number rather than minus infinity."""
        return self.regime != Regime.EMPTY


def _common_depth(f, psi, operation):
    assert isinstance(f, CylinderPotential) and isinstance(psi, CylinderPotential)
    if f.alphabet_size != psi.alphabet_size:
        raise DepthError("The potential and the step potential live on different alphabets.",
                         module='fibre', operation=operation)
    depth = max(f.depth, psi.depth)
    return f.lift(depth), psi.lift(depth)


def fibre_pressure(f, psi):
    """
    Return the fibre-induced pressure of f along psi.

    In the interior regime (0 strictly inside the range of psi averages) the value is min_s P(s psi + f), reached at
    the unique s where the Gibbs mean of psi vanishes. When 0 is an endpoint of the range the value is the classical
    pressure of f restricted to the symbols where psi vanishes. Otherwise it is minus infinity.
    """
    f, psi = _common_depth(f, psi, 'fibre_pressure')
    bounds = psi_bounds(psi)
    tolerance = get_settings().boundary_tolerance

    if bounds.lower > tolerance or bounds.upper < -tolerance:
        return FibrePressureResult(-math.inf, None, Regime.EMPTY, None, None, None)

    if abs(bounds.lower) <= tolerance or abs(bounds.upper) <= tolerance:
        if not psi.is_first_symbol_only():
            raise BoundaryDepthError("Zero is an endpoint of the step range of a potential that depends on more "
                                     "than the first symbol.", module='fibre', operation='fibre_pressure')
        steps = psi.first_symbol_values()
        boundary = SubAlphabet(np.flatnonzero(np.abs(steps) <= tolerance) + 1, psi.alphabet_size)
        value, measure = equilibrium(f, boundary)
        regime = Regime.BOUNDARY_LOWER if abs(bounds.lower) <= tolerance else Regime.BOUNDARY_UPPER
        _LOGGER.debug("fibre_pressure: %s regime on %r, value %r", regime, boundary, value.value)
        return FibrePressureResult(value.value, None, regime, boundary, None, measure)

    def drift(s):
        _, measure = equilibrium(s * psi + f)
        return gibbs_expectation(measure, psi)

    def drift_and_variance(s):
        _, measure = equilibrium(s * psi + f)
        return gibbs_expectation(measure, psi), gibbs_covariance(measure, psi)

    cap = EXPONENT_CAP / float(np.abs(psi.values).max())
    lower, upper = expand_bracket(drift, start=1.0, cap=cap, operation='fibre_pressure')
    minimizer = safeguarded_newton(drift_and_variance, lower, upper, operation='fibre_pressure')
    value, measure = equilibrium(minimizer * psi + f)
    curvature = gibbs_covariance(measure, psi)
    return FibrePressureResult(value.value, minimizer, Regime.INTERIOR, None, curvature, measure)


def minimizer_t(f, psi):
    """Return the unique t(f) with vanishing Gibbs mean of psi under mu_{t psi + f}."""
    result = fibre_pressure(f, psi)
    if result.regime != Regime.INTERIOR:
        raise RegimeError("The minimiser only exists when 0 lies strictly inside the step range (regime %s)."
                          % result.regime, module='fibre', operation='minimizer_t')
    return result.minimizer


def _lattice_steps(psi, operation):
    """Split psi into integer steps and a common real offset."""
    offset = float(psi.values[0] - math.floor(psi.values[0]))
    shifted = psi.values - offset
    steps = np.round(shifted)
    if np.abs(shifted - steps).max() > LATTICE_TOLERANCE:
        raise RangeError("The step potential does not take values in a single translate of the integers.",
                         module='fibre', operation=operation)
    return steps.astype(np.int64), offset


def default_half_width(psi):
    """The default corridor half width, one more than the largest step."""
    return float(np.abs(psi.values).max()) + 1.0


class LatticeWalk:
    """
    Forward recursion over (integer level, last depth-1 symbols) pairs for an integer step potential.

    After the first depth-1 symbols, every further symbol j appended to a state u adds the window weight w[u, j] and
    the step psi[u, j]; the state becomes the last depth-1 symbols of uj. Rows are rescaled by their maximum, the
    logarithm of the accumulated scale being kept separately. At a horizon the unfinished tail terms are added per
    state: the supremum part of the Birkhoff sum for potentials, nothing for measures.
    """

    def __init__(self, initial, weights, log_shift, steps, tail_steps, tail_log, offset, horizon, operation):
        states, m = weights.shape
        assert steps.shape == weights.shape and initial.shape == (states,)
        memory = 0
        while m ** memory < states:
            memory += 1

        self._m = m
        self._memory = memory
        self._states = states
        self._weights = weights
        self._log_shift = log_shift
        self._steps = steps
        self._tail_steps = tail_steps
        self._tail_log = tail_log
        self._offset = offset
        self._min_step = int(steps.min())
        self._span = int(steps.max()) - self._min_step

        windows = max(horizon - memory, 0)
        cells = (windows * self._span + 1) * states
        if cells > get_settings().width_cap:
            raise WidthError("The lattice walk needs %d cells, more than the cap of %d."
                             % (cells, get_settings().width_cap), module='fibre', operation=operation)

        self._row = initial.astype(float)[None, :]
        self._log_scale = 0.0
        self._windows = 0
        self._normalise()

    @classmethod
    def from_potentials(cls, f, psi, horizon, operation='lattice_walk'):
        """The walk weighting each word w by exp(S_w f)."""
        f, psi = _common_depth(f, psi, operation)
        steps, offset = _lattice_steps(psi, operation)
        m = f.alphabet_size
        states = m ** (f.depth - 1)
        shift = float(f.values.max())
        weights = np.exp(f.values - shift).reshape(states, m)
        tail_steps = np.round(CylinderPotential(steps, m, psi.depth).tail_table).astype(np.int64)
        return cls(np.ones(states), weights, shift, steps.reshape(states, m), tail_steps, f.tail_table.copy(),
                   offset, horizon, operation)

    @classmethod
    def from_measure(cls, measure, psi, horizon, operation='lattice_walk'):
        """The walk weighting each word w by its Gibbs mass mu([w])."""
        if psi.alphabet_size != measure.alphabet_size:
            raise DepthError("The measure and the step potential live on different alphabets.",
                             module='fibre', operation=operation)
        depth = max(measure.depth, psi.depth)
        psi = psi.lift(depth)
        steps, offset = _lattice_steps(psi, operation)
        m = psi.alphabet_size
        memory = depth - 1
        states = m ** memory
        table_memory, table = measure.next_symbol_table()
        rows = np.arange(states) % (m ** table_memory) if table_memory else np.zeros(states, dtype=np.int64)
        tail_steps = np.round(CylinderPotential(steps, m, depth).tail_table).astype(np.int64)
        return cls(measure.marginal(memory) if memory else np.ones(1), table[rows], 0.0,
                   steps.reshape(states, m), tail_steps, np.zeros(states), offset, horizon, operation)

    @property
    def horizon(self):
        """The current word length."""
        return self._windows + self._memory

    @property
    def memory(self):
        """The number of trailing symbols held in the state."""
        return self._memory

    @property
    def offset(self):
        """The common non-integer part of every step."""
        return self._offset

    @property
    def log_scale(self):
        """The logarithm of the factor pulled out of the current row."""
        return self._log_scale

    def _normalise(self):
        peak = self._row.max()
        if peak > 0.0:
            self._row /= peak
            self._log_scale += math.log(peak)

    def advance(self):
        """Append one symbol to every word."""
        rows = self._row.shape[0]
        m = self._m
        updated = np.zeros((rows + self._span, self._states))
        for symbol in range(m):
            for step in np.unique(self._steps[:, symbol]):
                factor = np.where(self._steps[:, symbol] == step, self._weights[:, symbol], 0.0)
                contribution = self._row * factor
                start = int(step) - self._min_step
                if self._memory:
                    contribution = contribution.reshape(rows, m, self._states // m).sum(axis=1)
                    updated[start:start + rows, symbol::m] += contribution
                else:
                    updated[start:start + rows, 0] += contribution[:, 0]
        self._row = updated
        self._windows += 1
        self._log_scale += self._log_shift
        self._normalise()

    def _total_levels(self):
        """Integer level of every (row, state) cell once the tail steps are added."""
        first = self._windows * self._min_step
        levels = first + np.arange(self._row.shape[0])
        return levels[:, None] + self._tail_steps[None, :]

    def _corridor_mask(self, alpha, half_width):
        if math.isinf(half_width):
            return np.ones(self._row.shape, dtype=bool)
        shift = self.horizon * (alpha - self._offset)
        return np.abs(self._total_levels() - shift) <= half_width + 1e-12

    def corridor_log_mass(self, alpha, half_width):
        """log of the total weight of words whose psi-sum lies within half_width of horizon * alpha."""
        tail = np.exp(self._tail_log - self._tail_log.max())
        total = float((np.where(self._corridor_mask(alpha, half_width), self._row, 0.0) @ tail).sum())
        if total <= 0.0:
            return -math.inf
        return self._log_scale + float(self._tail_log.max()) + math.log(total)

    def remove_corridor(self, alpha, half_width):
        """Drop the words currently inside the corridor and return the log of their weight."""
        mask = self._corridor_mask(alpha, half_width)
        tail = np.exp(self._tail_log - self._tail_log.max())
        total = float((np.where(mask, self._row, 0.0) @ tail).sum())
        self._row = np.where(mask, 0.0, self._row)
        if total <= 0.0:
            return -math.inf
        return self._log_scale + float(self._tail_log.max()) + math.log(total)

    def restrict_corridor(self, alpha, half_width):
        """Drop the words currently outside the corridor."""
        self._row = np.where(self._corridor_mask(alpha, half_width), self._row, 0.0)
        self._normalise()

    def level_masses(self):
        """
        Return (first level, masses, log scale): the weight per integer level at the current horizon, relative to
        exp(log scale). The real level is the integer level plus horizon * offset.
        """
        levels = self._total_levels()
        tail = np.exp(self._tail_log - self._tail_log.max())
        first = int(levels.min())
        masses = np.zeros(int(levels.max()) - first + 1)
        np.add.at(masses, (levels - first).ravel(), (self._row * tail[None, :]).ravel())
        return first, masses, self._log_scale + float(self._tail_log.max())


class CorridorTable:
    """
    Corridor partition sums of one lattice walk: the log corridor weight at every horizon up to n, and the level
    weights at horizon n. Horizons shorter than the potential depth carry NaN.
    """

    def __init__(self, horizon, alpha, half_width, log_zeta, first_level, masses, log_scale, offset):
        self.horizon = horizon
        self.alpha = alpha
        self.half_width = half_width
        self.log_zeta = log_zeta
        self.first_level = first_level
        self.masses = masses
        self.log_scale = log_scale
        self.offset = offset

    @property
    def levels(self):
        """The integer levels at horizon n, lowest first."""
        return self.first_level + np.arange(self.masses.size)

    @property
    def level_range(self):
        """(m_lo, m_hi) of the levels held at horizon n."""
        return self.first_level, self.first_level + self.masses.size - 1

    @property
    def weights(self):
        """The absolute weight per level at horizon n."""
        return self.masses * math.exp(self.log_scale)

    @property
    def zeta(self):
        """The corridor partition sum at horizon n."""
        return math.exp(self.log_zeta[-1])

    def zeta_at(self, length):
        """The corridor partition sum at a shorter horizon."""
        return math.exp(self.log_zeta[length])

    def distribution(self):
        """Return {level: weight} for the non-zero level weights at horizon n."""
        weights = self.weights
        return {int(level): float(weight) for level, weight in zip(self.levels, weights) if weight > 0.0}

    def __repr__(self):
        return 'CorridorTable(horizon=%d, alpha=%r, half_width=%r, zeta=%r)' % (
            self.horizon, self.alpha, self.half_width, self.zeta)


def run_walk(walk, horizon, alpha, half_width, first_valid):
    """Advance a walk to the horizon, recording corridor log weights from the first valid length on."""
    log_zeta = np.full(horizon + 1, math.nan)
    while walk.horizon < horizon:
        if walk.horizon >= first_valid:
            log_zeta[walk.horizon] = walk.corridor_log_mass(alpha, half_width)
        walk.advance()
    if walk.horizon >= first_valid:
        log_zeta[walk.horizon] = walk.corridor_log_mass(alpha, half_width)
    first_level, masses, log_scale = walk.level_masses()
    return CorridorTable(horizon, alpha, half_width, log_zeta, first_level, masses, log_scale, walk.offset)


def _check_corridor(half_width, horizon, operation):
    if not half_width > 0.0:
        raise RangeError("The corridor half width must be positive, got %r." % half_width,
                         module='fibre', operation=operation)
    if horizon < 1:
        raise RangeError("The horizon must be at least 1, got %r." % horizon, module='fibre', operation=operation)


def _first_valid(f, psi):
    depth = max(f.depth, psi.depth)
    return 0 if depth == 1 else depth


def corridor_partition(f, psi, alpha=0.0, half_width=None, horizon=1):
    """
    Return the corridor partition sums zeta_j(f, psi - alpha, K) for j up to the horizon: the total of exp(S_w f)
    over words w of length j with |S_w psi - j alpha| <= K. Pass K = inf for the unconstrained sums.
    """
    half_width = default_half_width(psi) if half_width is None else float(half_width)
    _check_corridor(half_width, horizon, 'corridor_partition')
    walk = LatticeWalk.from_potentials(f, psi, horizon, 'corridor_partition')
    table = run_walk(walk, horizon, alpha, half_width, _first_valid(f, psi))
    _LOGGER.debug("corridor_partition: %r", table)
    return table


def fibre_pressure_estimate(f, psi, half_width=None, horizon=1):
    """
    Return [(n, (1/n) log zeta_n(f, psi, K))] for every valid n up to the horizon. An empty corridor gives minus
    infinity.
    """
    table = corridor_partition(f, psi, 0.0, half_width, horizon)
    return [(n, table.log_zeta[n] / n) for n in range(1, horizon + 1) if not math.isnan(table.log_zeta[n])]


class SeriesDiagnostic(collections.namedtuple('SeriesDiagnostic', ['partial_sums', 'tag', 'pressure',
                                                                   'half_width'])):
    """
    Partial sums of the recurrence series sum over corridor words of exp(S_w f - |w| P), indexed by the largest word
    length included, with a heuristic growth tag.
    """

    __slots__ = ()

    @property
    def total(self):
        """The last partial sum."""
        return float(self.partial_sums[-1]) if len(self.partial_sums) else 0.0


def growth_tag(partial_sums):
    """Classify partial sums as linear-like (power growth), log-like or bounded-suspect."""
    slope_bound, increment_bound = get_settings().growth_thresholds
    count = len(partial_sums)
    if count < 4 or partial_sums[-1] <= 0.0:
        return GrowthTag.BOUNDED_SUSPECT
    last = partial_sums[-1]
    half = partial_sums[count // 2 - 1]
    quarter = partial_sums[count // 4 - 1]
    if half <= 0.0:
        return GrowthTag.LINEAR_LIKE
    slope = math.log(last / half) / math.log(count / (count // 2))
    if slope >= slope_bound:
        return GrowthTag.LINEAR_LIKE
    if half > quarter and (last - half) / (half - quarter) >= increment_bound:
        return GrowthTag.LOG_LIKE
    return GrowthTag.BOUNDED_SUSPECT


def recurrence_series(f, psi, half_width=None, horizon=1):
    """
    Return the partial sums up to word length N of the recurrence series at the fibre-induced pressure, whose
    divergence makes f psi-recurrent.
    """
    half_width = default_half_width(psi) if half_width is None else float(half_width)
    _check_corridor(half_width, horizon, 'recurrence_series')
    pressure = fibre_pressure(f, psi).value
    if math.isinf(pressure):
        return SeriesDiagnostic(np.zeros(horizon), GrowthTag.BOUNDED_SUSPECT, pressure, half_width)
    table = corridor_partition(f.shifted(pressure), psi, 0.0, half_width, horizon)
    terms = np.exp(np.nan_to_num(table.log_zeta[1:], nan=-np.inf))
    partial_sums = np.cumsum(terms)
    tag = growth_tag(partial_sums)
    _LOGGER.debug("recurrence_series: total %r after %d lengths, %s", partial_sums[-1], horizon, tag)
    return SeriesDiagnostic(partial_sums, tag, pressure, half_width)


def symmetry_on_average_ratio(f, psi, horizon):
    """
    Return the largest ratio A(m) / A(-m) over 1 <= |m| <= the configured level cap, where A(m) is the total of
    exp(S_w f - |w| P) over words of length at most the horizon with S_w psi = m, and P is the fibre-induced pressure.
    """
    result = fibre_pressure(f, psi)
    if not result.is_finite:
        raise RegimeError("The fibre-induced pressure is not finite.", module='fibre',
                          operation='symmetry_on_average_ratio')
    walk = LatticeWalk.from_potentials(f.shifted(result.value), psi, horizon, 'symmetry_on_average_ratio')
    if walk.offset != 0.0:
        raise RangeError("Symmetry on average needs integer steps.", module='fibre',
                         operation='symmetry_on_average_ratio')
    bound = int(horizon * np.abs(psi.values).max()) + 1
    accumulated = np.zeros(2 * bound + 1)
    accumulated_scale = -math.inf
    first_valid = max(_first_valid(f, psi), 1)
    while True:
        if walk.horizon >= first_valid:
            first, masses, scale = walk.level_masses()
            if scale > accumulated_scale:
                accumulated *= math.exp(accumulated_scale - scale) if math.isfinite(accumulated_scale) else 0.0
                accumulated_scale = scale
            accumulated[first + bound:first + bound + masses.size] += masses * math.exp(scale - accumulated_scale)
        if walk.horizon >= horizon:
            break
        walk.advance()

    ratio = 1.0
    for level in range(1, min(get_settings().symmetry_level_cap, bound) + 1):
        up, down = accumulated[bound + level], accumulated[bound - level]
        if up == 0.0 and down == 0.0:
            continue
        if up == 0.0 or down == 0.0:
            return math.inf
        ratio = max(ratio, up / down, down / up)
    return ratio
