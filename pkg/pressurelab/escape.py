"""
Orbit-level experiments on the lifted interval map: sampling Gibbs-distributed symbol sequences with their lift
paths, recurrence statistics, exact lift-level laws, direct iteration of the lift and the conjugacy check between
the lift and the symbolic skew product.

Random numbers come from counter-based Philox streams keyed by (seed, orbit index), so every orbit is reproducible
on its own, whatever the batching or thread count. Each orbit draws uniforms u_0, u_1, ... from its stream in order:

- Bernoulli measures: symbol t is the first index whose cumulative weight exceeds u_t.
- Markov measures with memory k - 1: u_0 picks the initial (k-1)-word from the stationary marginal in the same way,
  and each later u_t picks the next symbol from the transition row of the current state.
"""

import collections
import concurrent.futures
import logging
import math

import numpy as np

from pressurelab.config import get_settings
from pressurelab.exceptions import (BudgetError, DepthError, EscapeFromRepellerError, PrecisionError, RangeError)
from pressurelab.fibre import CorridorTable, LatticeWalk, corridor_partition, run_walk
from pressurelab.pressure import GibbsMeasure
from pressurelab.symbolic import BranchModel, CylinderPotential, Word, cylinder_geometry

__author__ = 'pressurelab developers'
__all__ = [
    'OrbitBatch',
    'RecurrenceStats',
    'sample_orbits',
    'recurrence_statistics',
    'exact_level_distribution',
    'exact_recurrence_probability',
    'exact_uniform_probability',
    'iterate_interval_map',
    'conjugacy_check',
    'cover_sum',
]


_LOGGER = logging.getLogger(__name__)

# Width of the band around branch endpoints treated as the excluded set.
BOUNDARY_BAND = 1e-12

# Cylinder width needed before a prefix pins down its point.
PRECISION_TARGET = 1e-13

# Upper bound on the uniforms generated per block of orbits.
BLOCK_ENTRIES = 2 ** 22


def _integer_steps(measure, psi, operation):
    if psi.alphabet_size != measure.alphabet_size:
        raise DepthError("The measure and the step potential live on different alphabets.",
                         module='escape', operation=operation)
    steps = psi.first_symbol_values()
    if np.any(steps != np.round(steps)):
        raise RangeError("Lift paths need integer steps.", module='escape', operation=operation)
    return steps.astype(np.int64)


def _orbit_uniforms(seed, index, count):
    generator = np.random.Generator(np.random.Philox(key=[seed, index]))
    return generator.random(count)


def _sample_block(measure, horizon, seed, indices):
    """Sample the symbol sequences of the given orbits as a (len(indices), horizon) array of 0-based symbols."""
    m = measure.alphabet_size
    memory, table = measure.next_symbol_table()
    if memory == 0:
        cumulative = np.cumsum(table[0])
        uniforms = np.stack([_orbit_uniforms(seed, index, horizon) for index in indices])
        return np.minimum(np.searchsorted(cumulative, uniforms, side='right'), m - 1)

    draws = max(horizon - memory, 0) + 1
    uniforms = np.stack([_orbit_uniforms(seed, index, draws) for index in indices])
    cumulative_start = np.cumsum(measure.marginal(memory))
    state = np.minimum(np.searchsorted(cumulative_start, uniforms[:, 0], side='right'), m ** memory - 1)
    symbols = np.empty((len(indices), max(horizon, memory)), dtype=np.int64)
    powers = m ** np.arange(memory - 1, -1, -1)
    symbols[:, :memory] = (state[:, None] // powers[None, :]) % m
    cumulative_rows = np.cumsum(table, axis=1)
    for t in range(1, draws):
        thresholds = cumulative_rows[state]
        following = np.minimum((uniforms[:, t:t + 1] >= thresholds).sum(axis=1), m - 1)
        symbols[:, memory + t - 1] = following
        state = (state * m + following) % (m ** memory)
    return symbols[:, :horizon]


def _measure_label(measure):
    if measure.depth == 1:
        return 'bernoulli(' + ','.join('%.15g' % weight for weight in measure.weights) + ')'
    return 'markov(depth=%d)' % measure.depth


class OrbitBatch:
    """
    A reproducible batch of sampled orbits. Lift paths S_0 = 0, S_1, ..., S_n are stored when they fit the orbit
    budget; otherwise the batch keeps only the final levels and regenerates paths block by block on demand.
    """

    def __init__(self, measure, steps, horizon, count, seed, keep_symbols=False, label=None):
        self.measure = measure
        self.steps = steps
        self.horizon = horizon
        self.count = count
        self.seed = seed
        self.label = _measure_label(measure) if label is None else label
        self.paths = None
        self.symbols = None
        self.final_levels = np.empty(count, dtype=np.int64)

        stored = count * (horizon + 1) <= get_settings().orbit_budget
        if keep_symbols and not stored:
            raise BudgetError("Keeping %d x %d symbols exceeds the orbit budget." % (count, horizon),
                              module='escape', operation='sample_orbits')
        paths = [] if stored else None
        symbols = [] if keep_symbols else None
        for indices, block_symbols, block_paths in self._generate():
            self.final_levels[indices] = block_paths[:, -1]
            if paths is not None:
                paths.append(block_paths)
            if symbols is not None:
                symbols.append((block_symbols + 1).astype(np.int16))
        if paths is not None:
            self.paths = np.concatenate(paths) if paths else np.zeros((0, horizon + 1), dtype=np.int64)
        if symbols is not None:
            self.symbols = np.concatenate(symbols) if symbols else np.zeros((0, horizon), dtype=np.int16)
        _LOGGER.debug("Sampled %d orbits of length %d (seed %d, %s)", count, horizon, seed,
                      'stored' if stored else 'summary only')

    @property
    def is_summary_only(self):
        """Whether lift paths are regenerated on demand rather than stored."""
        return self.paths is None

    def _blocks(self):
        size = max(1, BLOCK_ENTRIES // max(self.horizon, 1))
        return [np.arange(start, min(start + size, self.count)) for start in range(0, self.count, size)]

    def _block(self, indices):
        symbols = _sample_block(self.measure, self.horizon, self.seed, indices)
        paths = np.zeros((len(indices), self.horizon + 1), dtype=np.int64)
        paths[:, 1:] = np.cumsum(self.steps[symbols], axis=1)
        return indices, symbols, paths

    def _generate(self):
        blocks = self._blocks()
        threads = get_settings().threads
        if threads > 1 and len(blocks) > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
                for result in executor.map(self._block, blocks):
                    yield result
        else:
            for indices in blocks:
                yield self._block(indices)

    def iter_paths(self):
        """Yield (orbit indices, lift paths) block by block, in orbit order."""
        if self.paths is not None:
            yield np.arange(self.count), self.paths
            return
        for indices, _, paths in self._generate():
            yield indices, paths

    def drift_estimate(self):
        """Return the mean of S_n / n over the batch and its standard error."""
        averages = self.final_levels / float(self.horizon)
        error = float(averages.std(ddof=1) / math.sqrt(self.count)) if self.count > 1 else math.nan
        return float(averages.mean()), error

    def summary(self, alpha=0.0, half_width=1.0):
        """Return the JSON record of the batch with the recurrence proxies at (alpha, half_width)."""
        drift, error = self.drift_estimate()
        stats = recurrence_statistics(self, alpha, half_width)
        return {
            'seed': self.seed,
            'n': self.horizon,
            'count': self.count,
            'measure': self.label,
            'drift_hat': drift,
            'drift_se': error,
            'recur_frac': stats.recurrent_fraction,
            'unif_frac': stats.uniform_fraction,
        }

    def __repr__(self):
        return 'OrbitBatch(seed=%d, count=%d, n=%d, measure=%s)' % (self.seed, self.count, self.horizon, self.label)


def sample_orbits(measure, horizon, count, seed, psi, keep_symbols=False, label=None):
    """
    Sample `count` orbits of length n from a Gibbs measure and return their lift paths under the integer step
    potential psi.
    """
    assert isinstance(measure, GibbsMeasure) and isinstance(psi, CylinderPotential)
    if horizon < 1 or count < 1 or seed < 0:
        raise RangeError("The horizon and orbit count must be positive and the seed non-negative.",
                         module='escape', operation='sample_orbits')
    steps = _integer_steps(measure, psi, 'sample_orbits')
    return OrbitBatch(measure, steps, horizon, count, int(seed), keep_symbols, label)


RecurrenceStats = collections.namedtuple('RecurrenceStats', [
    'alpha', 'half_width', 'tail_start', 'recurrent', 'uniform', 'min_deviation',
    'recurrent_fraction', 'recurrent_se', 'uniform_fraction', 'uniform_se',
])


def _binomial_error(fraction, count):
    return math.sqrt(fraction * (1.0 - fraction) / count)


def recurrence_statistics(batch, alpha, half_width):
    """
    Return per-orbit recurrence proxies with aggregate fractions: whether |S_j - j alpha| <= K for some j in the tail
    window [fraction * n, n] (recurrent proxy), whether it holds for every j <= n (uniform proxy), and the smallest
    deviation over 1 <= j <= n.
    """
    if half_width < 1.0:
        raise RangeError("The corridor half width must be at least 1.", module='escape',
                         operation='recurrence_statistics')
    tail_start = int(math.ceil(get_settings().recurrence_tail_fraction * batch.horizon))
    recurrent = np.empty(batch.count, dtype=bool)
    uniform = np.empty(batch.count, dtype=bool)
    min_deviation = np.empty(batch.count)
    drift = alpha * np.arange(batch.horizon + 1)
    for indices, paths in batch.iter_paths():
        deviation = np.abs(paths - drift[None, :])
        inside = deviation <= half_width
        recurrent[indices] = inside[:, tail_start:].any(axis=1)
        uniform[indices] = inside.all(axis=1)
        min_deviation[indices] = deviation[:, 1:].min(axis=1)
    recurrent_fraction = float(recurrent.mean())
    uniform_fraction = float(uniform.mean())
    return RecurrenceStats(alpha, half_width, tail_start, recurrent, uniform, min_deviation,
                           recurrent_fraction, _binomial_error(recurrent_fraction, batch.count),
                           uniform_fraction, _binomial_error(uniform_fraction, batch.count))


def _measure_walk(measure, psi, horizon, operation):
    if horizon < 1:
        raise RangeError("The horizon must be at least 1.", module='escape', operation=operation)
    return LatticeWalk.from_measure(measure, psi, horizon, operation)


def exact_level_distribution(source, psi, horizon):
    """
    Return the exact law of S_n psi as a CorridorTable whose level weights are probabilities. The source is either a
    GibbsMeasure or a CylinderPotential f, whose words are then weighted proportionally to exp(S_w f).
    """
    if isinstance(source, CylinderPotential):
        table = corridor_partition(source, psi, 0.0, math.inf, horizon)
        masses = table.masses / table.masses.sum()
        return CorridorTable(horizon, 0.0, math.inf, table.log_zeta - table.log_zeta[-1], table.first_level, masses,
                             0.0, table.offset)
    walk = _measure_walk(source, psi, horizon, 'exact_level_distribution')
    table = run_walk(walk, horizon, 0.0, math.inf, walk.memory)
    total = table.masses.sum() * math.exp(table.log_scale)
    return CorridorTable(horizon, 0.0, math.inf, table.log_zeta, table.first_level,
                         table.masses * math.exp(table.log_scale) / total, 0.0, table.offset)


def exact_recurrence_probability(measure, psi, alpha, half_width, horizon):
    """The exact probability of the recurrent proxy: |S_j - j alpha| <= K for some j in the tail window."""
    walk = _measure_walk(measure, psi, horizon, 'exact_recurrence_probability')
    tail_start = int(math.ceil(get_settings().recurrence_tail_fraction * horizon))
    hit = 0.0
    while True:
        if walk.horizon >= max(tail_start, walk.memory):
            removed = walk.remove_corridor(alpha, half_width)
            if math.isfinite(removed):
                hit += math.exp(removed)
        if walk.horizon >= horizon:
            break
        walk.advance()
    return min(hit, 1.0)


def exact_uniform_probability(measure, psi, alpha, half_width, horizon):
    """The exact probability of the uniform proxy: |S_j - j alpha| <= K for every j up to the horizon."""
    walk = _measure_walk(measure, psi, horizon, 'exact_uniform_probability')
    while True:
        walk.restrict_corridor(alpha, half_width)
        if walk.horizon >= horizon:
            break
        walk.advance()
    log_mass = walk.corridor_log_mass(alpha, half_width)
    return math.exp(log_mass) if math.isfinite(log_mass) else 0.0


def _lift_step(model, x, operation):
    """Apply the lift once; return (image, 0-based branch)."""
    whole = math.floor(x)
    fraction = x - whole
    for index, branch in enumerate(model.branches):
        right = branch.left + branch.contraction
        if abs(fraction - branch.left) < BOUNDARY_BAND or abs(fraction - right) < BOUNDARY_BAND:
            raise EscapeFromRepellerError("The point %r lies within %g of an endpoint of branch %d."
                                          % (x, BOUNDARY_BAND, index + 1), module='escape', operation=operation)
        if branch.left < fraction < right:
            return whole + branch.step + (fraction - branch.left) / branch.contraction, index
    raise EscapeFromRepellerError("The point %r lies in a gap between branches." % x,
                                  module='escape', operation=operation)


def iterate_interval_map(model, x0, horizon):
    """Return the orbit x_0, F(x_0), ..., F^n(x_0) of the lifted interval map."""
    assert isinstance(model, BranchModel)
    orbit = [float(x0)]
    for _ in range(horizon):
        image, _ = _lift_step(model, orbit[-1], 'iterate_interval_map')
        orbit.append(image)
    return np.array(orbit)


def conjugacy_check(model, prefix, level, horizon):
    """
    Iterate the lift from the point coded by (prefix, level) and return the largest distance over j <= n between
    F^j(x) - level - S_j psi and the point coded by the shifted prefix. Coded points are taken at the middle of their
    cylinders; affine branches carry middles to middles, so in exact arithmetic every distance is 0.
    """
    prefix = Word(prefix, model.alphabet_size)
    if horizon < 0 or horizon >= len(prefix):
        raise RangeError("The horizon must be shorter than the prefix.", module='escape', operation='conjugacy_check')
    width, left = cylinder_geometry(model, prefix)
    if width >= PRECISION_TARGET:
        raise PrecisionError("The prefix only locates its point to within %g; a longer prefix is needed." % width,
                             module='escape', operation='conjugacy_check')

    x = left + 0.5 * width + level
    lift = level
    deviation = 0.0
    for j in range(horizon + 1):
        tail_width, tail_left = cylinder_geometry(model, prefix[j:])
        deviation = max(deviation, abs(x - lift - (tail_left + 0.5 * tail_width)))
        if j == horizon:
            break
        x, _ = _lift_step(model, x, 'conjugacy_check')
        lift += model.branches[prefix[j] - 1].step
    return deviation


def cover_sum(model, alpha, half_width, horizon, s):
    """Return the sum of |pi[w]|^s over the words w of length n with |S_w psi - n alpha| <= K."""
    if s < 0:
        raise RangeError("The cover exponent must be non-negative.", module='escape', operation='cover_sum')
    table = corridor_partition(s * model.geometric_potential(), model.step_potential(), alpha, half_width, horizon)
    return table.zeta
