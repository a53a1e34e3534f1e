"""
Classical topological pressure of cylinder potentials, their Gibbs measures, Gibbs expectations and the Bowen root.

Depth-1 pressures are exact (log-sum-exp over the sub-alphabet). Depth-k pressures are the logarithm of the spectral
radius of the de Bruijn transfer matrix on (k-1)-words, found by power iteration. Pressure derivatives are always
Gibbs expectations and asymptotic covariances, never finite differences.
"""

import collections
import logging
import math

import numpy as np
from scipy.special import logsumexp

from pressurelab.config import get_settings
from pressurelab.enums import PressureMethod
from pressurelab.exceptions import AlphabetError, BudgetError, ConvergenceError, DepthError
from pressurelab.solvers import safeguarded_newton
from pressurelab.symbolic import BranchModel, CylinderPotential, all_words, window_indices

__author__ = 'pressurelab developers'
__all__ = [
    'SubAlphabet',
    'PressureValue',
    'GibbsMeasure',
    'classical_pressure',
    'gibbs_measure',
    'equilibrium',
    'gibbs_expectation',
    'gibbs_covariance',
    'measure_entropy',
    'bowen_delta',
    'empirical_pressure',
    'gibbs_constant',
]


_LOGGER = logging.getLogger(__name__)


class SubAlphabet(frozenset):
    """A non-empty set of 1-based symbols J, the alphabet of the compact subshift J^N."""

    def __new__(cls, symbols, alphabet_size=None):
        symbols = frozenset(int(symbol) for symbol in symbols)
        if not symbols:
            raise AlphabetError("A sub-alphabet must not be empty.", module='pressure', operation='SubAlphabet')
        if alphabet_size is not None and not all(1 <= symbol <= alphabet_size for symbol in symbols):
            raise AlphabetError("Sub-alphabet %r is not contained in {1, ..., %d}." % (sorted(symbols), alphabet_size),
                                module='pressure', operation='SubAlphabet')
        return super().__new__(cls, symbols)

    @classmethod
    def full(cls, alphabet_size):
        """The whole alphabet I."""
        return cls(range(1, alphabet_size + 1))

    def digits(self):
        """The sorted 0-based symbols."""
        return np.array(sorted(self), dtype=np.int64) - 1

    def __repr__(self):
        return 'SubAlphabet(%r)' % sorted(self)


PressureValue = collections.namedtuple('PressureValue', ['value', 'method', 'residual'])


class GibbsMeasure:
    """
    The shift-invariant Gibbs measure of a cylinder potential: a Bernoulli measure for depth 1 and a Markov measure
    with memory depth - 1 otherwise.
    """

    def __init__(self, weights, alphabet_size, depth, support, transitions=None):
        weights = np.array(weights, dtype=float)
        assert weights.size == alphabet_size ** depth
        assert abs(weights.sum() - 1.0) < 1e-9
        assert depth == 1 or transitions is not None
        weights.setflags(write=False)
        if transitions is not None:
            transitions = np.array(transitions, dtype=float)
            assert transitions.shape == (alphabet_size ** depth, alphabet_size)
            transitions.setflags(write=False)

        self._weights = weights
        self._alphabet_size = alphabet_size
        self._depth = depth
        self._support = support
        self._transitions = transitions

    @property
    def weights(self):
        """Masses of the depth-k cylinders, flat and lexicographic."""
        return self._weights

    @property
    def alphabet_size(self):
        """The number of symbols."""
        return self._alphabet_size

    @property
    def depth(self):
        """The depth of the cylinders carrying the state weights."""
        return self._depth

    @property
    def support(self):
        """The sub-alphabet J carrying the measure."""
        return self._support

    @property
    def transitions(self):
        """Row-stochastic next-symbol probabilities per depth-k state, or None for Bernoulli measures."""
        return self._transitions

    @property
    def is_dirac(self):
        """Whether the measure is the point mass on a constant sequence."""
        return len(self._support) == 1

    def next_symbol_table(self):
        """
        Return (memory, table): next-symbol probabilities conditioned on the last `memory` symbols, with one row per
        memory word.
        """
        if self._depth == 1:
            return 0, self._weights[None, :]
        memory = self._depth - 1
        return memory, self._transitions[:self._alphabet_size ** memory]

    def marginal(self, length):
        """Return the masses of all cylinders of the given length."""
        m = self._alphabet_size
        if length <= self._depth:
            return self._weights.reshape(m ** length, -1).sum(axis=1)
        memory, table = self.next_symbol_table()
        masses = self._weights
        for current in range(self._depth, length):
            rows = np.arange(m ** current) % (m ** memory) if memory else np.zeros(m ** current, dtype=np.int64)
            masses = (masses[:, None] * table[rows]).ravel()
        return masses

    def cylinder_mass(self, word):
        """Return mu([w]) for a 1-based word."""
        word = np.asarray(tuple(word), dtype=np.int64) - 1
        if word.size == 0:
            return 1.0
        index = window_indices(word[None, :], self._alphabet_size, word.size)[0, 0]
        return float(self.marginal(word.size)[index])

    def stationary_chain(self, length):
        """
        Return (pi, Q): the stationary distribution and transition matrix of the induced chain on words of the given
        length (at least the depth), where each step drops the first symbol and appends a new one.
        """
        assert length >= self._depth
        m = self._alphabet_size
        size = m ** length
        memory, table = self.next_symbol_table()
        states = np.arange(size)
        rows = states % (m ** memory) if memory else np.zeros(size, dtype=np.int64)
        chain = np.zeros((size, size))
        for symbol in range(m):
            chain[states, (states * m + symbol) % size] += table[rows, symbol]
        return self.marginal(length), chain

    def __repr__(self):
        return 'GibbsMeasure(depth=%d, support=%r, weights=%r)' % (self._depth, sorted(self._support),
                                                                   self._weights.tolist())


def _as_sub_alphabet(f, subset):
    if subset is None:
        return SubAlphabet.full(f.alphabet_size)
    if isinstance(subset, SubAlphabet):
        if not all(1 <= symbol <= f.alphabet_size for symbol in subset):
            raise AlphabetError("Sub-alphabet %r is not contained in the alphabet." % sorted(subset),
                                module='pressure', operation='classical_pressure')
        return subset
    return SubAlphabet(subset, f.alphabet_size)


def _transfer_matrix(f, subset):
    """Shifted transfer matrix on (k-1)-words over J, plus the data needed to map back to global cylinders."""
    k = f.depth
    m = f.alphabet_size
    symbols = subset.digits()
    local = all_words(len(symbols), k - 1)
    size = local.shape[0]
    shift = f.values.max()
    matrix = np.zeros((size, size))
    global_words = np.empty((size, len(symbols)), dtype=np.int64)
    for j in range(len(symbols)):
        extended = np.concatenate([symbols[local], np.full((size, 1), symbols[j])], axis=1)
        global_words[:, j] = window_indices(extended, m, k)[:, 0]
        successor = (np.arange(size) * len(symbols) + j) % size
        matrix[np.arange(size), successor] += np.exp(f.values[global_words[:, j]] - shift)
    return matrix, shift, global_words


def _power_iteration(matrix, operation):
    settings = get_settings()
    vector = np.full(matrix.shape[0], 1.0 / matrix.shape[0])
    estimate = math.nan
    for iteration in range(settings.power_max_iterations):
        image = matrix @ vector
        total = image.sum()
        residual = abs(total - estimate)
        estimate = total
        vector = image / total
        if residual < settings.power_tolerance * max(1.0, estimate):
            _LOGGER.debug("%s: spectral radius %r after %d iterations", operation, estimate, iteration + 1)
            return estimate, vector, residual
    raise ConvergenceError("Power iteration did not converge in %d iterations." % settings.power_max_iterations,
                           module='pressure', operation=operation)


def _solve(f, subset, need_measure):
    """Return (PressureValue, GibbsMeasure or None)."""
    assert isinstance(f, CylinderPotential)
    subset = _as_sub_alphabet(f, subset)
    m = f.alphabet_size
    k = f.depth

    if len(subset) == 1:
        (symbol,) = subset.digits()
        constant_word = window_indices(np.full((1, k), symbol), m, k)[0, 0]
        value = PressureValue(float(f.values[constant_word]), PressureMethod.EXACT_DEPTH1 if k == 1
                              else PressureMethod.SPECTRAL_DEPTHK, 0.0)
        measure = None
        if need_measure:
            weights = np.zeros(m ** k)
            weights[constant_word] = 1.0
            transitions = None
            if k > 1:
                transitions = np.zeros((m ** k, m))
                transitions[:, symbol] = 1.0
            measure = GibbsMeasure(weights, m, k, subset, transitions)
        return value, measure

    if k == 1:
        symbols = subset.digits()
        log_total = float(logsumexp(f.values[symbols]))
        measure = None
        if need_measure:
            weights = np.zeros(m)
            weights[symbols] = np.exp(f.values[symbols] - log_total)
            weights /= weights.sum()
            measure = GibbsMeasure(weights, m, 1, subset)
        return PressureValue(log_total, PressureMethod.EXACT_DEPTH1, 0.0), measure

    matrix, shift, global_words = _transfer_matrix(f, subset)
    radius, right, residual = _power_iteration(matrix, 'classical_pressure')
    value = PressureValue(float(math.log(radius) + shift), PressureMethod.SPECTRAL_DEPTHK, float(residual))
    if not need_measure:
        return value, None

    _, left, _ = _power_iteration(matrix.T, 'gibbs_measure')
    stationary = left * right
    stationary /= stationary.sum()
    size = matrix.shape[0]
    count = len(subset)
    local_table = np.empty((size, count))
    for j in range(count):
        successor = (np.arange(size) * count + j) % size
        local_table[:, j] = matrix[np.arange(size), successor] * right[successor] / (radius * right)
    local_table /= local_table.sum(axis=1, keepdims=True)

    weights = np.zeros(m ** k)
    weights[global_words.ravel()] = (stationary[:, None] * local_table).ravel()
    weights /= weights.sum()

    # Conditioning on the last k-1 symbols; rows for words leaving J are never reached and stay uniform over J.
    symbols = subset.digits()
    memory_table = np.zeros((m ** (k - 1), m))
    memory_table[:, symbols] = 1.0 / count
    memory_index = global_words[:, 0] // m
    memory_table[memory_index[:, None], symbols[None, :]] = local_table
    transitions = np.tile(memory_table, (m, 1))
    return value, GibbsMeasure(weights, m, k, subset, transitions)


def classical_pressure(f, subset=None):
    """
    Return the classical topological pressure P(f, J) = lim (1/n) log sum_{w in J^n} exp(S_w f).

    :param f: A CylinderPotential.
    :param subset: The sub-alphabet J (a SubAlphabet or an iterable of 1-based symbols); the full alphabet if None.
        For a singleton J = {i} the value is f on the constant sequence (i, i, ...).
    :return: A PressureValue.
    """
    value, _ = _solve(f, subset, need_measure=False)
    return value


def gibbs_measure(f, subset=None):
    """Return the Gibbs measure of f on J^N (the Dirac measure for a singleton J)."""
    _, measure = _solve(f, subset, need_measure=True)
    return measure


def equilibrium(f, subset=None):
    """Return (PressureValue, GibbsMeasure) of f on J^N from a single solve."""
    return _solve(f, subset, need_measure=True)


def _centred_values(measure, g, length):
    masses = measure.marginal(length)
    values = g.lift(length).values
    return masses, values - masses @ values


def gibbs_expectation(measure, g):
    """
    Return the integral of g against the Gibbs measure. For the Gibbs measure of f this is the derivative of
    t -> P(f + t g) at t = 0.
    """
    assert isinstance(measure, GibbsMeasure) and isinstance(g, CylinderPotential)
    if g.alphabet_size != measure.alphabet_size:
        raise DepthError("The potential and the measure live on different alphabets.",
                         module='pressure', operation='gibbs_expectation')
    length = max(measure.depth, g.depth)
    return float(measure.marginal(length) @ g.lift(length).values)


def gibbs_covariance(measure, g, h=None):
    """
    Return the asymptotic covariance of g and h (the variance of g when h is None) under the Gibbs measure. For the
    Gibbs measure of f this is the mixed second derivative of (t, u) -> P(f + t g + u h) at the origin.
    """
    h = g if h is None else h
    length = max(measure.depth, g.depth, h.depth)
    masses, g_centred = _centred_values(measure, g, length)
    _, h_centred = _centred_values(measure, h, length)
    lag_zero = float(masses @ (g_centred * h_centred))
    if measure.depth == 1 and length == 1:
        return lag_zero

    stationary, chain = measure.stationary_chain(length)
    size = chain.shape[0]
    fundamental = np.eye(size) - chain + np.outer(np.ones(size), stationary)
    g_sum = np.linalg.solve(fundamental, g_centred)
    h_sum = np.linalg.solve(fundamental, h_centred)
    forward = float(stationary @ (g_centred * (h_sum - h_centred)))
    backward = float(stationary @ (h_centred * (g_sum - g_centred)))
    return lag_zero + forward + backward


def measure_entropy(measure):
    """Return the measure-theoretic entropy of a Gibbs measure (Bernoulli or Markov), with 0 log 0 = 0."""
    if measure.depth == 1:
        probabilities = measure.weights[measure.weights > 0]
        return float(-(probabilities * np.log(probabilities)).sum())
    memory, table = measure.next_symbol_table()
    masses = measure.marginal(memory)
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(table > 0, table * np.log(table), 0.0)
    return float(-(masses @ terms.sum(axis=1)))


def bowen_delta(model):
    """
    Return the unique root delta of s -> P(s phi), the Hausdorff dimension of the repeller.
    """
    assert isinstance(model, BranchModel)
    phi = model.geometric_potential()

    def pressure_and_slope(s):
        value, measure = _solve(s * phi, None, need_measure=True)
        return value.value, gibbs_expectation(measure, phi)

    upper = 1.0
    while pressure_and_slope(upper)[0] > 0.0:
        upper *= 2.0
    delta = safeguarded_newton(pressure_and_slope, 0.0, upper, operation='bowen_delta')
    _LOGGER.debug("Bowen root %r for %r", delta, model)
    return delta


def _log_partition(f, length):
    """log sum_{w in I^n} exp(S_w f) by dynamic programming over (k-1)-word states, without enumeration."""
    k = f.depth
    m = f.alphabet_size
    if k == 1:
        return length * float(logsumexp(f.values))
    size = m ** (k - 1)
    state = np.zeros(size)
    for _ in range(length - k + 1):
        extended = (state[:, None] + f.values.reshape(size, m)).reshape(m, size // m, m)
        state = logsumexp(extended, axis=0).ravel()
    return float(logsumexp(state + f.tail_table))


def empirical_pressure(f, length, enumerate_words=None):
    """
    Return the finite-horizon quotient (1/n) log sum_{w in I^n} exp(S_w f).

    :param f: A CylinderPotential.
    :param length: The horizon n, at least the depth of f.
    :param enumerate_words: Force (True) or forbid (False) brute-force enumeration of I^n. By default words are
        enumerated when their number is within the configured cap, and summed by dynamic programming otherwise.
    :return: A PressureValue whose residual is the distance to the classical pressure.
    """
    assert isinstance(f, CylinderPotential)
    if length < f.depth:
        raise DepthError("The horizon must be at least the potential depth.",
                         module='pressure', operation='empirical_pressure')
    count = f.alphabet_size ** length
    cap = get_settings().enumeration_cap
    if enumerate_words is None:
        enumerate_words = count <= cap
    if enumerate_words:
        if count > cap:
            raise BudgetError("Enumerating %d words exceeds the cap of %d." % (count, cap),
                              module='pressure', operation='empirical_pressure')
        log_total = float(logsumexp(f.birkhoff_sums(all_words(f.alphabet_size, length))))
    else:
        log_total = _log_partition(f, length)
    value = log_total / length
    exact = classical_pressure(f).value
    return PressureValue(value, PressureMethod.EMPIRICAL_N, abs(value - exact))


def gibbs_constant(f, length):
    """
    Return the smallest c >= 1 with 1/c <= mu([w]) / exp(S_w f - n P(f)) <= c over all words of the given length.
    Depth-1 potentials give exactly 1.
    """
    measure = gibbs_measure(f)
    words = all_words(f.alphabet_size, length)
    count = words.shape[0]
    if count > get_settings().enumeration_cap:
        raise BudgetError("Enumerating %d words exceeds the cap." % count, module='pressure',
                          operation='gibbs_constant')
    pressure = classical_pressure(f).value
    masses = measure.marginal(length)
    ratios = np.log(masses) - (f.birkhoff_sums(words) - length * pressure)
    return float(math.exp(np.abs(ratios).max()))
