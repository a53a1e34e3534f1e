"""
Symbolic core: the full shift over a finite alphabet, affine branch systems, cylinder-constant potentials, Birkhoff
sums and the range of asymptotic step averages.

Symbols are 1-based in the public API (words over {1, ..., |I|}) and 0-based internally. A depth-k potential stores
its values in a flat array indexed lexicographically by the first k symbols, most significant symbol first.
"""

import collections
import functools
import logging
import math
import numbers

import numpy as np

from pressurelab.config import get_settings
from pressurelab.exceptions import AlphabetError, RangeError, OverlapError, DepthError, WidthError

__author__ = 'pressurelab developers'
__all__ = [
    'Branch',
    'BranchModel',
    'CylinderPotential',
    'Word',
    'PsiBounds',
    'build_model',
    'birkhoff_sum',
    'cylinder_geometry',
    'psi_bounds',
    'all_words',
]


_LOGGER = logging.getLogger(__name__)

# Tolerance applied to the sum of contraction ratios and to interval overlaps.
PACKING_TOLERANCE = 1e-12


Branch = collections.namedtuple('Branch', ['contraction', 'step', 'left'])


class PsiBounds(collections.namedtuple('PsiBounds', ['lower', 'upper'])):
    """The range [lower, upper] of asymptotic step averages."""

    __slots__ = ()

    def contains(self, value, tolerance=0.0):
        """Return whether the value lies in the closed range."""
        return self.lower - tolerance <= value <= self.upper + tolerance

    def contains_interior(self, value, tolerance=0.0):
        """Return whether the value lies strictly inside the range."""
        return self.lower + tolerance < value < self.upper - tolerance

    @property
    def width(self):
        """The length of the range."""
        return self.upper - self.lower


def all_words(alphabet_size, length):
    """
    Return every word of the given length as a row of 0-based symbols, in lexicographic order.

    :param alphabet_size: The number of symbols.
    :param length: The word length.
    :return: An integer array of shape (alphabet_size ** length, length).
    """
    assert alphabet_size >= 1 and length >= 0
    indices = np.arange(alphabet_size ** length, dtype=np.int64)
    powers = alphabet_size ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % alphabet_size


def window_indices(digits, alphabet_size, depth):
    """Return the flat cylinder index of every length-depth window of each row of 0-based symbols."""
    digits = np.asarray(digits, dtype=np.int64)
    count = digits.shape[1] - depth + 1
    assert count >= 0
    indices = np.zeros((digits.shape[0], count), dtype=np.int64)
    for offset in range(depth):
        indices = indices * alphabet_size + digits[:, offset:offset + count]
    return indices


class Word(tuple):
    """
    A finite word over the alphabet {1, ..., alphabet_size}. The empty word is permitted.
    """

    def __new__(cls, symbols=(), alphabet_size=None):
        symbols = tuple(int(symbol) for symbol in symbols)
        if alphabet_size is not None:
            for symbol in symbols:
                if not 1 <= symbol <= alphabet_size:
                    raise AlphabetError("Symbol %d is outside the alphabet {1, ..., %d}." % (symbol, alphabet_size),
                                        module='symbolic', operation='Word')
        return super().__new__(cls, symbols)

    def digits(self):
        """Return the 0-based symbols as an integer array."""
        return np.asarray(self, dtype=np.int64) - 1

    def __repr__(self):
        return 'Word(' + repr(tuple(self)) + ')'


class CylinderPotential:
    """
    A real-valued function on the full shift that is constant on cylinders of a fixed depth.
    """

    # Makes numpy scalars defer to the reflected operators below.
    __array_ufunc__ = None

    def __init__(self, values, alphabet_size, depth=1):
        assert isinstance(alphabet_size, int) and alphabet_size >= 1
        assert isinstance(depth, int) and depth >= 1

        values = np.array(values, dtype=float).ravel()
        if values.size != alphabet_size ** depth:
            raise DepthError("A depth-%d potential over %d symbols needs %d values, got %d."
                             % (depth, alphabet_size, alphabet_size ** depth, values.size),
                             module='symbolic', operation='CylinderPotential')
        if not np.all(np.isfinite(values)):
            raise RangeError("Potential values must be finite.", module='symbolic', operation='CylinderPotential')
        values.setflags(write=False)

        self._values = values
        self._alphabet_size = alphabet_size
        self._depth = depth

    @classmethod
    def from_symbols(cls, values):
        """Create a depth-1 potential from one value per symbol."""
        values = list(values)
        return cls(values, len(values), 1)

    @classmethod
    def from_table(cls, table, alphabet_size):
        """Create a potential from a mapping of equal-length words (1-based tuples) to values."""
        assert table
        depth = len(next(iter(table)))
        values = np.empty(alphabet_size ** depth)
        filled = np.zeros(alphabet_size ** depth, dtype=bool)
        for word, value in table.items():
            word = Word(word, alphabet_size)
            if len(word) != depth:
                raise DepthError("All cylinder words must have the same length.",
                                 module='symbolic', operation='CylinderPotential.from_table')
            index = int(window_indices(word.digits()[None, :], alphabet_size, depth)[0, 0])
            values[index] = value
            filled[index] = True
        if not filled.all():
            raise DepthError("The value table must cover every cylinder.",
                             module='symbolic', operation='CylinderPotential.from_table')
        return cls(values, alphabet_size, depth)

    @classmethod
    def constant(cls, value, alphabet_size, depth=1):
        """Create a constant potential."""
        return cls(np.full(alphabet_size ** depth, float(value)), alphabet_size, depth)

    @property
    def alphabet_size(self):
        """The number of symbols."""
        return self._alphabet_size

    @property
    def depth(self):
        """The cylinder depth on which the potential is constant."""
        return self._depth

    @property
    def values(self):
        """The read-only flat value table."""
        return self._values

    def table(self):
        """Return the value table as a dictionary keyed by 1-based words."""
        words = all_words(self._alphabet_size, self._depth) + 1
        return {tuple(int(symbol) for symbol in word): float(value) for word, value in zip(words, self._values)}

    def value(self, word):
        """Return the value on the cylinder of the given word, which must be at least as long as the depth."""
        word = Word(word, self._alphabet_size)
        if len(word) < self._depth:
            raise DepthError("Word %r is shorter than the potential depth %d." % (tuple(word), self._depth),
                             module='symbolic', operation='CylinderPotential.value')
        index = window_indices(word.digits()[None, :self._depth], self._alphabet_size, self._depth)[0, 0]
        return float(self._values[index])

    def max(self):
        """The maximum value."""
        return float(self._values.max())

    def min(self):
        """The minimum value."""
        return float(self._values.min())

    def lift(self, depth):
        """Return the same function represented on cylinders of a greater depth."""
        assert depth >= self._depth
        if depth == self._depth:
            return self
        return CylinderPotential(np.repeat(self._values, self._alphabet_size ** (depth - self._depth)),
                                 self._alphabet_size, depth)

    def is_first_symbol_only(self):
        """Return whether the potential only depends on the first symbol."""
        if self._depth == 1:
            return True
        grouped = self._values.reshape(self._alphabet_size, -1)
        return bool(np.all(grouped == grouped[:, :1]))

    def first_symbol_values(self):
        """Return the per-symbol values of a potential that only depends on the first symbol."""
        if not self.is_first_symbol_only():
            raise DepthError("The potential depends on more than the first symbol.",
                             module='symbolic', operation='CylinderPotential.first_symbol_values')
        return self._values.reshape(self._alphabet_size, -1)[:, 0].copy()

    def shifted(self, amount):
        """Return the potential minus a constant, e.g. the drift-corrected step potential psi - alpha."""
        return CylinderPotential(self._values - amount, self._alphabet_size, self._depth)

    @functools.cached_property
    def tail_table(self):
        """
        For each (depth-1)-word u, the maximum over completions of the Birkhoff terms that start inside u. This is the
        supremum part of the Birkhoff sum of a word ending in u.
        """
        k = self._depth
        if k == 1:
            return np.zeros(1)
        words = all_words(self._alphabet_size, 2 * k - 2)
        sums = self._values[window_indices(words, self._alphabet_size, k)].sum(axis=1)
        return sums.reshape(self._alphabet_size ** (k - 1), -1).max(axis=1)

    def birkhoff_sums(self, digits):
        """
        Return the Birkhoff sums of many words of equal length at once.

        :param digits: An integer array of 0-based symbols with one word per row.
        :return: A float array with one sum per row.
        """
        digits = np.asarray(digits, dtype=np.int64)
        if digits.ndim == 1:
            digits = digits[None, :]
        length = digits.shape[1]
        if length == 0:
            return np.zeros(digits.shape[0])
        if length < self._depth:
            raise DepthError("Birkhoff sums of a depth-%d potential need words of length at least %d."
                             % (self._depth, self._depth), module='symbolic', operation='birkhoff_sum')
        total = self._values[window_indices(digits, self._alphabet_size, self._depth)].sum(axis=1)
        if self._depth > 1:
            suffix = window_indices(digits[:, length - self._depth + 1:], self._alphabet_size, self._depth - 1)
            total = total + self.tail_table[suffix[:, 0]]
        return total

    def _coerce(self, other):
        if isinstance(other, CylinderPotential):
            if other.alphabet_size != self._alphabet_size:
                raise DepthError("Potentials over different alphabets cannot be combined.",
                                 module='symbolic', operation='CylinderPotential')
            depth = max(self._depth, other.depth)
            return self.lift(depth)._values, other.lift(depth)._values, depth
        if isinstance(other, numbers.Real):
            return self._values, float(other), self._depth
        return None

    def __add__(self, other):
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        left, right, depth = coerced
        return CylinderPotential(left + right, self._alphabet_size, depth)

    __radd__ = __add__

    def __sub__(self, other):
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        left, right, depth = coerced
        return CylinderPotential(left - right, self._alphabet_size, depth)

    def __mul__(self, other):
        if not isinstance(other, numbers.Real):
            return NotImplemented
        return CylinderPotential(self._values * float(other), self._alphabet_size, self._depth)

    __rmul__ = __mul__

    def __neg__(self):
        return CylinderPotential(-self._values, self._alphabet_size, self._depth)

    def same_as(self, other, tolerance=0.0):
        """Return whether two potentials define the same function."""
        if not isinstance(other, CylinderPotential) or other.alphabet_size != self._alphabet_size:
            return False
        left, right, _ = self._coerce(other)
        return bool(np.allclose(left, right, rtol=0.0, atol=tolerance))

    def __repr__(self):
        return 'CylinderPotential(%r, alphabet_size=%d, depth=%d)' % (self._values.tolist(), self._alphabet_size,
                                                                     self._depth)


class BranchModel:
    """
    An expanding interval map with affine full branches, together with the integer step attached to each branch.
    Use build_model() to construct validated instances.
    """

    def __init__(self, branches, potential_depth=1, name=None):
        branches = tuple(Branch(float(c), int(m), float(a)) for c, m, a in branches)
        assert len(branches) >= 2
        assert isinstance(potential_depth, int) and potential_depth >= 1

        self._branches = branches
        self._potential_depth = potential_depth
        self._name = name

    @property
    def branches(self):
        """The branches, in symbol order."""
        return self._branches

    @property
    def alphabet_size(self):
        """The number of branches."""
        return len(self._branches)

    @property
    def contractions(self):
        """The contraction ratios c_i."""
        return np.array([branch.contraction for branch in self._branches])

    @property
    def steps(self):
        """The integer steps m_i."""
        return np.array([branch.step for branch in self._branches], dtype=np.int64)

    @property
    def lefts(self):
        """The left endpoints a_i of the branch intervals."""
        return np.array([branch.left for branch in self._branches])

    @property
    def potential_depth(self):
        """The cylinder depth on which derived potentials are represented."""
        return self._potential_depth

    @property
    def name(self):
        """An optional human-readable name."""
        return self._name

    def geometric_potential(self):
        """The geometric potential phi, equal to log c_i on the cylinder [i]."""
        phi = CylinderPotential(np.log(self.contractions), self.alphabet_size, 1)
        return phi.lift(self._potential_depth)

    def step_potential(self):
        """The symbolic step length function psi, equal to m_i on the cylinder [i]."""
        psi = CylinderPotential(self.steps.astype(float), self.alphabet_size, 1)
        return psi.lift(self._potential_depth)

    def psi_bounds(self):
        """The range of asymptotic step averages."""
        return PsiBounds(float(self.steps.min()), float(self.steps.max()))

    def with_steps(self, steps):
        """Return the same interval map carrying different steps."""
        steps = list(steps)
        assert len(steps) == self.alphabet_size
        return BranchModel([(b.contraction, m, b.left) for b, m in zip(self._branches, steps)],
                           self._potential_depth, self._name)

    def to_dict(self):
        """Return the model in the model file layout."""
        record = {
            'branches': [{'c': b.contraction, 'step': b.step, 'left': b.left} for b in self._branches],
            'potential_depth': self._potential_depth,
        }
        if self._name is not None:
            record['name'] = self._name
        return record

    def __repr__(self):
        return 'BranchModel(%r, potential_depth=%d%s)' % (
            [tuple(branch) for branch in self._branches],
            self._potential_depth,
            '' if self._name is None else ', name=%r' % self._name
        )


def _as_branch_spec(spec):
    if isinstance(spec, dict):
        unknown = set(spec) - {'c', 'step', 'left'}
        if unknown:
            raise RangeError("Unknown branch fields: %s" % ', '.join(sorted(unknown)),
                             module='symbolic', operation='build_model')
        return spec.get('c'), spec.get('step'), spec.get('left')
    spec = tuple(spec)
    if len(spec) == 2:
        return spec[0], spec[1], None
    if len(spec) == 3:
        return spec
    raise RangeError("A branch is given as (c, step) or (c, step, left), got %r." % (spec,),
                     module='symbolic', operation='build_model')


def build_model(specs, potential_depth=1, name=None):
    """
    Validate raw branch specifications and build a BranchModel.

    :param specs: A sequence of (c, step), (c, step, left) tuples or {'c', 'step', 'left'} dictionaries. Omitted
        left endpoints are packed left to right: branch i starts at the sum of the preceding contractions.
    :param potential_depth: The cylinder depth for derived potentials.
    :param name: An optional model name.
    :return: A BranchModel.
    """
    specs = [_as_branch_spec(spec) for spec in specs]
    if len(specs) < 2:
        raise AlphabetError("A branch model needs at least two branches, got %d." % len(specs),
                            module='symbolic', operation='build_model')
    if not isinstance(potential_depth, int) or potential_depth < 1:
        raise RangeError("The potential depth must be a positive integer.",
                         module='symbolic', operation='build_model')

    branches = []
    packed = 0.0
    for index, (contraction, step, left) in enumerate(specs, 1):
        if contraction is None or not isinstance(contraction, numbers.Real) or not 0.0 < contraction < 1.0:
            raise RangeError("Branch %d: contraction %r is not in (0, 1)." % (index, contraction),
                             module='symbolic', operation='build_model')
        if isinstance(step, bool) or not isinstance(step, numbers.Real) or step != math.floor(step):
            raise RangeError("Branch %d: step %r is not an integer." % (index, step),
                             module='symbolic', operation='build_model')
        if left is None:
            left = packed
        elif not isinstance(left, numbers.Real):
            raise RangeError("Branch %d: left endpoint %r is not a number." % (index, left),
                             module='symbolic', operation='build_model')
        branches.append((float(contraction), int(step), float(left)))
        packed += float(contraction)

    total = math.fsum(branch[0] for branch in branches)
    if total > 1.0 + PACKING_TOLERANCE:
        raise RangeError("The contractions sum to %r > 1." % total, module='symbolic', operation='build_model')

    ordered = sorted(range(len(branches)), key=lambda i: branches[i][2])
    previous_right = 0.0
    for i in ordered:
        contraction, _, left = branches[i]
        if left < -PACKING_TOLERANCE or left + contraction > 1.0 + PACKING_TOLERANCE:
            raise OverlapError("Branch %d leaves the unit interval." % (i + 1),
                               module='symbolic', operation='build_model')
        if left < previous_right - PACKING_TOLERANCE:
            raise OverlapError("Branch %d overlaps its left neighbour." % (i + 1),
                               module='symbolic', operation='build_model')
        previous_right = left + contraction

    model = BranchModel(branches, potential_depth, name)
    _LOGGER.debug("Built %r", model)
    return model


def birkhoff_sum(f, word):
    """
    Return S_w f, the supremum over the cylinder [w] of the Birkhoff sum of length |w|. For a depth-k potential the
    final k-1 terms are maximised over all completions of the word. The empty word has sum 0.
    """
    assert isinstance(f, CylinderPotential)
    word = Word(word, f.alphabet_size)
    if not word:
        return 0.0
    return float(f.birkhoff_sums(word.digits()[None, :])[0])


def cylinder_geometry(model, word):
    """
    Return (length, left) of the interval pi[w] = h_{w_1} o ... o h_{w_n}([0, 1]), where h_i(x) = a_i + c_i x.
    """
    assert isinstance(model, BranchModel)
    word = Word(word, model.alphabet_size)
    length = 1.0
    left = 0.0
    for symbol in reversed(word):
        branch = model.branches[symbol - 1]
        left = branch.left + branch.contraction * left
    for symbol in word:
        length *= model.branches[symbol - 1].contraction
    return length, left


def _karp_minimum_mean(weights, alphabet_size):
    """Minimum mean cycle weight of the de Bruijn graph whose nodes carry the given weights (Karp's algorithm)."""
    size = weights.size
    d = np.full((size + 1, size), np.inf)
    d[0, 0] = 0.0
    for step in range(size):
        reach = (d[step] + weights).reshape(alphabet_size, size // alphabet_size).min(axis=0)
        d[step + 1] = np.repeat(reach, alphabet_size)
    lengths = (size - np.arange(size, dtype=float))[:, None]
    with np.errstate(invalid='ignore'):
        ratios = (d[size][None, :] - d[:size]) / lengths
    ratios = np.where(np.isfinite(d[:size]), ratios, -np.inf)
    worst = ratios.max(axis=0)
    return float(worst[np.isfinite(d[size])].min())


def psi_bounds(psi):
    """
    Return the range [lower, upper] of asymptotic averages S_n psi / n. For depth-1 potentials these are the extreme
    values; for deeper potentials they are the extreme mean cycle weights of the de Bruijn graph on depth-k words.
    """
    assert isinstance(psi, CylinderPotential)
    if psi.depth == 1 or psi.is_first_symbol_only():
        return PsiBounds(psi.min(), psi.max())
    size = psi.values.size
    if size * (size + 1) > get_settings().width_cap:
        raise WidthError("The de Bruijn graph on %d states is too large for the mean cycle search." % size,
                         module='symbolic', operation='psi_bounds')
    lower = _karp_minimum_mean(psi.values, psi.alphabet_size)
    upper = -_karp_minimum_mean(-psi.values, psi.alphabet_size)
    return PsiBounds(lower, upper)
