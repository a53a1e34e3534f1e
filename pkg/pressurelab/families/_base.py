"""
Base class for example families: parametrised branch models whose escape-rate spectrum is known in closed form.
"""

import math
import numbers
from abc import ABCMeta, abstractmethod

from pressurelab.enums import Orientation
from pressurelab.exceptions import RangeError
from pressurelab.symbolic import build_model

__author__ = 'pressurelab developers'


def binary_entropy(p):
    """-p log p - (1 - p) log (1 - p), with 0 log 0 = 0."""
    return -sum(x * math.log(x) for x in (p, 1.0 - p) if x > 0.0)


class ExampleFamily(metaclass=ABCMeta):
    """
    ExampleFamily is the abstract base class for closed-form example families. Each subclass knows how to build the
    branch model for a parameter tuple and how to evaluate the published formula for delta_alpha.

    The published formulas fix which branches carry which sign of step. The printed orientation builds models that
    way; the mirrored orientation negates every step, which maps delta_alpha to delta_{-alpha}.
    """

    # Orientation used when the family is built from a shorthand such as rw_0.4_0.6.
    shorthand_orientation = Orientation.PRINTED

    def __init__(self, name, shorthand, aliases=()):
        assert name and isinstance(name, str)
        assert shorthand and isinstance(shorthand, str) and '_' not in shorthand
        self._name = name
        self._shorthand = shorthand
        self._aliases = tuple(aliases)

    @property
    def name(self):
        """The name of the family."""
        return self._name

    @property
    def shorthand(self):
        """The prefix of model shorthands built from this family."""
        return self._shorthand

    @property
    def aliases(self):
        """Alternative names the family is registered under."""
        return self._aliases

    @property
    @abstractmethod
    def parameter_names(self):
        """The names of the parameters, in order."""
        raise NotImplementedError()

    def validate(self, params):
        """
        Check a parameter tuple (or a dictionary keyed by parameter name) and return it as a tuple.

        :raise RangeError: If the parameters are outside the family's domain.
        """
        if isinstance(params, dict):
            unknown = set(params) - set(self.parameter_names)
            missing = set(self.parameter_names) - set(params)
            if unknown or missing:
                raise RangeError("Family %s takes parameters %s." % (self._name, ', '.join(self.parameter_names)),
                                 module='families', operation='validate')
            params = [params[name] for name in self.parameter_names]
        params = tuple(params)
        if len(params) != len(self.parameter_names):
            raise RangeError("Family %s takes %d parameters (%s), got %d." % (
                self._name, len(self.parameter_names), ', '.join(self.parameter_names), len(params)),
                module='families', operation='validate')
        for name, value in zip(self.parameter_names, params):
            if isinstance(value, bool) or not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise RangeError("Parameter %s = %r is not a finite number." % (name, value),
                                 module='families', operation='validate')
        self._check(params)
        return params

    def _fail(self, message):
        raise RangeError("Family %s: %s" % (self._name, message), module='families', operation='validate')

    @abstractmethod
    def _check(self, params):
        """Raise RangeError for parameters outside the family's domain."""
        raise NotImplementedError()

    @abstractmethod
    def _branches(self, params):
        """The (contraction, step) pairs of the printed orientation."""
        raise NotImplementedError()

    @abstractmethod
    def _delta(self, alpha, params):
        """The published formula for delta_alpha, printed orientation, alpha strictly inside the support."""
        raise NotImplementedError()

    def support(self, params, orientation=Orientation.PRINTED):
        """The range of step averages of the family's model."""
        steps = [step for _, step in self._branches(self.validate(params))]
        if orientation == Orientation.MIRRORED:
            steps = [-step for step in steps]
        return float(min(steps)), float(max(steps))

    def build_model(self, params, orientation=Orientation.PRINTED, potential_depth=1):
        """Return the branch model for the parameters, with left endpoints packed from 0."""
        assert Orientation.is_valid(orientation)
        params = self.validate(params)
        sign = -1 if orientation == Orientation.MIRRORED else 1
        name = '%s_%s' % (self._shorthand, '_'.join('%g' % value for value in params))
        return build_model([(c, sign * step) for c, step in self._branches(params)], potential_depth, name)

    def delta(self, alpha, params, orientation=Orientation.PRINTED):
        """
        Evaluate the closed-form delta_alpha. Values of alpha outside the support give 0.
        """
        assert Orientation.is_valid(orientation)
        params = self.validate(params)
        if orientation == Orientation.MIRRORED:
            alpha = -alpha
        lower, upper = self.support(params)
        if not lower <= alpha <= upper:
            return 0.0
        return self._delta(alpha, params)

    def __repr__(self):
        return '<%s %s>' % (type(self).__name__, self._name)
