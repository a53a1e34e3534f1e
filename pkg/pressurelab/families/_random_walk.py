"""
Two branches with steps +1 and -1: the lift is a random walk with step probabilities given by the Gibbs weights.
"""

import math

from pressurelab.enums import Orientation
from pressurelab.families._base import ExampleFamily, binary_entropy
from pressurelab.families import REGISTRY

__author__ = 'pressurelab developers'


class RandomWalkFamily(ExampleFamily):
    """
    Contractions (c1, c2). In the printed orientation branch 1 carries step +1 and

        delta_alpha = H(p) / (p log(1/c1) + (1 - p) log(1/c2)),   p = (1 + alpha) / 2.

    Shorthands rw_<c1>_<c2> follow the random walk convention, where branch 1 steps down.
    """

    shorthand_orientation = Orientation.MIRRORED

    def __init__(self):
        super().__init__('random-walk', 'rw', aliases=('A',))

    @property
    def parameter_names(self):
        return 'c1', 'c2'

    def _check(self, params):
        c1, c2 = params
        if not (0.0 < c1 < 1.0 and 0.0 < c2 < 1.0):
            self._fail("contractions must lie in (0, 1).")
        if c1 + c2 > 1.0 + 1e-12:
            self._fail("contractions must sum to at most 1.")

    def _branches(self, params):
        c1, c2 = params
        return [(c1, 1), (c2, -1)]

    def _delta(self, alpha, params):
        c1, c2 = params
        p = (1.0 + alpha) / 2.0
        return binary_entropy(p) / (p * math.log(1.0 / c1) + (1.0 - p) * math.log(1.0 / c2))

    def delta0(self, params):
        """The recurrent dimension log 4 / (log(1/c1) + log(1/c2))."""
        c1, c2 = self.validate(params)
        return math.log(4.0) / (math.log(1.0 / c1) + math.log(1.0 / c2))

    def fibre_pressure(self, t, params):
        """The fibre-induced pressure of t phi along the steps: log 2 + t (log c1 + log c2) / 2."""
        c1, c2 = self.validate(params)
        return math.log(2.0) + t * (math.log(c1) + math.log(c2)) / 2.0


RANDOM_WALK = RandomWalkFamily()
REGISTRY.add(RANDOM_WALK)
