"""
g1 + g2 branches of equal contraction c: g1 of them step down by one, g2 step up by one.
"""

import math

from pressurelab.families._base import ExampleFamily
from pressurelab.families import REGISTRY

__author__ = 'pressurelab developers'


class MultiBranchFamily(ExampleFamily):
    """
    Parameters (c, g1, g2) with (g1 + g2) c <= 1:

        delta_alpha = -(g1 x log x + g2 y log y) / log(1/c),   x = (1 - alpha) / (2 g1),  y = (1 + alpha) / (2 g2).

    At alpha = 1 only the g2 up-steps remain and delta_1 = log g2 / log(1/c).
    """

    def __init__(self):
        super().__init__('multi-branch', 'branches', aliases=('C',))

    @property
    def parameter_names(self):
        return 'c', 'g1', 'g2'

    def _check(self, params):
        c, g1, g2 = params
        if not 0.0 < c < 1.0:
            self._fail("the contraction must lie in (0, 1).")
        if g1 != int(g1) or g2 != int(g2) or g1 < 1 or g2 < 1:
            self._fail("branch counts must be positive integers.")
        if (g1 + g2) * c > 1.0 + 1e-12:
            self._fail("1/c must be at least g1 + g2.")

    def _branches(self, params):
        c, g1, g2 = params
        return [(c, -1)] * int(g1) + [(c, 1)] * int(g2)

    def _delta(self, alpha, params):
        c, g1, g2 = params
        x = (1.0 - alpha) / (2.0 * g1)
        y = (1.0 + alpha) / (2.0 * g2)
        total = sum(g * p * math.log(p) for g, p in ((g1, x), (g2, y)) if p > 0.0)
        return -total / math.log(1.0 / c)


MULTI_BRANCH = MultiBranchFamily()
REGISTRY.add(MULTI_BRANCH)
