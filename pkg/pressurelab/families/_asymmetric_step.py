"""
Two branches of equal contraction c with integer steps m1 < m2.
"""

import math

from pressurelab.families._base import ExampleFamily, binary_entropy
from pressurelab.families import REGISTRY

__author__ = 'pressurelab developers'


class AsymmetricStepFamily(ExampleFamily):
    """
    Parameters (c, m1, m2):

        delta_alpha = H((alpha - m1) / (m2 - m1)) / log(1/c),   m1 <= alpha <= m2.
    """

    def __init__(self):
        super().__init__('asymmetric-step', 'step', aliases=('B',))

    @property
    def parameter_names(self):
        return 'c', 'm1', 'm2'

    def _check(self, params):
        c, m1, m2 = params
        if not 0.0 < c <= 0.5:
            self._fail("the contraction must lie in (0, 1/2].")
        if m1 != int(m1) or m2 != int(m2):
            self._fail("steps must be integers.")
        if not m1 < m2:
            self._fail("steps must satisfy m1 < m2.")

    def _branches(self, params):
        c, m1, m2 = params
        return [(c, int(m1)), (c, int(m2))]

    def _delta(self, alpha, params):
        c, m1, m2 = params
        return binary_entropy((alpha - m1) / (m2 - m1)) / math.log(1.0 / c)


ASYMMETRIC_STEP = AsymmetricStepFamily()
REGISTRY.add(ASYMMETRIC_STEP)
