import math
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from pressurelab.exceptions import AlphabetError, DepthError, OverlapError, RangeError
from pressurelab.symbolic import (CylinderPotential, Word, all_words, birkhoff_sum, build_model, cylinder_geometry,
                                  psi_bounds)


words = st.lists(st.integers(min_value=1, max_value=3), max_size=12)


class BuildModelTestCase(unittest.TestCase):

    def test_auto_packed_random_walk(self):
        model = build_model([(0.5, -1), (0.5, 1)])
        self.assertEqual(model.alphabet_size, 2)
        self.assertEqual(list(model.lefts), [0.0, 0.5])
        self.assertTrue(np.allclose(model.geometric_potential().values, [math.log(0.5)] * 2))
        self.assertEqual(list(model.step_potential().values), [-1.0, 1.0])

    def test_contractions_summing_past_one(self):
        with self.assertRaises(RangeError):
            build_model([(0.6, -1), (0.6, 1)])

    def test_three_branch_cantor_model(self):
        model = build_model([(1 / 3, -1), (1 / 3, 1), (1 / 3, 1)])
        self.assertEqual(model.alphabet_size, 3)
        self.assertAlmostEqual(model.lefts[2], 2 / 3)

    def test_single_branch(self):
        with self.assertRaises(AlphabetError):
            build_model([(0.5, 1)])

    def test_non_integer_step(self):
        with self.assertRaises(RangeError):
            build_model([(0.5, 0.5), (0.5, 1)])

    def test_overlapping_branches(self):
        with self.assertRaises(OverlapError):
            build_model([(0.4, -1, 0.0), (0.4, 1, 0.3)])

    def test_branch_leaving_unit_interval(self):
        with self.assertRaises(OverlapError):
            build_model([(0.4, -1, 0.0), (0.4, 1, 0.7)])

    def test_dictionary_specs_and_depth(self):
        model = build_model([{'c': 0.4, 'step': -1}, {'c': 0.6, 'step': 1}], potential_depth=2, name='walk')
        self.assertEqual(model.geometric_potential().depth, 2)
        self.assertEqual(model.name, 'walk')
        self.assertEqual(model.to_dict()['branches'][1], {'c': 0.6, 'step': 1, 'left': 0.4})


class BirkhoffSumTestCase(unittest.TestCase):

    def setUp(self):
        self.model = build_model([(0.5, -1), (0.5, 1)])

    def test_geometric_sum(self):
        self.assertAlmostEqual(birkhoff_sum(self.model.geometric_potential(), (1, 2)), math.log(0.25))

    def test_step_sums(self):
        psi = self.model.step_potential()
        self.assertEqual(birkhoff_sum(psi, (1, 2)), 0.0)
        self.assertEqual(birkhoff_sum(psi, (2, 2, 2)), 3.0)

    def test_empty_word(self):
        self.assertEqual(birkhoff_sum(self.model.step_potential(), ()), 0.0)

    def test_symbol_outside_alphabet(self):
        with self.assertRaises(AlphabetError):
            birkhoff_sum(self.model.step_potential(), (1, 3))

    def test_word_shorter_than_depth(self):
        f = CylinderPotential([1.0, 2.0, 3.0, 4.0], 2, 2)
        with self.assertRaises(DepthError):
            birkhoff_sum(f, (1,))

    def test_depth_two_uses_supremum_tail(self):
        f = CylinderPotential.from_table({(1, 1): 1.0, (1, 2): 5.0, (2, 1): 2.0, (2, 2): 0.0}, 2)
        # Window 11, then the last symbol 1 continues at best with 12.
        self.assertEqual(birkhoff_sum(f, (1, 1)), 6.0)
        self.assertEqual(birkhoff_sum(f, (2, 1, 2)), 7.0)

    @settings(max_examples=50, deadline=None)
    @given(words, words)
    def test_depth_one_additivity(self, u, v):
        f = CylinderPotential([0.3, -1.2, 2.5], 3)
        self.assertAlmostEqual(birkhoff_sum(f, u + v), birkhoff_sum(f, u) + birkhoff_sum(f, v))

    @settings(max_examples=50, deadline=None)
    @given(words.filter(lambda w: len(w) >= 2), words.filter(lambda w: len(w) >= 2))
    def test_depth_two_subadditivity(self, u, v):
        f = CylinderPotential(np.linspace(-1.0, 1.0, 9), 3, 2)
        self.assertLessEqual(birkhoff_sum(f, u + v), birkhoff_sum(f, u) + birkhoff_sum(f, v) + 1e-12)


class CylinderGeometryTestCase(unittest.TestCase):

    def test_nested_left_branch(self):
        model = build_model([(0.5, -1), (0.5, 1)])
        self.assertEqual(cylinder_geometry(model, (1, 1)), (0.25, 0.0))

    def test_empty_word(self):
        model = build_model([(0.5, -1), (0.5, 1)])
        self.assertEqual(cylinder_geometry(model, ()), (1.0, 0.0))

    def test_composed_affine_maps(self):
        model = build_model([(0.4, -1, 0.0), (0.6, 1, 0.4)])
        length, left = cylinder_geometry(model, (2, 1))
        self.assertAlmostEqual(length, 0.24)
        self.assertAlmostEqual(left, 0.4)

    @settings(max_examples=50, deadline=None)
    @given(words.filter(bool))
    def test_cylinders_nest(self, word):
        model = build_model([(0.2, -1), (0.3, 0), (0.4, 1)])
        length, left = cylinder_geometry(model, word)
        parent_length, parent_left = cylinder_geometry(model, word[:-1])
        self.assertGreaterEqual(left, parent_left - 1e-15)
        self.assertLessEqual(left + length, parent_left + parent_length + 1e-15)


class PsiBoundsTestCase(unittest.TestCase):

    def test_depth_one(self):
        self.assertEqual(tuple(psi_bounds(CylinderPotential.from_symbols([-1, 1]))), (-1.0, 1.0))
        self.assertEqual(tuple(psi_bounds(CylinderPotential.from_symbols([0, 1]))), (0.0, 1.0))

    def test_depth_two_mean_cycles(self):
        psi = CylinderPotential.from_table({(1, 1): -1, (1, 2): 0, (2, 1): 0, (2, 2): -1}, 2)
        bounds = psi_bounds(psi)
        self.assertAlmostEqual(bounds.lower, -1.0)
        self.assertAlmostEqual(bounds.upper, 0.0)

    def test_lifted_potential_keeps_bounds(self):
        psi = CylinderPotential.from_symbols([-2, 3]).lift(3)
        self.assertEqual(tuple(psi_bounds(psi)), (-2.0, 3.0))


class CylinderPotentialTestCase(unittest.TestCase):

    def test_wrong_table_size(self):
        with self.assertRaises(DepthError):
            CylinderPotential([1.0, 2.0, 3.0], 2, 2)

    def test_arithmetic_lifts_to_common_depth(self):
        f = CylinderPotential.from_symbols([1.0, 2.0])
        g = CylinderPotential([0.0, 1.0, 2.0, 3.0], 2, 2)
        total = 2 * f + g - 1.0
        self.assertEqual(total.depth, 2)
        self.assertEqual(list(total.values), [1.0, 2.0, 5.0, 6.0])

    def test_numpy_scalar_multiplication(self):
        f = CylinderPotential.from_symbols([1.0, -1.0])
        self.assertIsInstance(np.float64(2.0) * f, CylinderPotential)

    def test_first_symbol_values(self):
        f = CylinderPotential.from_symbols([1.0, 2.0]).lift(2)
        self.assertTrue(f.is_first_symbol_only())
        self.assertEqual(list(f.first_symbol_values()), [1.0, 2.0])
        with self.assertRaises(DepthError):
            CylinderPotential([0.0, 1.0, 2.0, 3.0], 2, 2).first_symbol_values()

    def test_all_words_order(self):
        self.assertEqual(all_words(2, 2).tolist(), [[0, 0], [0, 1], [1, 0], [1, 1]])
        self.assertEqual(Word((2, 1)).digits().tolist(), [1, 0])


if __name__ == "__main__":
    unittest.main()
