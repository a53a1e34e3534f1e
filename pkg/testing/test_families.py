import math
import unittest
from unittest import mock

from pressurelab.enums import Orientation
from pressurelab.exceptions import RangeError, UnknownFamily
from pressurelab.families import (ExampleFamily, FamilyRegistry, family_is_registered, get_available_families,
                                  get_family, register_family, resolve_shorthand, unregister_family)
from pressurelab.families._base import binary_entropy
from pressurelab.families._random_walk import RANDOM_WALK


class EqualWalkFamily(ExampleFamily):
    """Two branches of equal contraction c stepping -1 and +1."""

    def __init__(self, name='equal-walk', shorthand='ew', aliases=()):
        super().__init__(name, shorthand, aliases)

    @property
    def parameter_names(self):
        return 'c',

    def _check(self, params):
        if not 0.0 < params[0] <= 0.5:
            self._fail("the contraction must lie in (0, 1/2].")

    def _branches(self, params):
        return [(params[0], -1), (params[0], 1)]

    def _delta(self, alpha, params):
        return binary_entropy((1.0 + alpha) / 2.0) / math.log(1.0 / params[0])


class RegistryTestCase(unittest.TestCase):

    def test_built_in_families(self):
        self.assertEqual(get_available_families(), ['asymmetric-step', 'multi-branch', 'random-walk'])

    def test_lookup_by_name_alias_and_shorthand(self):
        family = get_family('random-walk')
        self.assertIs(get_family('A'), family)
        self.assertIs(get_family('rw'), family)
        self.assertIs(get_family('RW'), family)
        self.assertIs(get_family(family), family)
        self.assertIs(get_family('B'), get_family('step'))
        self.assertIs(get_family('C'), get_family('branches'))

    def test_unknown_family(self):
        with self.assertRaises(UnknownFamily) as context:
            get_family('brownian')
        self.assertIsInstance(context.exception, KeyError)
        self.assertIsInstance(context.exception, ValueError)
        self.assertIn('random-walk', str(context.exception))
        self.assertEqual(context.exception.to_record()['module'], 'families')

    def test_register_and_unregister(self):
        family = EqualWalkFamily()
        register_family(family)
        try:
            self.assertTrue(family_is_registered('equal-walk'))
            self.assertTrue(family_is_registered(family))
            model = resolve_shorthand('ew_0.5')
            self.assertEqual(list(model.steps), [-1, 1])
        finally:
            unregister_family('equal-walk')
        self.assertFalse(family_is_registered('equal-walk'))
        self.assertIsNone(resolve_shorthand('ew_0.5'))

    def test_taken_name_replaces_family(self):
        registry = FamilyRegistry()
        first = EqualWalkFamily(aliases=('E',))
        second = EqualWalkFamily()
        registry.add(first)
        registry.add(second)
        self.assertIs(registry['equal-walk'], second)
        self.assertNotIn('E', registry)
        self.assertNotIn(first, registry)
        self.assertEqual(len(registry), 1)
        registry.discard(first)
        self.assertEqual(len(registry), 1)

    def test_load_warns_about_broken_plugins(self):
        broken = mock.Mock()
        broken.load.side_effect = ImportError("missing module")
        working = mock.Mock()
        working.load.return_value = RANDOM_WALK
        registry = FamilyRegistry()
        with mock.patch('pressurelab.families._registry.metadata.entry_points', return_value=[broken, working]):
            with self.assertWarns(UserWarning):
                registry.load()
        self.assertEqual([family.name for family in registry], ['random-walk'])


class ValidationTestCase(unittest.TestCase):

    def test_dictionary_parameters(self):
        self.assertEqual(get_family('random-walk').validate({'c1': 0.4, 'c2': 0.6}), (0.4, 0.6))
        with self.assertRaises(RangeError):
            get_family('random-walk').validate({'c1': 0.4, 'c3': 0.6})

    def test_parameter_count(self):
        with self.assertRaises(RangeError):
            get_family('asymmetric-step').validate((0.5, 0))

    def test_non_numeric_parameters(self):
        for params in ((0.4, math.nan), (0.4, True), (0.4, '0.6')):
            with self.assertRaises(RangeError):
                get_family('random-walk').validate(params)

    def test_family_domains(self):
        for family, params in (('random-walk', (0.7, 0.6)),
                               ('random-walk', (0.0, 0.6)),
                               ('asymmetric-step', (0.6, 0, 1)),
                               ('asymmetric-step', (0.5, 1, 1)),
                               ('asymmetric-step', (0.5, 0, 1.5)),
                               ('multi-branch', (0.3, 2, 2)),
                               ('multi-branch', (0.2, 0, 2))):
            with self.assertRaises(RangeError, msg=repr((family, params))):
                get_family(family).validate(params)


class RandomWalkFamilyTestCase(unittest.TestCase):

    def setUp(self):
        self.family = get_family('random-walk')

    def test_orientations(self):
        printed = self.family.build_model((0.4, 0.6))
        mirrored = self.family.build_model((0.4, 0.6), Orientation.MIRRORED)
        self.assertEqual(list(printed.steps), [1, -1])
        self.assertEqual(list(mirrored.steps), [-1, 1])
        self.assertEqual(list(mirrored.contractions), [0.4, 0.6])
        self.assertEqual(mirrored.name, 'rw_0.4_0.6')

    def test_mirrored_formula(self):
        for alpha in (-0.5, 0.1, 0.7):
            self.assertEqual(self.family.delta(alpha, (0.3, 0.6), Orientation.MIRRORED),
                             self.family.delta(-alpha, (0.3, 0.6)))

    def test_recurrent_dimension(self):
        self.assertAlmostEqual(self.family.delta0((0.4, 0.6)), 0.971395, places=6)
        self.assertAlmostEqual(self.family.delta0((0.4, 0.6)), self.family.delta(0.0, (0.4, 0.6)), places=12)
        self.assertAlmostEqual(self.family.delta0((0.25, 0.75)), 0.828148, places=6)

    def test_fibre_pressure(self):
        self.assertAlmostEqual(self.family.fibre_pressure(1.0, (0.4, 0.6)), -0.020411, places=6)
        self.assertAlmostEqual(self.family.fibre_pressure(self.family.delta0((0.4, 0.6)), (0.4, 0.6)), 0.0,
                               places=12)

    def test_support_and_endpoints(self):
        self.assertEqual(self.family.support((0.4, 0.6)), (-1.0, 1.0))
        self.assertEqual(self.family.delta(1.0, (0.4, 0.6)), 0.0)
        self.assertEqual(self.family.delta(1.2, (0.4, 0.6)), 0.0)


class OtherFamiliesTestCase(unittest.TestCase):

    def test_asymmetric_step(self):
        family = get_family('asymmetric-step')
        self.assertEqual(family.support((0.5, -1, 2)), (-1.0, 2.0))
        self.assertEqual(family.support((0.5, -1, 2), Orientation.MIRRORED), (-2.0, 1.0))
        self.assertAlmostEqual(family.delta(0.5, (0.5, 0, 1)), 1.0)
        self.assertAlmostEqual(family.delta(0.5, (0.25, -1, 2)), 0.5)

    def test_multi_branch(self):
        family = get_family('multi-branch')
        model = family.build_model((0.2, 2, 3))
        self.assertEqual(list(model.steps), [-1, -1, 1, 1, 1])
        self.assertAlmostEqual(family.delta(1.0, (1 / 3, 1, 2)), math.log(2) / math.log(3))
        self.assertAlmostEqual(family.delta(-1.0, (1 / 3, 1, 2)), 0.0)
        # The maximum sits at the drift of the uniform weights.
        self.assertAlmostEqual(family.delta(0.2, (0.2, 2, 3)), 1.0)


class ShorthandTestCase(unittest.TestCase):

    def test_random_walk_convention(self):
        model = resolve_shorthand('rw_0.4_0.6')
        self.assertEqual(list(model.steps), [-1, 1])
        self.assertEqual(list(model.contractions), [0.4, 0.6])

    def test_other_shorthands(self):
        self.assertEqual(list(resolve_shorthand('step_0.5_0_1').steps), [0, 1])
        self.assertEqual(resolve_shorthand('branches_0.333333_1_2').alphabet_size, 3)
        self.assertEqual(resolve_shorthand('rw_0.4_0.6', potential_depth=2).potential_depth, 2)

    def test_not_a_shorthand(self):
        self.assertIsNone(resolve_shorthand('walk.json'))
        self.assertIsNone(resolve_shorthand('rw'))
        self.assertIsNone(resolve_shorthand('A_0.4_0.6'))

    def test_bad_parameters(self):
        with self.assertRaises(RangeError):
            resolve_shorthand('rw_a_b')
        with self.assertRaises(RangeError):
            resolve_shorthand('rw_0.7_0.6')


if __name__ == "__main__":
    unittest.main()
