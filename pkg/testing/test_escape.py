import math
import unittest
from unittest import mock

import numpy as np

from pressurelab import escape
from pressurelab.config import overridden
from pressurelab.escape import (conjugacy_check, cover_sum, exact_level_distribution, exact_recurrence_probability,
                                exact_uniform_probability, iterate_interval_map, recurrence_statistics,
                                sample_orbits)
from pressurelab.exceptions import BudgetError, EscapeFromRepellerError, PrecisionError, RangeError
from pressurelab.fibre import fibre_pressure
from pressurelab.pressure import gibbs_expectation, gibbs_measure
from pressurelab.symbolic import CylinderPotential, build_model


def walk(c1, c2):
    return build_model([(c1, -1), (c2, 1)])


class ExactLevelDistributionTestCase(unittest.TestCase):

    def setUp(self):
        self.psi = CylinderPotential.from_symbols([-1, 1])

    def test_binomial(self):
        measure = gibbs_measure(CylinderPotential.constant(0.0, 2))
        distribution = exact_level_distribution(measure, self.psi, 4).distribution()
        self.assertEqual(sorted(distribution), [-4, -2, 0, 2, 4])
        for level, count in ((-4, 1), (-2, 4), (0, 6), (2, 4), (4, 1)):
            self.assertAlmostEqual(distribution[level], count / 16)

    def test_drifting_walk(self):
        model = walk(0.4, 0.6)
        for source in (gibbs_measure(model.geometric_potential()), model.geometric_potential()):
            distribution = exact_level_distribution(source, self.psi, 2).distribution()
            self.assertEqual(sorted(distribution), [-2, 0, 2])
            self.assertAlmostEqual(distribution[-2], 0.16)
            self.assertAlmostEqual(distribution[0], 0.48)
            self.assertAlmostEqual(distribution[2], 0.36)

    def test_dirac_measure(self):
        measure = gibbs_measure(CylinderPotential.constant(0.0, 2), {2})
        self.assertEqual(exact_level_distribution(measure, self.psi, 7).distribution(), {7: 1.0})

    def test_markov_mean(self):
        f = CylinderPotential(np.random.default_rng(8).normal(size=9), 3, 2)
        psi = CylinderPotential.from_symbols([-1, 0, 2])
        measure = gibbs_measure(f)
        distribution = exact_level_distribution(measure, psi, 12).distribution()
        self.assertAlmostEqual(sum(distribution.values()), 1.0)
        mean = sum(level * mass for level, mass in distribution.items())
        self.assertAlmostEqual(mean, 12 * gibbs_expectation(measure, psi), places=9)

    def test_invalid_horizon(self):
        with self.assertRaises(RangeError):
            exact_level_distribution(gibbs_measure(CylinderPotential.constant(0.0, 2)), self.psi, 0)


class ExactProbabilityTestCase(unittest.TestCase):

    def setUp(self):
        self.measure = gibbs_measure(CylinderPotential.constant(0.0, 2))
        self.psi = CylinderPotential.from_symbols([-1, 1])

    def test_uniform_proxy(self):
        # Paths staying within one of the origin alternate between +-1 and 0.
        self.assertAlmostEqual(exact_uniform_probability(self.measure, self.psi, 0.0, 1.0, 4), 0.25)

    def test_recurrent_proxy(self):
        # Returns to 0 at time 2, or first at time 4 after reaching +-2.
        self.assertAlmostEqual(exact_recurrence_probability(self.measure, self.psi, 0.0, 0.5, 4), 0.625)

    def test_drift_never_recurs(self):
        measure = gibbs_measure(CylinderPotential.constant(0.0, 2), {2})
        self.assertEqual(exact_recurrence_probability(measure, self.psi, 0.0, 1.0, 10), 0.0)
        self.assertAlmostEqual(exact_recurrence_probability(measure, self.psi, 1.0, 1.0, 10), 1.0)


class SampleOrbitsTestCase(unittest.TestCase):

    def setUp(self):
        self.model = walk(0.4, 0.6)
        self.measure = gibbs_measure(self.model.geometric_potential())
        self.psi = self.model.step_potential()

    def test_drift_estimate(self):
        batch = sample_orbits(self.measure, 200, 2000, 1, self.psi)
        drift, error = batch.drift_estimate()
        self.assertGreater(error, 0.0)
        self.assertLessEqual(abs(drift - 0.2), 4 * error)

    def test_orbits_do_not_depend_on_batch_size(self):
        small = sample_orbits(self.measure, 50, 10, 7, self.psi)
        large = sample_orbits(self.measure, 50, 300, 7, self.psi)
        self.assertTrue(np.array_equal(small.paths, large.paths[:10]))
        other = sample_orbits(self.measure, 50, 10, 8, self.psi)
        self.assertFalse(np.array_equal(small.paths, other.paths))

    def test_threads_give_identical_orbits(self):
        serial = sample_orbits(self.measure, 20, 100, 3, self.psi)
        with overridden(threads=4):
            threaded = sample_orbits(self.measure, 20, 100, 3, self.psi)
        self.assertTrue(np.array_equal(serial.paths, threaded.paths))

    def test_dirac_paths(self):
        measure = gibbs_measure(self.model.geometric_potential(), {2})
        batch = sample_orbits(measure, 9, 3, 0, self.psi)
        self.assertTrue(np.array_equal(batch.paths, np.tile(np.arange(10), (3, 1))))

    def test_kept_symbols_match_paths(self):
        batch = sample_orbits(self.measure, 30, 5, 2, self.psi, keep_symbols=True)
        self.assertEqual(batch.symbols.shape, (5, 30))
        self.assertTrue(set(np.unique(batch.symbols)) <= {1, 2})
        steps = np.where(batch.symbols == 1, -1, 1)
        self.assertTrue(np.array_equal(batch.paths[:, 1:], np.cumsum(steps, axis=1)))

    def test_markov_symbols_follow_transitions(self):
        f = CylinderPotential.from_table({(1, 1): 0.0, (1, 2): 0.0, (2, 1): 0.0, (2, 2): -50.0}, 2)
        batch = sample_orbits(gibbs_measure(f), 40, 20, 5, CylinderPotential.from_symbols([-1, 1]),
                              keep_symbols=True)
        # The transition 2 -> 2 carries essentially no mass.
        self.assertFalse(np.any((batch.symbols[:, 1:] == 2) & (batch.symbols[:, :-1] == 2)))

    def test_summary_only_batches(self):
        stored = sample_orbits(self.measure, 10, 50, 4, self.psi)
        with overridden(orbit_budget=100):
            summary = sample_orbits(self.measure, 10, 50, 4, self.psi)
            self.assertTrue(summary.is_summary_only)
            self.assertTrue(np.array_equal(summary.final_levels, stored.final_levels))
            paths = np.concatenate([block for _, block in summary.iter_paths()])
            self.assertTrue(np.array_equal(paths, stored.paths))
            with self.assertRaises(BudgetError):
                sample_orbits(self.measure, 10, 50, 4, self.psi, keep_symbols=True)

    def test_invalid_requests(self):
        with self.assertRaises(RangeError):
            sample_orbits(self.measure, 0, 10, 1, self.psi)
        with self.assertRaises(RangeError):
            sample_orbits(self.measure, 10, 10, -1, self.psi)
        with self.assertRaises(RangeError):
            sample_orbits(self.measure, 10, 10, 1, CylinderPotential.from_symbols([-0.5, 0.5]))

    def test_summary_record(self):
        record = sample_orbits(self.measure, 20, 30, 9, self.psi).summary()
        self.assertEqual(record['seed'], 9)
        self.assertEqual(record['n'], 20)
        self.assertEqual(record['count'], 30)
        self.assertTrue(record['measure'].startswith('bernoulli('))
        self.assertTrue(0.0 <= record['recur_frac'] <= 1.0)


class RecurrenceStatisticsTestCase(unittest.TestCase):

    def setUp(self):
        self.psi = CylinderPotential.from_symbols([-1, 1])

    def test_dirac_measure(self):
        measure = gibbs_measure(CylinderPotential.constant(0.0, 2), {2})
        batch = sample_orbits(measure, 10, 4, 0, self.psi)
        moving = recurrence_statistics(batch, 1.0, 1.0)
        self.assertEqual((moving.recurrent_fraction, moving.uniform_fraction), (1.0, 1.0))
        resting = recurrence_statistics(batch, 0.0, 1.0)
        self.assertEqual((resting.recurrent_fraction, resting.uniform_fraction), (0.0, 0.0))
        self.assertTrue(np.all(resting.min_deviation == 1.0))

    def test_agrees_with_exact_probability(self):
        measure = gibbs_measure(CylinderPotential.constant(0.0, 2))
        batch = sample_orbits(measure, 100, 4000, 11, self.psi)
        stats = recurrence_statistics(batch, 0.0, 2.0)
        exact = exact_recurrence_probability(measure, self.psi, 0.0, 2.0, 100)
        self.assertLessEqual(abs(stats.recurrent_fraction - exact), 4 * stats.recurrent_se + 1e-3)
        exact_uniform = exact_uniform_probability(measure, self.psi, 0.0, 2.0, 100)
        self.assertLessEqual(abs(stats.uniform_fraction - exact_uniform), 4 * stats.uniform_se + 1e-3)

    def test_narrow_corridor(self):
        batch = sample_orbits(gibbs_measure(CylinderPotential.constant(0.0, 2)), 10, 5, 0, self.psi)
        with self.assertRaises(RangeError):
            recurrence_statistics(batch, 0.0, 0.5)


class IntervalMapTestCase(unittest.TestCase):

    def test_periodic_orbit(self):
        orbit = iterate_interval_map(walk(0.5, 0.5), 1 / 3, 4)
        self.assertTrue(np.allclose(orbit, [1 / 3, -1 / 3, 1 / 3, -1 / 3, 1 / 3]))

    def test_lift_moves_by_steps(self):
        orbit = iterate_interval_map(walk(0.5, 0.5), 0.7, 3)
        self.assertTrue(np.allclose(orbit, [0.7, 1.4, 0.8, 1.6]))

    def test_unequal_branches(self):
        orbit = iterate_interval_map(walk(0.4, 0.6), 0.7, 4)
        self.assertTrue(np.allclose(orbit, [0.7, 1.5, 13 / 6, 17 / 12, 73 / 36]))

    def test_gap_point(self):
        with self.assertRaises(EscapeFromRepellerError):
            iterate_interval_map(walk(0.4, 0.5), 0.95, 1)

    def test_branch_endpoint(self):
        with self.assertRaises(EscapeFromRepellerError):
            iterate_interval_map(walk(0.5, 0.5), 0.5, 1)


class ConjugacyTestCase(unittest.TestCase):

    def setUp(self):
        self.prefix = tuple(int(symbol) for symbol in np.random.default_rng(2).integers(1, 3, size=60))

    def test_orbit_follows_its_coding(self):
        model = walk(0.5, 0.5)
        for level in (0, 5, -3):
            self.assertLess(conjugacy_check(model, self.prefix, level, 20), 1e-8)

    def test_unequal_contractions(self):
        self.assertLess(conjugacy_check(walk(0.3, 0.6), self.prefix, 2, 12), 1e-8)

    def test_zero_horizon(self):
        self.assertEqual(conjugacy_check(walk(0.5, 0.5), self.prefix, 0, 0), 0.0)

    def test_short_prefix(self):
        with self.assertRaises(PrecisionError):
            conjugacy_check(walk(0.5, 0.5), (1, 2, 1, 2, 1), 0, 2)

    def test_horizon_past_prefix(self):
        with self.assertRaises(RangeError):
            conjugacy_check(walk(0.5, 0.5), self.prefix, 0, 60)

    def test_drift_inside_the_cylinder_is_measured(self):
        prefix = (1, 2) * 22 + (1,)
        original = escape._lift_step

        def nudged(model, x, operation):
            image, branch = original(model, x, operation)
            return image + 1e-14, branch

        self.assertLess(conjugacy_check(walk(0.5, 0.5), prefix, 0, 2), 1e-15)
        with mock.patch.object(escape, '_lift_step', nudged):
            deviation = conjugacy_check(walk(0.5, 0.5), prefix, 0, 2)
        self.assertAlmostEqual(deviation, 3e-14, delta=1e-15)


class CoverSumTestCase(unittest.TestCase):

    def setUp(self):
        self.model = walk(0.5, 0.5)

    def test_balanced_cylinders(self):
        self.assertAlmostEqual(cover_sum(self.model, 0.0, 0.5, 4, 1.0), 0.375)
        self.assertAlmostEqual(cover_sum(self.model, 0.0, 0.5, 4, 0.0), 6.0)

    def test_decreasing_in_exponent(self):
        values = [cover_sum(walk(0.4, 0.6), 0.0, 2.0, 20, s) for s in (0.5, 0.9, 1.3)]
        self.assertTrue(values[0] > values[1] > values[2])

    def test_decays_above_the_dimension(self):
        first = cover_sum(self.model, 0.0, 2.0, 1000, 1.2)
        second = cover_sum(self.model, 0.0, 2.0, 2000, 1.2)
        self.assertGreater(second, 0.0)
        self.assertLess(second, first)
        # Each added symbol costs 2 ** -1.2 of width and gains a factor 2 in words.
        self.assertAlmostEqual(math.log(second) - math.log(first), -1000 * 0.2 * math.log(2.0), delta=1.0)

    def test_log_slope_approaches_fibre_pressure(self):
        model = walk(0.4, 0.6)
        horizon = 4000
        for s in (0.8, 1.2):
            pressure = fibre_pressure(s * model.geometric_potential(), model.step_potential()).value
            slope = math.log(cover_sum(model, 0.0, 2.0, horizon, s)) / horizon
            self.assertLess(abs(slope - pressure), 0.7 * math.log(horizon) / horizon + 1e-3, msg=s)

    def test_negative_exponent(self):
        with self.assertRaises(RangeError):
            cover_sum(self.model, 0.0, 0.5, 4, -1.0)


if __name__ == "__main__":
    unittest.main()
