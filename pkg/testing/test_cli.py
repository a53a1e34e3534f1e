import contextlib
import csv
import importlib.util
import io
import json
import math
import os
import tempfile
import unittest
from unittest import mock

from pressurelab.cli import (EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, EXIT_VIOLATION, RunConfig, gap_sweep, main,
                             parse_measure, render_csv, run)
from pressurelab.config import overridden
from pressurelab.exceptions import RangeError
from pressurelab.modelfile import load_model
from pressurelab.verification import CheckResult


def invoke(*argv):
    """Run the command line and return (exit code, standard output, standard error)."""
    stdout, stderr = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
        code = main(list(argv))
    return code, stdout.getvalue(), stderr.getvalue()


class SubcommandTestCase(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def test_zeta(self):
        code, out, _ = invoke('zeta', '--model', 'rw_0.5_0.5', '--alpha', '0', '--K', '0.5', '--n', '2', '--s', '1')
        self.assertEqual(code, EXIT_OK)
        record = json.loads(out)
        self.assertAlmostEqual(record['zeta'], 0.5)
        self.assertEqual(record['n'], 2)

    def test_pressure(self):
        code, out, _ = invoke('pressure', '--model', 'rw_0.5_0.5')
        self.assertEqual(code, EXIT_OK)
        record = json.loads(out)
        self.assertAlmostEqual(record['pressure'], 0.0, places=12)
        self.assertEqual(record['method'], 'exact-depth1')

    def test_fibre(self):
        code, out, _ = invoke('fibre', '--model', 'rw_0.4_0.6', '--t', '1')
        self.assertEqual(code, EXIT_OK)
        record = json.loads(out)
        self.assertAlmostEqual(record['value'], -0.020411, places=6)
        self.assertEqual(record['regime'], 'interior')

    def test_gap(self):
        code, out, _ = invoke('gap', '--model', 'rw_0.3_0.7')
        self.assertEqual(code, EXIT_OK)
        record = json.loads(out)
        self.assertAlmostEqual(record['delta'], 1.0, places=10)
        self.assertAlmostEqual(record['gap'], 1.0 - math.log(4) / math.log(1 / 0.21), places=9)
        self.assertEqual(record['transient']['T+'], record['delta'])

    def test_spectrum_csv(self):
        path = self.path('spec.csv')
        code, out, _ = invoke('spectrum', '--model', 'rw_0.5_0.5', '--alphas=-0.5,0,2', '--out', path)
        self.assertEqual((code, out), (EXIT_OK, ''))
        with open(path, encoding='utf-8') as file:
            rows = list(csv.DictReader(file))
        self.assertEqual(list(rows[0]), ['alpha', 'delta_root', 'delta_newton', 'delta_legendre', 'q_alpha', 'slope',
                                         'discrepancy'])
        self.assertEqual([float(row['alpha']) for row in rows], [-0.5, 0.0, 2.0])
        self.assertAlmostEqual(float(rows[1]['delta_root']), 1.0, places=12)
        self.assertEqual((rows[2]['delta_root'], rows[2]['delta_newton']), ('0', ''))

    def test_spectrum_json(self):
        code, out, _ = invoke('spectrum', '--model', 'step_0.5_0_1', '--alphas', '0.5', '--format', 'json')
        self.assertEqual(code, EXIT_OK)
        document = json.loads(out)
        self.assertEqual(len(document['model']['branches']), 2)
        self.assertAlmostEqual(document['points'][0]['delta_root'], 1.0, places=9)
        self.assertIn('gap', document['summary'])

    @unittest.skipUnless(importlib.util.find_spec('matplotlib'), "matplotlib is not installed")
    def test_spectrum_plot(self):
        plot = self.path('spec.svg')
        code, _, _ = invoke('spectrum', '--model', 'rw_0.4_0.6', '--grid', '5', '--plot', plot,
                            '--out', self.path('spec.csv'))
        self.assertEqual(code, EXIT_OK)
        with open(plot, encoding='utf-8') as file:
            self.assertIn('<svg', file.read())

    def test_gap_sweep(self):
        code, out, _ = invoke('gap-sweep', '--cmin', '0.25', '--cmax', '0.25')
        self.assertEqual(code, EXIT_OK)
        rows = list(csv.DictReader(io.StringIO(out)))
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(float(rows[0]['delta0']), 0.828148, places=6)

    def test_simulate(self):
        code, out, _ = invoke('simulate', '--model', 'rw_0.4_0.6', '--n', '100', '--count', '50', '--seed', '3',
                              '--measure', 'weights:2,3')
        self.assertEqual(code, EXIT_OK)
        record = json.loads(out)
        self.assertEqual((record['seed'], record['n'], record['count']), (3, 100, 50))
        self.assertEqual(record['measure'], 'weights:2,3')

    def test_echo(self):
        code, out, _ = invoke('zeta', '--model', 'rw_0.5_0.5', '--n', '4', '--s', '0', '--K', '0.5', '--echo')
        self.assertEqual(code, EXIT_OK)
        document = json.loads(out)
        self.assertEqual(document['config']['subcommand'], 'zeta')
        self.assertIn('threads', document['config']['settings'])
        self.assertAlmostEqual(document['result']['zeta'], 6.0)

    def test_verify_reports_violations(self):
        failing = [CheckResult('conjugacy', False, 1.0, 1e-9, {}, 0.1)]
        with mock.patch('pressurelab.cli.run_verification', return_value=failing) as checks:
            code, out, _ = invoke('verify', '--quick', '--check', 'conjugacy')
        checks.assert_called_once_with(quick=True, names=['conjugacy'])
        self.assertEqual(code, EXIT_VIOLATION)
        self.assertEqual(json.loads(out)[0]['name'], 'conjugacy')


class ExitCodeTestCase(unittest.TestCase):

    def test_validation_error(self):
        code, out, err = invoke('zeta', '--model', 'rw_0.5_0.5', '--n', '0', '--s', '1')
        self.assertEqual((code, out), (EXIT_VALIDATION, ''))
        record = json.loads(err)
        self.assertEqual((record['error'], record['module']), ('RangeError', 'cli'))

    def test_bad_model(self):
        code, _, err = invoke('gap', '--model', 'rw_0.7_0.6')
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertEqual(json.loads(err)['error'], 'ModelFileError')

    def test_numerical_error(self):
        with overridden(newton_max_iterations=0):
            code, _, err = invoke('fibre', '--model', 'rw_0.4_0.6')
        self.assertEqual(code, EXIT_NUMERICAL)
        self.assertEqual(json.loads(err)['error'], 'ConvergenceError')

    def test_failed_run_leaves_no_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'out.json')
            code, _, _ = invoke('zeta', '--model', 'rw_0.7_0.6', '--n', '2', '--s', '1', '--out', path)
            self.assertEqual(code, EXIT_VALIDATION)
            self.assertEqual(os.listdir(directory), [])

    def test_unwritable_output(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'absent', 'out.json')
            code, _, err = invoke('gap', '--model', 'rw_0.5_0.5', '--out', path)
        self.assertEqual(code, EXIT_VALIDATION)
        self.assertEqual(json.loads(err)['operation'], 'run')


class RunConfigTestCase(unittest.TestCase):

    def test_default_formats(self):
        self.assertEqual(RunConfig('spectrum', 'rw_0.5_0.5').output_format, 'csv')
        self.assertEqual(RunConfig('gap', 'rw_0.5_0.5').output_format, 'json')
        self.assertEqual(RunConfig('spectrum', 'rw_0.5_0.5', out='spec.JSON').output_format, 'json')
        self.assertEqual(RunConfig('gap', 'rw_0.5_0.5', out='gap.txt').output_format, 'json')

    def test_parameters(self):
        config = RunConfig('gap-sweep', params={'steps': 4})
        self.assertEqual(config.params, {'cmin': 0.05, 'cmax': 0.95, 'steps': 4})
        with self.assertRaises(RangeError):
            RunConfig('gap', 'rw_0.5_0.5', params={'s': 1.0})
        with self.assertRaises(RangeError):
            RunConfig('plot')

    def test_validation(self):
        for config in (RunConfig('gap'),
                       RunConfig('spectrum', 'rw_0.5_0.5', params={'grid': 1}),
                       RunConfig('spectrum', 'rw_0.5_0.5', params={'grid': 5, 'alphas': [0.0]}),
                       RunConfig('gap-sweep', params={'cmin': 0.6, 'cmax': 0.4}),
                       RunConfig('simulate', 'rw_0.5_0.5', params={'n': 10}),
                       RunConfig('pressure', 'rw_0.5_0.5', params={'s': math.inf}),
                       RunConfig('gap', 'rw_0.5_0.5', output_format='xml')):
            with self.assertRaises(RangeError, msg=repr(config)):
                config.validate()

    def test_run_writes_to_standard_output(self):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            code = run(RunConfig('zeta', 'rw_0.5_0.5', params={'n': 4, 's': 1.0, 'K': 0.5}))
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(json.loads(stdout.getvalue())['zeta'], 0.375)


class HelperTestCase(unittest.TestCase):

    def test_parse_measure(self):
        model = load_model('rw_0.4_0.6')
        self.assertEqual(list(parse_measure('uniform', model).weights), [0.5, 0.5])
        self.assertAlmostEqual(parse_measure('weights:1,3', model).weights[1], 0.75)
        self.assertAlmostEqual(parse_measure('delta:1', model).weights[0], 0.4)
        self.assertAlmostEqual(parse_measure('gibbs', model).weights[1], 0.6)
        for text in ('weights:1,2,3', 'weights:1,0', 'weights:a,b', 'delta:x', 'bogus', 'gibbs:1'):
            with self.assertRaises(RangeError, msg=text):
                parse_measure(text, model)

    def test_gap_sweep_rows(self):
        rows = gap_sweep([0.25, 0.5])
        self.assertEqual([row['c'] for row in rows], [0.25, 0.5])
        self.assertAlmostEqual(rows[1]['gap'], 0.0, places=10)
        with self.assertRaises(RangeError):
            gap_sweep([1.0])

    def test_render_csv(self):
        text = render_csv([{'a': 0.1 + 0.2, 'b': None, 'c': 'x'}], ['a', 'b'])
        self.assertEqual(text, 'a,b\n0.3,\n')


if __name__ == "__main__":
    unittest.main()
