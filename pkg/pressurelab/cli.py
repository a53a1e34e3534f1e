"""
Command-line front end.

    pressurelab spectrum --model rw_0.5_0.5 --grid 201 --out spec.csv
    pressurelab gap --model rw_0.3_0.7
    pressurelab zeta --model rw_0.5_0.5 --alpha 0 --K 0.5 --n 2 --s 1
    pressurelab simulate --model rw_0.4_0.6 --measure gibbs --n 1000 --count 500 --seed 7
    pressurelab verify --quick

Exit codes: 0 on success, 1 when verify finds a violation, 2 on a validation error and 3 on a numerical error. Errors
are reported on standard error as a JSON record naming the module and operation that failed. Output files are
written to a temporary file and moved into place, so a failed run never leaves a partial file behind.
"""

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from pressurelab.config import get_settings
from pressurelab.enums import Orientation, OutputFormat, Subcommand
from pressurelab.escape import cover_sum, sample_orbits
from pressurelab.exceptions import NumericalError, PressureLabError, RangeError, ValidationError
from pressurelab.families import get_family
from pressurelab.fibre import fibre_pressure
from pressurelab.modelfile import load_model, write_atomically
from pressurelab.pressure import bowen_delta, classical_pressure, gibbs_measure
from pressurelab.spectrum import DEFAULT_GRID_POINTS, drift_and_gap, spectrum_sweep
from pressurelab.symbolic import CylinderPotential
from pressurelab.verification import run_verification

__author__ = 'pressurelab developers'
__all__ = [
    'RunConfig',
    'run',
    'gap_sweep',
    'build_parser',
    'main',
]


_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

SPECTRUM_COLUMNS = ['alpha', 'delta_root', 'delta_newton', 'delta_legendre', 'q_alpha', 'slope', 'discrepancy']
GAP_SWEEP_COLUMNS = ['c', 'delta0', 'delta', 'gap']

# Subcommands whose results are tables and default to CSV.
_TABULAR = {Subcommand.SPECTRUM, Subcommand.GAP_SWEEP}

# Parameters each subcommand accepts, with their defaults.
_PARAMETERS = {
    Subcommand.PRESSURE: {'s': 1.0, 'q': 0.0, 'a': 0.0},
    Subcommand.FIBRE: {'t': 1.0},
    Subcommand.SPECTRUM: {'grid': None, 'alphas': None, 'plot': None},
    Subcommand.GAP: {},
    Subcommand.GAP_SWEEP: {'cmin': 0.05, 'cmax': 0.95, 'steps': 18},
    Subcommand.ZETA: {'alpha': 0.0, 'K': 1.0, 'n': None, 's': None},
    Subcommand.SIMULATE: {'measure': 'gibbs', 'n': None, 'count': None, 'seed': 0, 'alpha': 0.0, 'K': 1.0},
    Subcommand.VERIFY: {'quick': False, 'checks': None},
}


def _invalid(message):
    raise RangeError(message, module='cli', operation='run')


class RunConfig:
    """
    One fully specified run: the subcommand, its parameters, the model source and where and how to write the result.
    """

    def __init__(self, subcommand, model=None, params=None, out=None, output_format=None, echo=False, verbose=0):
        if not Subcommand.is_valid(subcommand):
            _invalid("Unknown subcommand: %r" % subcommand)
        accepted = _PARAMETERS[subcommand]
        params = dict(params or {})
        unknown = set(params) - set(accepted)
        if unknown:
            _invalid("%s does not take %s." % (subcommand, ', '.join(sorted(unknown))))
        self.subcommand = subcommand
        self.model = model
        self.params = dict(accepted, **{name: value for name, value in params.items() if value is not None})
        self.out = out
        self.output_format = output_format or self._default_format()
        self.echo = echo
        self.verbose = verbose

    @classmethod
    def from_arguments(cls, arguments):
        """Build a configuration from parsed command-line arguments."""
        subcommand = arguments.subcommand
        params = {name: getattr(arguments, name, None) for name in _PARAMETERS[subcommand]}
        return cls(subcommand, getattr(arguments, 'model', None), params, arguments.out, arguments.format,
                   arguments.echo, arguments.verbose)

    def _default_format(self):
        if self.out:
            extension = self.out.rsplit('.', 1)[-1].lower()
            if OutputFormat.is_valid(extension):
                return extension
        return OutputFormat.CSV if self.subcommand in _TABULAR else OutputFormat.JSON

    def validate(self):
        """
        Check the parameters against the subcommand before any computation.

        :raise RangeError: If a parameter is missing or outside its range.
        """
        if not OutputFormat.is_valid(self.output_format):
            _invalid("Unknown output format: %r" % self.output_format)
        if Subcommand.needs_model(self.subcommand) and not self.model:
            _invalid("%s needs --model." % self.subcommand)
        p = self.params
        for name, value in p.items():
            if isinstance(value, float) and not math.isfinite(value):
                _invalid("--%s must be finite." % name)

        if self.subcommand == Subcommand.SPECTRUM:
            if p['grid'] is not None and p['alphas'] is not None:
                _invalid("--grid and --alphas are mutually exclusive.")
            if p['grid'] is not None and p['grid'] < 2:
                _invalid("--grid needs at least 2 points.")
            if p['alphas'] is not None and not p['alphas']:
                _invalid("--alphas needs at least one value.")
        elif self.subcommand == Subcommand.GAP_SWEEP:
            if not 0.0 < p['cmin'] <= p['cmax'] < 1.0:
                _invalid("The c grid must satisfy 0 < cmin <= cmax < 1.")
            if p['steps'] < 1:
                _invalid("--steps must be at least 1.")
        elif self.subcommand == Subcommand.ZETA:
            if p['n'] is None or p['s'] is None:
                _invalid("zeta needs --n and --s.")
            if p['n'] < 1 or p['K'] <= 0.0 or p['s'] < 0.0:
                _invalid("zeta needs n >= 1, K > 0 and s >= 0.")
        elif self.subcommand == Subcommand.SIMULATE:
            if p['n'] is None or p['count'] is None:
                _invalid("simulate needs --n and --count.")
            if p['n'] < 1 or p['count'] < 1 or p['seed'] < 0 or p['K'] <= 0.0:
                _invalid("simulate needs n >= 1, count >= 1, seed >= 0 and K > 0.")
        return self

    def to_record(self):
        """The configuration as a JSON-ready dictionary, as echoed with --echo."""
        return {
            'subcommand': self.subcommand,
            'model': self.model,
            'params': self.params,
            'format': self.output_format,
            'settings': get_settings().as_dict(),
        }

    def __repr__(self):
        return 'RunConfig(%r, model=%r, params=%r)' % (self.subcommand, self.model, self.params)


def _csv_value(value):
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return '%.15g' % value
    return value


def render_csv(rows, columns):
    """Render rows of dictionaries as CSV with 15 significant digits."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({name: _csv_value(row.get(name)) for name in columns})
    return buffer.getvalue()


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (np.ndarray, frozenset, set)):
        return sorted(value) if isinstance(value, (frozenset, set)) else value.tolist()
    raise TypeError("%r is not JSON serialisable" % (value,))


def render_json(document):
    """Render a document as JSON; floats keep their shortest round-trip repr."""
    return json.dumps(document, indent=2, default=_json_default) + '\n'


def parse_measure(text, model):
    """
    Resolve a --measure value against a model: 'gibbs' is the Gibbs measure of delta phi, 'uniform' the Bernoulli
    measure with equal weights, 'delta:<s>' the Gibbs measure of s phi and 'weights:<w1>,<w2>,...' the Bernoulli
    measure with the given (unnormalised) weights.
    """
    phi = model.geometric_potential()
    kind, _, argument = text.partition(':')
    if kind == 'gibbs' and not argument:
        return gibbs_measure(bowen_delta(model) * phi)
    if kind == 'uniform' and not argument:
        return gibbs_measure(CylinderPotential.constant(0.0, model.alphabet_size))
    try:
        if kind == 'delta':
            return gibbs_measure(float(argument) * phi)
        if kind == 'weights':
            weights = [float(weight) for weight in argument.split(',')]
            if len(weights) != model.alphabet_size or min(weights) <= 0.0:
                _invalid("weights: needs %d positive weights." % model.alphabet_size)
            return gibbs_measure(CylinderPotential.from_symbols(np.log(weights)))
    except ValueError as error:
        if isinstance(error, PressureLabError):
            raise
        _invalid("Malformed --measure %r: %s" % (text, error))
    _invalid("Unknown --measure %r; expected gibbs, uniform, delta:<s> or weights:<w1>,..." % text)


def gap_sweep(c_grid):
    """
    Return one row (c, delta0, delta, gap) per c for the walk with contractions (c, 1 - c). A point that fails keeps
    its error record and NaN values; the sweep continues.
    """
    family = get_family('random-walk')
    rows = []
    for c in c_grid:
        c = float(c)
        if not 0.0 < c < 1.0:
            _invalid("gap_sweep needs c in (0, 1), got %r." % c)
        try:
            report = drift_and_gap(family.build_model((c, 1.0 - c), Orientation.MIRRORED))
            rows.append({'c': c, 'delta0': report.delta0, 'delta': report.delta, 'gap': report.gap})
        except PressureLabError as error:
            _LOGGER.warning("gap_sweep: c = %r failed: %s", c, error)
            rows.append({'c': c, 'delta0': math.nan, 'delta': math.nan, 'gap': math.nan, 'error': error.to_record()})
    return rows


def _spectrum_rows(curve):
    return [{
        'alpha': point.alpha,
        'delta_root': point.delta_root,
        'delta_newton': point.delta_newton,
        'delta_legendre': point.delta_legendre,
        'q_alpha': point.q,
        'slope': point.slope,
        'discrepancy': point.discrepancy,
        'error': point.error,
    } for point in curve]


def write_spectrum_plot(curve, path):
    """Write the spectrum curve as a static SVG."""
    try:
        import matplotlib
        matplotlib.use('Agg')
        from matplotlib import pyplot
    except ImportError:
        raise ValidationError("--plot needs matplotlib; install the 'plot' extra.", module='cli',
                              operation='write_spectrum_plot')
    figure, axes = pyplot.subplots(figsize=(6, 4))
    axes.plot(curve.alphas, curve.deltas, color='black', linewidth=1.2)
    axes.axvline(curve.summary['alpha_max'], color='grey', linestyle=':', linewidth=0.8)
    axes.set_xlabel('alpha')
    axes.set_ylabel('delta_alpha')
    axes.set_title(curve.model.name or 'escape rate spectrum')
    figure.tight_layout()
    buffer = io.StringIO()
    figure.savefig(buffer, format='svg')
    pyplot.close(figure)
    write_atomically(path, buffer.getvalue())


def _execute(config):
    """Run the subcommand and return (rows or document, CSV columns, exit code)."""
    p = config.params
    command = config.subcommand

    if command == Subcommand.VERIFY:
        results = run_verification(quick=p['quick'], names=p['checks'])
        rows = [result.to_record() for result in results]
        code = EXIT_OK if all(result.passed for result in results) else EXIT_VIOLATION
        return rows, ['name', 'passed', 'worst', 'bound', 'seconds'], code

    if command == Subcommand.GAP_SWEEP:
        grid = np.linspace(p['cmin'], p['cmax'], p['steps'] + 1) if p['cmax'] > p['cmin'] else [p['cmin']]
        return gap_sweep(grid), GAP_SWEEP_COLUMNS, EXIT_OK

    model = load_model(config.model)
    phi, psi = model.geometric_potential(), model.step_potential()

    if command == Subcommand.PRESSURE:
        value = classical_pressure(p['s'] * phi + p['q'] * psi.shifted(p['a']))
        row = {'s': p['s'], 'q': p['q'], 'a': p['a'], 'pressure': value.value, 'method': value.method,
               'residual': value.residual}
        return [row], list(row), EXIT_OK

    if command == Subcommand.FIBRE:
        result = fibre_pressure(p['t'] * phi, psi)
        row = {'t': p['t'], 'value': result.value, 'regime': result.regime, 'minimizer': result.minimizer,
               'boundary_alphabet': sorted(result.boundary_alphabet) if result.boundary_alphabet else None}
        return [row], ['t', 'value', 'regime', 'minimizer'], EXIT_OK

    if command == Subcommand.SPECTRUM:
        if p['alphas'] is not None:
            curve = spectrum_sweep(model, p['alphas'])
        else:
            curve = spectrum_sweep(model, points=p['grid'] or DEFAULT_GRID_POINTS)
        if p['plot']:
            write_spectrum_plot(curve, p['plot'])
        if config.output_format == OutputFormat.JSON:
            document = {'model': model.to_dict(), 'summary': curve.summary, 'points': _spectrum_rows(curve)}
            return document, SPECTRUM_COLUMNS, EXIT_OK
        return _spectrum_rows(curve), SPECTRUM_COLUMNS, EXIT_OK

    if command == Subcommand.GAP:
        report = drift_and_gap(model)
        row = {'delta': report.delta, 'delta0': report.delta0, 'gap': report.gap, 'drift': report.drift,
               'recurrent_dimension': report.recurrent_dimension, 'transient_plus': report.transient_plus,
               'transient_minus': report.transient_minus}
        if config.output_format == OutputFormat.JSON:
            row['transient'] = report.transient_dimensions()
        return [row], ['delta', 'delta0', 'gap', 'drift'], EXIT_OK

    if command == Subcommand.ZETA:
        value = cover_sum(model, p['alpha'], p['K'], p['n'], p['s'])
        row = {'alpha': p['alpha'], 'K': p['K'], 'n': p['n'], 's': p['s'], 'zeta': value}
        return [row], list(row), EXIT_OK

    assert command == Subcommand.SIMULATE
    measure = parse_measure(p['measure'], model)
    batch = sample_orbits(measure, p['n'], p['count'], p['seed'], psi, label=p['measure'])
    row = batch.summary(p['alpha'], p['K'])
    return [row], list(row), EXIT_OK


def _render(config, result, columns):
    if config.output_format == OutputFormat.CSV:
        rows = result if isinstance(result, list) else [result]
        return render_csv(rows, columns)
    if isinstance(result, list) and len(result) == 1 and config.subcommand not in _TABULAR | {Subcommand.VERIFY}:
        result = result[0]
    if config.echo:
        result = {'config': config.to_record(), 'result': result}
    return render_json(result)


def _configure_logging(verbose):
    level = logging.WARNING if not verbose else (logging.INFO if verbose == 1 else logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def _report_error(error):
    sys.stderr.write(json.dumps(error.to_record()) + '\n')


def run(config):
    """
    Validate the configuration, execute it and write the result to the output path (or standard output).

    :return: The process exit code.
    """
    assert isinstance(config, RunConfig)
    try:
        config.validate()
        if config.echo and config.output_format == OutputFormat.CSV:
            sys.stderr.write(render_json(config.to_record()))
        result, columns, code = _execute(config)
        text = _render(config, result, columns)
    except ValidationError as error:
        _report_error(error)
        return EXIT_VALIDATION
    except NumericalError as error:
        _report_error(error)
        return EXIT_NUMERICAL

    if config.out:
        try:
            write_atomically(config.out, text)
        except OSError as error:
            _report_error(ValidationError("Cannot write %s: %s" % (config.out, error), module='cli', operation='run'))
            return EXIT_VALIDATION
        _LOGGER.info("Wrote %s", config.out)
    else:
        sys.stdout.write(text)
    return code


def _float_list(text):
    try:
        return [float(value) for value in text.split(',') if value.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers, got %r" % text)


def build_parser():
    """Build the argument parser with one subparser per subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', default=None, help="Output path; standard output if omitted.")
    common.add_argument('--format', choices=list(OutputFormat.iter()), default=None,
                        help="Output format; inferred from --out, else CSV for tables and JSON otherwise.")
    common.add_argument('--echo', action='store_true', help="Echo the resolved configuration with the result.")
    common.add_argument('--verbose', '-v', action='count', default=0, help="Log INFO (-v) or DEBUG (-vv).")

    with_model = argparse.ArgumentParser(add_help=False, parents=[common])
    with_model.add_argument('--model', required=True, help="Model file or family shorthand such as rw_0.4_0.6.")

    parser = argparse.ArgumentParser(prog='pressurelab',
                                     description="Fibre-induced pressure and escape rate spectra of branch models.")
    subparsers = parser.add_subparsers(dest='subcommand', required=True)

    sub = subparsers.add_parser(Subcommand.PRESSURE, parents=[with_model],
                                help="Classical pressure of s phi + q psi_a.")
    sub.add_argument('--s', type=float, default=1.0)
    sub.add_argument('--q', type=float, default=0.0)
    sub.add_argument('--a', type=float, default=0.0)

    sub = subparsers.add_parser(Subcommand.FIBRE, parents=[with_model], help="Fibre-induced pressure of t phi.")
    sub.add_argument('--t', type=float, default=1.0)

    sub = subparsers.add_parser(Subcommand.SPECTRUM, parents=[with_model], help="Escape rate spectrum on a grid.")
    grid = sub.add_mutually_exclusive_group()
    grid.add_argument('--grid', type=int, default=None, help="Number of grid points, endpoints included.")
    grid.add_argument('--alphas', type=_float_list, default=None, help="Comma-separated alpha values.")
    sub.add_argument('--plot', default=None, help="Also write the curve as an SVG to this path.")

    subparsers.add_parser(Subcommand.GAP, parents=[with_model], help="Drift, delta, delta_0 and the dimension gap.")

    sub = subparsers.add_parser(Subcommand.GAP_SWEEP, parents=[common],
                                help="delta_0(c, 1 - c) and the gap over a grid of c.")
    sub.add_argument('--cmin', type=float, default=0.05)
    sub.add_argument('--cmax', type=float, default=0.95)
    sub.add_argument('--steps', type=int, default=18)

    sub = subparsers.add_parser(Subcommand.ZETA, parents=[with_model], help="The corridor series term zeta_n.")
    sub.add_argument('--alpha', type=float, default=0.0)
    sub.add_argument('--K', type=float, default=1.0)
    sub.add_argument('--n', type=int, required=True)
    sub.add_argument('--s', type=float, required=True)

    sub = subparsers.add_parser(Subcommand.SIMULATE, parents=[with_model], help="Sample orbits and summarise them.")
    sub.add_argument('--measure', default='gibbs', help="gibbs, uniform, delta:<s> or weights:<w1>,<w2>,...")
    sub.add_argument('--n', type=int, required=True)
    sub.add_argument('--count', type=int, required=True)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--alpha', type=float, default=0.0)
    sub.add_argument('--K', type=float, default=1.0)

    sub = subparsers.add_parser(Subcommand.VERIFY, parents=[common], help="Run the cross-method consistency checks.")
    sub.add_argument('--quick', action='store_true', help="Smaller horizons and grids.")
    sub.add_argument('--check', dest='checks', action='append', default=None, help="Run only this check; repeatable.")

    return parser


def main(argv=None):
    """Parse the command line and run it."""
    arguments = build_parser().parse_args(argv)
    _configure_logging(arguments.verbose)
    try:
        config = RunConfig.from_arguments(arguments)
    except ValidationError as error:
        _report_error(error)
        return EXIT_VALIDATION
    return run(config)
