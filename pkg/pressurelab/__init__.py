"""
pressurelab computes fibre-induced pressure, escape rate spectra and recurrence diagnostics for skew-periodic
lifts of expanding interval maps with affine branches.

Usage:
    >>> from pressurelab import *
    >>> model = load_model('rw_0.4_0.6')  # Two branches, contractions 0.4 and 0.6, steps -1 and +1
    >>> round(bowen_delta(model), 12)
    1.0
    >>> report = drift_and_gap(model)
    >>> round(report.drift, 12), report.has_gap
    (0.2, True)
    >>> round(delta_alpha_root(model, 0.0), 6)
    0.971395
    >>> get_available_families()
    ['asymmetric-step', 'multi-branch', 'random-walk']
    >>>
"""

import pressurelab.families

from pressurelab.config import get_settings, set_setting, reset_settings
from pressurelab.escape import sample_orbits, recurrence_statistics, exact_level_distribution, conjugacy_check, \
    cover_sum
from pressurelab.families import get_available_families, get_family, register_family
from pressurelab.fibre import fibre_pressure, corridor_partition, fibre_pressure_estimate, recurrence_series, \
    symmetry_on_average_ratio
from pressurelab.modelfile import load_model, dump_model
from pressurelab.pressure import classical_pressure, gibbs_measure, equilibrium, bowen_delta
from pressurelab.spectrum import delta_alpha_root, delta_alpha_newton, delta_alpha_legendre, spectrum_sweep, \
    drift_and_gap, closed_form_oracle
from pressurelab.symbolic import build_model, CylinderPotential, Word


__author__ = 'pressurelab developers'
__version__ = '0.1'
__packages__ = ['pressurelab', 'pressurelab.families']
__url__ = 'https://github.com/pressurelab/pressurelab'
__license__ = 'MIT'
__description__ = 'Fibre-induced pressure and escape rate spectra of skew-periodic interval maps'

# Registration of built-in example families. Other, separately installable packages can register their own closed-
# form families under the same entry point group; they are then available by name and by shorthand.
__entry_points__ = {
    'pressurelab.families': [
        'random-walk = pressurelab.families._random_walk:RANDOM_WALK',
        'asymmetric-step = pressurelab.families._asymmetric_step:ASYMMETRIC_STEP',
        'multi-branch = pressurelab.families._multi_branch:MULTI_BRANCH',
    ],
    'console_scripts': [
        'pressurelab = pressurelab.cli:main',
    ],
}

__all__ = [
    'build_model',
    'CylinderPotential',
    'Word',
    'load_model',
    'dump_model',
    'classical_pressure',
    'gibbs_measure',
    'equilibrium',
    'bowen_delta',
    'fibre_pressure',
    'corridor_partition',
    'fibre_pressure_estimate',
    'recurrence_series',
    'symmetry_on_average_ratio',
    'delta_alpha_root',
    'delta_alpha_newton',
    'delta_alpha_legendre',
    'spectrum_sweep',
    'drift_and_gap',
    'closed_form_oracle',
    'sample_orbits',
    'recurrence_statistics',
    'exact_level_distribution',
    'conjugacy_check',
    'cover_sum',
    'get_available_families',
    'get_family',
    'register_family',
    'get_settings',
    'set_setting',
    'reset_settings',
]


pressurelab.families.REGISTRY.load()  # Load all registered example families
