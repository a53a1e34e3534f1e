"""
Process-wide numerical settings.

The settings object is a plain record of tunables. Library code reads it through get_settings(); callers change it
through set_setting() or temporarily through the overridden() context manager.
"""

import contextlib
import logging
import os

from pressurelab.exceptions import RangeError

__author__ = 'pressurelab developers'
__all__ = [
    'Settings',
    'get_settings',
    'set_setting',
    'reset_settings',
    'overridden',
    'THREADS_VARIABLE',
]


_LOGGER = logging.getLogger(__name__)

THREADS_VARIABLE = 'PRESSURELAB_THREADS'


def _threads_from_environment():
    raw = os.environ.get(THREADS_VARIABLE)
    if not raw:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        _LOGGER.warning("Ignoring non-integer %s=%r.", THREADS_VARIABLE, raw)
        return 1
    return max(1, threads)


class Settings:
    """Tunables shared by the numerical modules."""

    _defaults = {
        'power_tolerance': 1e-12,          # Successive Rayleigh quotients
        'power_max_iterations': 100000,
        'root_tolerance': 1e-13,
        'newton_max_iterations': 100,
        'enumeration_cap': 2 ** 20,        # Words enumerated by brute-force oracles
        'width_cap': 10 ** 7,              # Cells held by one lattice row set
        'orbit_budget': 2 * 10 ** 7,       # Stored lift path entries in an orbit batch
        'recurrence_tail_fraction': 0.5,   # Recurrent proxy looks at j >= fraction * n
        'symmetry_level_cap': 10,
        'growth_thresholds': (0.25, 0.85),  # (log-log slope, dyadic increment ratio)
        'boundary_tolerance': 1e-12,
    }

    def __init__(self, **overrides):
        values = dict(self._defaults)
        values['threads'] = _threads_from_environment()
        for name, value in overrides.items():
            if name not in values:
                raise RangeError("Unknown setting: %r" % name, module='config', operation='Settings')
            values[name] = value
        self.__dict__.update(values)

    def copy(self, **overrides):
        """Return a copy of these settings with some values replaced."""
        values = {name: getattr(self, name) for name in self.names()}
        values.update(overrides)
        return Settings(**values)

    @classmethod
    def names(cls):
        """Return the sorted names of all settings."""
        return sorted(list(cls._defaults) + ['threads'])

    def as_dict(self):
        """Return the settings as a dictionary."""
        return {name: getattr(self, name) for name in self.names()}

    def __repr__(self):
        return 'Settings(' + ', '.join('%s=%r' % item for item in self.as_dict().items()) + ')'


_SETTINGS = Settings()


def get_settings():
    """Return the current settings."""
    return _SETTINGS


def set_setting(name, value):
    """Replace the value of a single named setting."""
    global _SETTINGS
    if name not in Settings.names():
        raise RangeError("Unknown setting: %r" % name, module='config', operation='set_setting')
    if name == 'threads' and (not isinstance(value, int) or value < 1):
        raise RangeError("Thread count must be a positive integer.", module='config', operation='set_setting')
    _SETTINGS = _SETTINGS.copy(**{name: value})


def reset_settings():
    """Restore the default settings, re-reading the thread count from the environment."""
    global _SETTINGS
    _SETTINGS = Settings()


@contextlib.contextmanager
def overridden(**values):
    """Temporarily replace settings within a with-block."""
    global _SETTINGS
    previous = _SETTINGS
    _SETTINGS = previous.copy(**values)
    try:
        yield _SETTINGS
    finally:
        _SETTINGS = previous
