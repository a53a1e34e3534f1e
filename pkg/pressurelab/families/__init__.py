"""
Example family management routines.
"""

from pressurelab.exceptions import RangeError
from ._base import ExampleFamily
from ._registry import FamilyRegistry

__author__ = 'pressurelab developers'
__all__ = [
    'ExampleFamily',
    'FamilyRegistry',
    'get_available_families',
    'get_family',
    'register_family',
    'unregister_family',
    'family_is_registered',
    'resolve_shorthand',
]


REGISTRY = FamilyRegistry()


def get_available_families():
    """Return a sorted list of the names of all currently available example families."""
    return sorted(family.name for family in REGISTRY)


def get_family(family):
    """Return the ExampleFamily instance associated with this name, alias or shorthand."""
    return REGISTRY[family]


def register_family(family):
    """Register a new example family. The family parameter must be an ExampleFamily instance."""
    REGISTRY.add(family)


def unregister_family(family):
    """Unregister an example family. The family parameter may be a registered ExampleFamily instance or the name of a
    registered family."""
    REGISTRY.remove(family)


def family_is_registered(family):
    """Return a bool indicating whether the given family is currently registered. The family parameter may be either
    an ExampleFamily instance or a name."""
    return family in REGISTRY


def resolve_shorthand(text, potential_depth=1):
    """
    Build the model named by a shorthand such as rw_0.4_0.6, step_0.5_0_1 or branches_0.333333_1_2, or return None if
    the text does not start with a registered shorthand.
    """
    prefix, _, rest = text.partition('_')
    family = REGISTRY.get(prefix) if prefix else None
    if family is None or prefix.lower() != family.shorthand.lower() or not rest:
        return None
    try:
        params = [float(token) for token in rest.split('_')]
    except ValueError:
        raise RangeError("Shorthand %r has non-numeric parameters." % text, module='families',
                         operation='resolve_shorthand')
    return family.build_model(params, family.shorthand_orientation, potential_depth)


from . import _random_walk, _asymmetric_step, _multi_branch  # noqa: E402,F401  Built-in families register on import.
