"""
Implementation of the FamilyRegistry class.
"""

import warnings
from importlib import metadata

from pressurelab.exceptions import UnknownFamily
from ._base import ExampleFamily

__author__ = 'pressurelab developers'


ENTRY_POINT_GROUP = 'pressurelab.families'


class FamilyRegistry:
    """Tracks registered example families. Allows families to be referenced by name, alias or shorthand."""

    def __init__(self):
        self._families_by_name = {}
        self._families = set()

    def load(self):
        """
        Load all currently installed example families from their respective plugin modules. Warn if a family could
        not be loaded.
        """
        for entry_point in metadata.entry_points(group=ENTRY_POINT_GROUP):
            try:
                self.add(entry_point.load())
            except Exception as exc:
                warnings.warn(str(exc))

    @staticmethod
    def _keys(family):
        return [key.lower() for key in (family.name, family.shorthand) + family.aliases]

    def add(self, family):
        """Register a new example family. A family registered under a taken name replaces the old one."""
        assert isinstance(family, ExampleFamily)

        for key in self._keys(family):
            if key in self._families_by_name:
                self.discard(self._families_by_name[key])

        for key in self._keys(family):
            self._families_by_name[key] = family
        self._families.add(family)

    def remove(self, family):
        """Unregister an example family."""
        family = self[family]
        for key in self._keys(family):
            if self._families_by_name.get(key) is family:
                del self._families_by_name[key]
        self._families.remove(family)

    def discard(self, family):
        """Unregister an example family, but do not complain if it was not registered to start with."""
        if family in self:
            self.remove(family)

    def get(self, item, default=None):
        """Look up and return an example family."""
        if item in self:
            return self[item]
        else:
            return default

    def __getitem__(self, item):
        if isinstance(item, ExampleFamily):
            if item not in self._families:
                raise UnknownFamily("Family %r is not registered." % item.name, module='families',
                                    operation='get_family')
            return item
        assert item and isinstance(item, str)
        try:
            return self._families_by_name[item.lower()]
        except KeyError:
            raise UnknownFamily("No example family named %r; available: %s." % (item, ', '.join(
                sorted(family.name for family in self._families))), module='families', operation='get_family')

    def __iter__(self):
        return iter(self._families)

    def __len__(self):
        return len(self._families)

    def __contains__(self, item):
        if isinstance(item, ExampleFamily):
            return item in self._families
        else:
            assert item and isinstance(item, str)
            return item.lower() in self._families_by_name
