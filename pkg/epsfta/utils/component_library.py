"""
EPSFTA Component Library

Human-editable YAML table of component failure rates (low/high range per
hour at a fixed temperature). Names are matched case-insensitively.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import yaml

from epsfta.config import component_library_path
from epsfta.errors import SchemaViolationError, UnknownComponentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComponentEntry:
    name: str
    lambda_low: float
    lambda_high: float
    temperature_c: float = 40.0

    def __post_init__(self):
        if not 0 < self.lambda_low <= self.lambda_high:
            raise SchemaViolationError(
                self.name, f"need 0 < lambda_low <= lambda_high, got {self.lambda_low}, {self.lambda_high}")

    @property
    def midpoint(self):
        return (self.lambda_low + self.lambda_high) / 2.0

    @property
    def is_point_value(self):
        return self.lambda_low == self.lambda_high

    @property
    def mtbf_hours(self):
        return 1.0 / self.midpoint


def _to_per_hour(value, unit):
    """Scale a table value to failures per hour without float drift.

    Units like 1e-9 are applied as a division by their integer reciprocal,
    so 2000 x 1e-9 comes out as exactly the float 2e-6.
    """
    reciprocal = 1.0 / unit
    if reciprocal >= 1 and abs(reciprocal - round(reciprocal)) < 1e-6 * reciprocal:
        return float(value) / float(round(reciprocal))
    return float(value) * unit


class ComponentLibrary:
    """Loaded component table."""

    def __init__(self, entries, path=None):
        self.path = Path(path) if path else None
        self._entries = {}
        for entry in entries:
            self._entries[entry.name.casefold()] = entry

    @classmethod
    def load(cls, path=None):
        """Read the library file (default: environment or bundled file)."""
        path = Path(path or component_library_path())
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict) or not isinstance(data.get('components'), list):
            raise SchemaViolationError('components', 'library needs a components list', source=str(path))
        unit = float(data.get('unit', 1.0))
        temperature = float(data.get('temperature_c', 40.0))
        entries = []
        for position, item in enumerate(data['components']):
            try:
                entries.append(ComponentEntry(
                    name=str(item['name']),
                    lambda_low=_to_per_hour(item['lambda_low'], unit),
                    lambda_high=_to_per_hour(item.get('lambda_high', item['lambda_low']), unit),
                    temperature_c=float(item.get('temperature_c', temperature)),
                ))
            except (KeyError, TypeError, ValueError) as e:
                raise SchemaViolationError(f"components[{position}]", f"bad entry: {e}", source=str(path))
        logger.debug("loaded %d components from %s", len(entries), path)
        return cls(entries, path)

    def __iter__(self):
        return iter(self._entries.values())

    def __len__(self):
        return len(self._entries)

    def __contains__(self, name):
        return str(name).casefold() in self._entries

    def get(self, name):
        """Entry for ``name`` or None."""
        return self._entries.get(str(name).casefold())

    def lookup(self, name):
        entry = self.get(name)
        if entry is None:
            known = ', '.join(e.name for e in self)
            raise UnknownComponentError(f"unknown component {name!r}; known: {known}")
        return entry


_default_library = None


def default_library():
    """Library from the configured path, loaded once."""
    global _default_library
    if _default_library is None:
        _default_library = ComponentLibrary.load()
    return _default_library


def lookup_component(name, library=None):
    """Table entry for a component name (case-insensitive)."""
    return (library or default_library()).lookup(name)
