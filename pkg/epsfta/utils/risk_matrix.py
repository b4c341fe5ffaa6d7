"""
EPSFTA Risk Matrix

5x5 likelihood x severity classification. Likelihood bins come from
log-decade probability thresholds; the colour of a cell follows the sum of
its bins (Red at or above ``red_sum``, Yellow at or above ``yellow_sum``,
otherwise Green). Thresholds are configurable through a YAML file.
"""
import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import yaml

from epsfta.config import risk_config_path
from epsfta.errors import OutOfRangeError, SchemaViolationError, ThresholdConfigError

logger = logging.getLogger(__name__)

BINS = (1, 2, 3, 4, 5)


class RiskColor(str, Enum):
    GREEN = 'Green'
    YELLOW = 'Yellow'
    RED = 'Red'

    @property
    def letter(self):
        return self.value[0]

    @property
    def rank(self):
        return _RANK[self]


_RANK = {RiskColor.GREEN: 0, RiskColor.YELLOW: 1, RiskColor.RED: 2}


@dataclass(frozen=True)
class RiskConfig:
    """Likelihood thresholds and colour sums.

    ``thresholds`` are the four upper bounds of bins 1-4; a probability at
    or above the last one falls in bin 5.
    """
    thresholds: tuple = (1e-6, 1e-4, 1e-2, 1e-1)
    yellow_sum: int = 5
    red_sum: int = 8

    def __post_init__(self):
        object.__setattr__(self, 'thresholds', tuple(float(x) for x in self.thresholds))
        self.validate()

    def validate(self):
        t = self.thresholds
        if len(t) != 4:
            raise ThresholdConfigError(f"need 4 likelihood thresholds, got {len(t)}")
        if not all(0 < a < b for a, b in zip((0.0,) + t, t)) or t[-1] > 1:
            raise ThresholdConfigError(f"thresholds must ascend strictly within (0, 1], got {list(t)}")
        if not 2 <= self.yellow_sum <= self.red_sum <= 11:
            raise ThresholdConfigError(
                f"need 2 <= yellow_sum <= red_sum <= 11, got {self.yellow_sum}, {self.red_sum}")

    @classmethod
    def load(cls, path=None):
        """Config from a YAML file; built-in defaults when no path is configured."""
        path = path or risk_config_path()
        if not path:
            return cls()
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ThresholdConfigError(f"{path}: expected a mapping")
        try:
            config = cls(
                thresholds=tuple(data.get('likelihood_thresholds', cls.thresholds)),
                yellow_sum=int(data.get('yellow_sum', cls.yellow_sum)),
                red_sum=int(data.get('red_sum', cls.red_sum)),
            )
        except (TypeError, ValueError) as e:
            raise ThresholdConfigError(f"{path}: {e}")
        logger.debug("risk thresholds from %s: %s", path, config)
        return config

    def color(self, likelihood, severity):
        total = likelihood + severity
        if total >= self.red_sum:
            return RiskColor.RED
        if total >= self.yellow_sum:
            return RiskColor.YELLOW
        return RiskColor.GREEN


DEFAULT_CONFIG = RiskConfig()


def likelihood_bin(probability, config=None):
    """Likelihood bin 1..5 for a probability in [0, 1]."""
    config = config or DEFAULT_CONFIG
    if not 0.0 <= probability <= 1.0:
        raise OutOfRangeError(f"probability must be within [0, 1], got {probability}")
    return bisect_right(config.thresholds, probability) + 1


@dataclass(frozen=True)
class RiskItem:
    name: str
    probability: float
    severity: int

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise OutOfRangeError(f"{self.name}: probability must be within [0, 1], got {self.probability}")
        if self.severity not in BINS:
            raise OutOfRangeError(f"{self.name}: severity must be 1..5, got {self.severity}")


@dataclass(frozen=True)
class RiskCell:
    likelihood: int
    severity: int
    color: RiskColor
    count: int = 0
    items: tuple = ()

    def as_record(self):
        return {
            'likelihood': self.likelihood,
            'severity': self.severity,
            'color': self.color.value,
            'count': self.count,
            'items': list(self.items),
        }


@dataclass(frozen=True)
class RiskMatrix:
    cells: tuple
    config: RiskConfig = field(default=DEFAULT_CONFIG)

    def cell(self, likelihood, severity):
        return self.cells[(likelihood - 1) * 5 + (severity - 1)]

    @property
    def total(self):
        return sum(c.count for c in self.cells)

    def color_of(self, item):
        return self.config.color(likelihood_bin(item.probability, self.config), item.severity)

    def as_records(self):
        return [c.as_record() for c in self.cells]


def classify(items, config=None):
    """Place every item in its (likelihood, severity) cell."""
    config = config or DEFAULT_CONFIG
    placed = {}
    for item in items:
        key = (likelihood_bin(item.probability, config), item.severity)
        placed.setdefault(key, []).append(item.name)
    cells = tuple(
        RiskCell(l, s, config.color(l, s), len(placed.get((l, s), ())), tuple(placed.get((l, s), ())))
        for l in BINS for s in BINS
    )
    return RiskMatrix(cells, config)


def render_text(matrix):
    """Grid with likelihood 5 at the top and severity along the columns.

    Each cell shows the colour letter and item count, e.g. ``Y:2``.
    """
    lines = ['likelihood \\ severity ' + ''.join(f"{s:>6}" for s in BINS)]
    for l in reversed(BINS):
        row = ''.join(f"{matrix.cell(l, s).color.letter + ':' + str(matrix.cell(l, s).count):>6}" for s in BINS)
        lines.append(f"{l:>22} {row}")
    lines.append(f"items: {matrix.total}")
    return '\n'.join(lines) + '\n'


def _whole_severity(value):
    """Severity as an int; 3 and 3.0 pass, 2.7 and booleans do not."""
    if isinstance(value, bool):
        raise ValueError(f"severity must be a whole number, got {value!r}")
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"severity must be a whole number, got {value!r}")
    return int(number)


def load_risk_items(path):
    """Items from a YAML list of ``{name, probability, severity}``."""
    path = Path(path)
    with open(path, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f)
    if isinstance(data, dict):
        data = data.get('items')
    if not isinstance(data, list):
        raise SchemaViolationError('items', 'expected a list of risk items', source=str(path))
    items = []
    for position, entry in enumerate(data):
        try:
            items.append(RiskItem(str(entry['name']), float(entry['probability']),
                                  _whole_severity(entry['severity'])))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaViolationError(f"items[{position}]", f"bad risk item: {e}", source=str(path))
    return items


def items_from_cut_sets(cut_sets, probabilities, severity):
    """One item per minimal cut set, at the product of its event probabilities."""
    items = []
    for cut_set in cut_sets:
        probability = 1.0
        for event in cut_set.events:
            probability *= probabilities[event]
        items.append(RiskItem(str(cut_set), probability, severity))
    return items
