"""
EPSFTA Probability Models

Per-event stochastic models and the mission profile they are evaluated on.

Three event models, named after the input types of common fault-tree tools:
- ConstantProbability: time-independent probability q
- FailureRateOnly: exponential law with failure rate lambda (per hour)
- FailureWithRepair: failure rate lambda and repair rate mu (per hour)
"""
import math
from dataclasses import dataclass, field

from epsfta.errors import InvalidModelError, NegativeTimeError


@dataclass(frozen=True)
class ConstantProbability:
    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise InvalidModelError(f"probability must be within [0, 1], got {self.q}")

    @property
    def failure_rate(self):
        # A time-independent probability has no rate
        return 0.0

    def describe(self):
        return f"constant q={self.q:g}"


@dataclass(frozen=True)
class FailureRateOnly:
    failure_rate: float

    def __post_init__(self):
        if not self.failure_rate >= 0.0:
            raise InvalidModelError(f"failure rate must be >= 0, got {self.failure_rate}")

    def describe(self):
        return f"rate lambda={self.failure_rate:g}/h"


@dataclass(frozen=True)
class FailureWithRepair:
    failure_rate: float
    repair_rate: float

    def __post_init__(self):
        if not self.failure_rate >= 0.0:
            raise InvalidModelError(f"failure rate must be >= 0, got {self.failure_rate}")
        if not self.repair_rate >= 0.0:
            raise InvalidModelError(f"repair rate must be >= 0, got {self.repair_rate}")

    def describe(self):
        return f"rate lambda={self.failure_rate:g}/h repair mu={self.repair_rate:g}/h"


def _check_time(t):
    if t < 0:
        raise NegativeTimeError(f"time must be >= 0 hours, got {t}")


def event_unreliability(model, t):
    """Probability that the event is in the failed state at time t.

    Args:
        model: ConstantProbability, FailureRateOnly or FailureWithRepair
        t: hours since mission start

    Returns:
        ConstantProbability -> q; FailureRateOnly -> 1 - exp(-lambda t);
        FailureWithRepair -> lambda/(lambda+mu) (1 - exp(-(lambda+mu) t))
    """
    _check_time(t)
    if isinstance(model, ConstantProbability):
        return model.q
    if isinstance(model, FailureRateOnly):
        return -math.expm1(-model.failure_rate * t)
    if isinstance(model, FailureWithRepair):
        total = model.failure_rate + model.repair_rate
        if total <= 0.0:
            return 0.0
        return model.failure_rate / total * -math.expm1(-total * t)
    raise InvalidModelError(f"unsupported probability model: {model!r}")


def first_failure_probability(model, t):
    """Probability of at least one failure by time t, repair ignored."""
    _check_time(t)
    if isinstance(model, ConstantProbability):
        return model.q
    return -math.expm1(-model.failure_rate * t)


def steady_state_unavailability(model):
    """Limit of event_unreliability as t grows without bound."""
    if isinstance(model, ConstantProbability):
        return model.q
    if isinstance(model, FailureRateOnly):
        return 1.0 if model.failure_rate > 0.0 else 0.0
    total = model.failure_rate + model.repair_rate
    return model.failure_rate / total if total > 0.0 else 0.0


def mtbf(model):
    """Mean time between failures in hours (inf when the rate is zero)."""
    rate = model.failure_rate
    return math.inf if rate == 0.0 else 1.0 / rate


@dataclass(frozen=True)
class MissionProfile:
    """Mission length and optional instants for reliability-vs-time curves."""
    mission_time: float
    time_grid: tuple = field(default=())

    def __post_init__(self):
        grid = tuple(float(t) for t in self.time_grid)
        object.__setattr__(self, 'time_grid', grid)
        if not self.mission_time > 0:
            raise InvalidModelError(f"mission time must be > 0 hours, got {self.mission_time}")
        for earlier, later in zip(grid, grid[1:]):
            if not later > earlier:
                raise InvalidModelError('time grid must be strictly ascending')
        if grid and (grid[0] < 0 or grid[-1] > self.mission_time):
            raise InvalidModelError('time grid must lie within [0, mission_time]')

    @classmethod
    def with_uniform_grid(cls, mission_time, points):
        """Profile whose grid has ``points`` evenly spaced instants over [0, T]."""
        if points < 2:
            return cls(mission_time)
        step = mission_time / (points - 1)
        grid = [step * k for k in range(points - 1)] + [mission_time]
        return cls(mission_time, tuple(grid))
