"""
EPSFTA Quantifier

Top-event probability and mission figures for a fault tree.

Two methods for the top-event probability:
- EXACT: sum of independent event weights over every assignment of the
  stochastic events that triggers the top event (2**M terms, M capped)
- RARE_EVENT: sum over minimal cut sets of the product of their event
  probabilities

Results are summed block by block in ascending assignment index, so the
exact value does not depend on how the assignment space is partitioned.
"""
import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from epsfta.config import EpsftaConfig
from epsfta.errors import MissingModelError, TooManyEventsError
from epsfta.models.fault_tree import assignment_blocks, ensure_valid, evaluate_batch
from epsfta.models.probability import (
    event_unreliability,
    first_failure_probability,
    steady_state_unavailability,
)
from epsfta.utils.cut_sets import minimal_cut_sets

logger = logging.getLogger(__name__)


class Method(str, Enum):
    EXACT = 'exact'
    RARE_EVENT = 'rare-event'


# Row labels and field names, in the order mission-reliability tools print them
RESULT_ROWS = (
    ('Failure Rate, Predicted', 'failure_rate_predicted'),
    ('Reliability, Predicted', 'reliability_predicted'),
    ('Availability', 'availability'),
    ('Failure Rate, Mission', 'failure_rate_mission'),
    ('Reliability, Mission', 'reliability_mission'),
    ('Availability, Mission', 'availability_mission'),
)


@dataclass(frozen=True)
class QuantResult:
    """Mission figures; failure rates are per ``rate_scale`` hours."""
    failure_rate_predicted: float
    reliability_predicted: float
    availability: float
    failure_rate_mission: float
    reliability_mission: float
    availability_mission: float

    def as_dict(self):
        return asdict(self)

    def rows(self):
        """(label, value) pairs in display order."""
        return [(label, getattr(self, name)) for label, name in RESULT_ROWS]


def _require_models(tree, models):
    missing = [e for e in tree.stochastic_events if e not in models]
    if missing:
        raise MissingModelError(f"no probability model for events: {', '.join(missing)}")


def _exact_probability(tree, probabilities, limit):
    events = tree.stochastic_events
    if len(events) > limit:
        raise TooManyEventsError(
            f"exact method supports at most {limit} stochastic events, tree has {len(events)}; "
            "use the rare-event method", code='TooManyEventsForExact')
    q = np.array([probabilities[e] for e in events], dtype=float)
    total = 0.0
    for start, bits in assignment_blocks(len(events)):
        size = bits.shape[0]
        columns = {event: bits[:, j] for j, event in enumerate(events)}
        top = evaluate_batch(tree, columns, size)[tree.top]
        if not top.any():
            continue
        weights = np.prod(np.where(bits, q, 1.0 - q), axis=1)
        total += float(weights[top].sum())
    return min(max(total, 0.0), 1.0)


def _rare_event_probability(tree, probabilities):
    total = 0.0
    for cut_set in minimal_cut_sets(tree):
        total += math.prod(probabilities[e] for e in cut_set.events)
    return total


def probability_from_event_probabilities(tree, probabilities, method=Method.EXACT,
                                         limit=EpsftaConfig.EXACT_EVENT_LIMIT):
    """Top-event probability from per-event probabilities.

    Args:
        tree: FaultTree
        probabilities: dict stochastic event id -> probability
        method: Method.EXACT or Method.RARE_EVENT
        limit: largest M accepted by the exact method
    """
    tree = ensure_valid(tree)
    _require_models(tree, probabilities)
    method = Method(method)
    if method is Method.EXACT:
        return _exact_probability(tree, probabilities, limit)
    return _rare_event_probability(tree, probabilities)


def top_probability(tree, models, t, method=Method.EXACT, limit=EpsftaConfig.EXACT_EVENT_LIMIT):
    """Probability of the top event at time t.

    Args:
        tree: FaultTree
        models: dict stochastic event id -> probability model
        t: hours
        method: Method.EXACT or Method.RARE_EVENT

    Returns:
        probability (exact value within [0, 1]; rare-event value >= 0)
    """
    tree = ensure_valid(tree)
    _require_models(tree, models)
    probabilities = {e: event_unreliability(models[e], t) for e in tree.stochastic_events}
    return probability_from_event_probabilities(tree, probabilities, method, limit)


def _vesely_rate(tree, models, mission_time):
    """Failure frequency summed over minimal cut sets, per hour."""
    q = {e: event_unreliability(models[e], mission_time) for e in tree.stochastic_events}
    rate = 0.0
    for cut_set in minimal_cut_sets(tree):
        for j in cut_set.events:
            others = math.prod(q[k] for k in cut_set.events if k != j)
            rate += models[j].failure_rate * others
    return rate


def quantify_mission(tree, models, profile, method=Method.EXACT, rate_scale=EpsftaConfig.RATE_SCALE,
                     limit=EpsftaConfig.EXACT_EVENT_LIMIT):
    """Mission reliability, availability and failure rates.

    Mission reliability counts the first failure only (repair ignored);
    availability uses steady-state unavailabilities. The predicted failure
    rate sums the cut-set failure frequencies; predicted reliability is the
    exponential survival at that rate over the mission.

    Args:
        tree: coherent FaultTree
        models: dict stochastic event id -> probability model
        profile: MissionProfile
        method: top-event method
        rate_scale: failure rates are reported per this many hours

    Returns:
        QuantResult
    """
    tree = ensure_valid(tree)
    _require_models(tree, models)
    mission_time = profile.mission_time

    first_failure = {e: first_failure_probability(models[e], mission_time) for e in tree.stochastic_events}
    reliability_mission = 1.0 - probability_from_event_probabilities(tree, first_failure, method, limit)
    reliability_mission = min(max(reliability_mission, 0.0), 1.0)

    steady = {e: steady_state_unavailability(models[e]) for e in tree.stochastic_events}
    availability = 1.0 - probability_from_event_probabilities(tree, steady, method, limit)
    availability = min(max(availability, 0.0), 1.0)

    if reliability_mission >= 1.0:
        failure_rate_mission = 0.0
    elif reliability_mission <= 0.0:
        failure_rate_mission = math.inf
    else:
        failure_rate_mission = -math.log(reliability_mission) / mission_time * rate_scale

    predicted_per_hour = _vesely_rate(tree, models, mission_time)
    reliability_predicted = math.exp(-predicted_per_hour * mission_time)

    logger.info("quantified %s over %g h: R_mission=%.6g A=%.6g",
                tree.top, mission_time, reliability_mission, availability)
    return QuantResult(
        failure_rate_predicted=predicted_per_hour * rate_scale,
        reliability_predicted=reliability_predicted,
        availability=availability,
        failure_rate_mission=failure_rate_mission,
        reliability_mission=reliability_mission,
        availability_mission=availability,
    )


def reliability_curve(tree, models, profile, method=Method.EXACT, limit=EpsftaConfig.EXACT_EVENT_LIMIT):
    """Mission reliability at each instant of ``profile.time_grid``.

    Returns:
        list of (t hours, reliability)
    """
    tree = ensure_valid(tree)
    _require_models(tree, models)
    curve = []
    for t in profile.time_grid:
        first_failure = {e: first_failure_probability(models[e], t) for e in tree.stochastic_events}
        value = 1.0 - probability_from_event_probabilities(tree, first_failure, method, limit)
        curve.append((t, min(max(value, 0.0), 1.0)))
    return curve
