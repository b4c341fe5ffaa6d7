"""
EPSFTA Scenario Enumerator

Exhaustive enumeration of all 2**M fault combinations of a tree's
stochastic events. Every combination is classified as

- Fail: the fail gate (default: top) is true
- Recoverable: not Fail, but one of the recoverable gates is true
- Survive: everything else

and counted by the number m of failed events. Scenarios are equally
weighted; probability-weighted evaluation lives in the quantifier.
"""
import csv
import io
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from epsfta.config import EpsftaConfig
from epsfta.errors import BadClassifierError, InconsistentCountsError, TooManyEventsError
from epsfta.models.fault_tree import GateNode, assignment_blocks, ensure_valid, evaluate_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioClassifierConfig:
    """Which gates decide Fail and Recoverable.

    ``excluded`` events are held in the not-failed state and do not count
    towards M.
    """
    fail_gate: str = None
    recoverable_gates: frozenset = field(default_factory=frozenset)
    excluded: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'recoverable_gates', frozenset(self.recoverable_gates))
        object.__setattr__(self, 'excluded', frozenset(self.excluded))

    def validate(self, tree):
        tree = ensure_valid(tree)
        fail_gate = self.fail_gate or tree.top
        problems = []
        for gate_id in [fail_gate, *sorted(self.recoverable_gates)]:
            if gate_id not in tree or not isinstance(tree.node(gate_id), GateNode):
                problems.append(f"{gate_id} is not a gate of the tree")
        stochastic = set(tree.stochastic_events)
        for event_id in sorted(self.excluded):
            if event_id not in stochastic:
                problems.append(f"excluded {event_id} is not a stochastic event")
        if problems:
            raise BadClassifierError('; '.join(problems))
        return fail_gate


@dataclass(frozen=True)
class ScenarioCounts:
    m: int
    n: int
    survive: int
    recoverable: int
    fail: int


@dataclass(frozen=True)
class ScenarioStats:
    """Scenario counts per number of failed events, plus totals."""
    M: int
    N: int
    per_m: tuple
    S: int
    R: int
    F: int
    events: tuple = ()

    def __post_init__(self):
        check_consistency(self)


def check_consistency(stats):
    """Assert the summation identities of the scenario counts."""
    if stats.N != 1 << stats.M:
        raise InconsistentCountsError(f"N = {stats.N} but 2**M = {1 << stats.M}")
    if [row.m for row in stats.per_m] != list(range(stats.M + 1)):
        raise InconsistentCountsError('per-m rows must cover m = 0..M in order')
    for row in stats.per_m:
        if row.n != comb(stats.M, row.m):
            raise InconsistentCountsError(f"N({row.m}) = {row.n}, expected C({stats.M}, {row.m})")
        if row.survive + row.recoverable + row.fail != row.n:
            raise InconsistentCountsError(f"classes do not partition N({row.m})")
        if min(row.survive, row.recoverable, row.fail) < 0:
            raise InconsistentCountsError(f"negative count at m = {row.m}")
    if sum(row.n for row in stats.per_m) != stats.N:
        raise InconsistentCountsError('sum of N(m) differs from N')
    if sum(row.survive for row in stats.per_m) != stats.S:
        raise InconsistentCountsError('sum of S(m) differs from S')
    if sum(row.recoverable for row in stats.per_m) != stats.R:
        raise InconsistentCountsError('sum of R(m) differs from R')
    if sum(row.fail for row in stats.per_m) != stats.F:
        raise InconsistentCountsError('sum of F(m) differs from F')
    if stats.S + stats.R + stats.F != stats.N:
        raise InconsistentCountsError('S + R + F differs from N')


def enumerate_scenarios(tree, config=None, limit=EpsftaConfig.ENUMERATION_EVENT_LIMIT):
    """Classify every subset of the stochastic events.

    Args:
        tree: FaultTree
        config: ScenarioClassifierConfig (default: fail on top, no recoverable gates)
        limit: largest M accepted

    Returns:
        ScenarioStats
    """
    tree = ensure_valid(tree)
    config = config or ScenarioClassifierConfig()
    fail_gate = config.validate(tree)
    events = tuple(e for e in tree.stochastic_events if e not in config.excluded)
    count = len(events)
    if count > limit:
        raise TooManyEventsError(f"enumeration supports at most {limit} events, tree has {count}")

    recoverable = sorted(config.recoverable_gates)
    fail_by_m = np.zeros(count + 1, dtype=np.int64)
    recoverable_by_m = np.zeros(count + 1, dtype=np.int64)
    for start, bits in assignment_blocks(count):
        size = bits.shape[0]
        columns = {event: bits[:, j] for j, event in enumerate(events)}
        values = evaluate_batch(tree, columns, size)
        failed_count = bits.sum(axis=1)
        fail = values[fail_gate]
        degraded = np.zeros(size, dtype=bool)
        for gate_id in recoverable:
            degraded |= values[gate_id]
        degraded &= ~fail
        fail_by_m += np.bincount(failed_count[fail], minlength=count + 1)
        recoverable_by_m += np.bincount(failed_count[degraded], minlength=count + 1)
        logger.debug("enumerated block at %d (%d scenarios)", start, size)

    rows = []
    for m in range(count + 1):
        n = comb(count, m)
        f = int(fail_by_m[m])
        r = int(recoverable_by_m[m])
        rows.append(ScenarioCounts(m=m, n=n, survive=n - f - r, recoverable=r, fail=f))
    stats = ScenarioStats(
        M=count,
        N=1 << count,
        per_m=tuple(rows),
        S=sum(row.survive for row in rows),
        R=sum(row.recoverable for row in rows),
        F=sum(row.fail for row in rows),
        events=events,
    )
    logger.info("enumerated %d scenarios over %d events: F=%d R=%d S=%d",
                stats.N, stats.M, stats.F, stats.R, stats.S)
    return stats


@dataclass(frozen=True)
class ScenarioProbabilities:
    """Exact ratios of the scenario counts.

    ``p_fail`` is the probability of system failure under uniform scenario
    weighting (F/N); ``p_survive`` is S/N. ``per_m`` holds
    (m, P_m(S), P_m(R), P_m(F)).
    """
    p_fail: Fraction
    p_survive: Fraction
    per_m: tuple


def scenario_probabilities(stats):
    """Per-m conditional probabilities of the three classes."""
    check_consistency(stats)
    rows = []
    for row in stats.per_m:
        rows.append((row.m,
                     Fraction(row.survive, row.n),
                     Fraction(row.recoverable, row.n),
                     Fraction(row.fail, row.n)))
    return ScenarioProbabilities(
        p_fail=Fraction(stats.F, stats.N),
        p_survive=Fraction(stats.S, stats.N),
        per_m=tuple(rows),
    )


TABLE_HEADER = ('m', 'N(m)', 'S(m)', 'R(m)', 'F(m)', 'P_m(F)')


def stats_rows(stats):
    """Table rows (m, N(m), S(m), R(m), F(m), P_m(F) as float)."""
    return [(row.m, row.n, row.survive, row.recoverable, row.fail, row.fail / row.n)
            for row in stats.per_m]


def format_stats(stats):
    """Plain-text scenario table with a totals header."""
    probabilities = scenario_probabilities(stats)
    lines = [
        f"M = {stats.M}, N = {stats.N}",
        f"S = {stats.S}, R = {stats.R}, F = {stats.F}",
        f"P(fail) = F/N = {float(probabilities.p_fail):.6f}   S/N = {float(probabilities.p_survive):.6f}",
        '',
        f"{'m':>3} {'N(m)':>9} {'S(m)':>9} {'R(m)':>9} {'F(m)':>9} {'P_m(F)':>10}",
    ]
    for m, n, s, r, f, p in stats_rows(stats):
        lines.append(f"{m:>3} {n:>9} {s:>9} {r:>9} {f:>9} {p:>10.6f}")
    return '\n'.join(lines) + '\n'


def stats_to_csv(stats):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(TABLE_HEADER)
    for m, n, s, r, f, p in stats_rows(stats):
        writer.writerow((m, n, s, r, f, repr(p)))
    return buffer.getvalue()


def stats_as_dict(stats):
    probabilities = scenario_probabilities(stats)
    return {
        'M': stats.M,
        'N': stats.N,
        'S': stats.S,
        'R': stats.R,
        'F': stats.F,
        'events': list(stats.events),
        'p_fail': float(probabilities.p_fail),
        'p_survive': float(probabilities.p_survive),
        'per_m': [
            {'m': row.m, 'N': row.n, 'S': row.survive, 'R': row.recoverable, 'F': row.fail,
             'P_S': float(ps), 'P_R': float(pr), 'P_F': float(pf)}
            for row, (_, ps, pr, pf) in zip(stats.per_m, probabilities.per_m)
        ],
    }
