"""
EPSFTA Battery Simulator

Generic discharge model of a battery with a polarization term and an
exponential zone:

    V = E0 - K * Q_eff / (Q_eff - q) - R_eff * i + A * exp(-B * q)

where q is the extracted charge (Ah). The curve-fit formulas in
battery_params_from_curve reproduce V_full at q = 0 and V_nom at q = Q_nom
for the rated current.

At zero load and q = 0 the voltage is E0 - K + A, not E0 + A: the
polarization term contributes -K even with no charge drawn. A form whose
polarization term also scales with q would give E0 + A there, but the
fit would then miss its own V_nom anchor (3.26 V instead of 3.6 V on a
4.2 V / 3.6 V cell).

Faults switch on at their onset and stay on:
- OpenCircuit: terminal current forced to zero, voltage is the open-circuit EMF
- InternalShort: a leakage current V / R_leak adds to the extracted charge
- ResistanceGrowth: internal resistance multiplied by a factor >= 1
- CapacityFade: usable capacity multiplied by a factor in (0, 1]
"""
import logging
import math
from bisect import bisect_right
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from epsfta.config import EpsftaConfig
from epsfta.errors import BadStepError, InvalidFaultError, NonMonotoneAnchorsError, SimulationError
from epsfta.models.trace import Trace

logger = logging.getLogger(__name__)

EXHAUSTION_FRACTION = 0.999


@dataclass(frozen=True)
class BatteryParams:
    e0: float
    k: float
    q_max: float
    a: float
    b: float
    r_int: float

    def __post_init__(self):
        if not self.q_max > 0:
            raise SimulationError(f"Q_max must be > 0, got {self.q_max}")
        if min(self.r_int, self.a, self.b, self.k) < 0:
            raise SimulationError('R_int, A, B and K must be >= 0')

    def as_dict(self):
        return asdict(self)


def battery_params_from_curve(v_full, v_exp, q_exp, v_nom, q_nom, q_max, i_rated, r_int):
    """Fit the discharge model to three points of a datasheet curve.

    Args:
        v_full: fully charged voltage (V)
        v_exp, q_exp: end of the exponential zone (V, Ah)
        v_nom, q_nom: end of the nominal zone (V, Ah)
        q_max: maximum capacity (Ah)
        i_rated: rated discharge current (A)
        r_int: internal resistance (ohm)

    Returns:
        BatteryParams
    """
    if not v_full >= v_exp > v_nom:
        raise NonMonotoneAnchorsError(
            f"need V_full >= V_exp > V_nom, got {v_full}, {v_exp}, {v_nom}")
    if not 0 < q_exp < q_nom < q_max:
        raise NonMonotoneAnchorsError(
            f"need 0 < Q_exp < Q_nom < Q_max, got {q_exp}, {q_nom}, {q_max}")
    if i_rated < 0 or r_int < 0:
        raise NonMonotoneAnchorsError('rated current and resistance must be >= 0')

    a = v_full - v_exp
    b = 3.0 / q_exp
    k = (v_full - v_nom + a * (math.exp(-b * q_nom) - 1.0)) * (q_max - q_nom) / q_nom
    e0 = v_full + k + r_int * i_rated - a
    return BatteryParams(e0=e0, k=k, q_max=q_max, a=a, b=b, r_int=r_int)


def terminal_voltage(params, q, current, q_eff=None, r_eff=None):
    """Terminal voltage for extracted charge q (Ah) at a given current (A)."""
    q_eff = params.q_max if q_eff is None else q_eff
    r_eff = params.r_int if r_eff is None else r_eff
    return (params.e0 - params.k * q_eff / (q_eff - q) - r_eff * current
            + params.a * math.exp(-params.b * q))


class BatteryFaultKind(str, Enum):
    OPEN_CIRCUIT = 'open-circuit'
    INTERNAL_SHORT = 'internal-short'
    RESISTANCE_GROWTH = 'resistance-growth'
    CAPACITY_FADE = 'capacity-fade'


@dataclass(frozen=True)
class BatteryFault:
    """A battery fault switching on at ``onset`` hours.

    ``value`` is R_leak (ohm) for internal-short and the multiplying factor
    for resistance-growth and capacity-fade; unused for open-circuit.
    """
    kind: BatteryFaultKind
    onset: float = 0.0
    value: float = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', BatteryFaultKind(self.kind))
        if self.onset < 0:
            raise InvalidFaultError(f"onset must be >= 0 hours, got {self.onset}")
        if self.kind is BatteryFaultKind.INTERNAL_SHORT and not (self.value and self.value > 0):
            raise InvalidFaultError('internal-short needs R_leak > 0')
        if self.kind is BatteryFaultKind.RESISTANCE_GROWTH and not (self.value and self.value >= 1):
            raise InvalidFaultError('resistance-growth needs a factor >= 1')
        if self.kind is BatteryFaultKind.CAPACITY_FADE and not (self.value and 0 < self.value <= 1):
            raise InvalidFaultError('capacity-fade needs a factor in (0, 1]')

    def describe(self):
        if self.value is None:
            return f"{self.kind.value}@{self.onset:g}h"
        return f"{self.kind.value}:{self.value:g}@{self.onset:g}h"


def parse_battery_fault(spec, onset=0.0):
    """Fault from a ``kind[:value]`` string, e.g. ``capacity-fade:0.5``."""
    kind, _, value = spec.partition(':')
    try:
        return BatteryFault(BatteryFaultKind(kind.strip()), onset, float(value) if value else None)
    except ValueError as e:
        raise InvalidFaultError(f"bad battery fault {spec!r}: {e}")


class LoadProfile:
    """Constant current or piecewise-constant steps of (start hour, amps)."""

    def __init__(self, load):
        if isinstance(load, (int, float)):
            steps = [(0.0, float(load))]
        else:
            steps = sorted((float(start), float(amps)) for start, amps in load)
        if not steps or steps[0][0] > 0:
            raise SimulationError('load profile must start at t = 0')
        if any(amps < 0 for _, amps in steps):
            raise SimulationError('load current must be >= 0 (discharge only)')
        self.steps = steps
        self._starts = [start for start, _ in steps]

    def __call__(self, t):
        return self.steps[bisect_right(self._starts, t) - 1][1]


def time_grid(dt, duration):
    """Shared time grid 0, dt, 2dt, ... up to duration."""
    if not dt > 0:
        raise BadStepError(f"step must be > 0 hours, got {dt}")
    if not duration >= dt:
        raise BadStepError(f"duration {duration} h is shorter than the step {dt} h")
    ratio = duration / dt
    steps = int(round(ratio)) if math.isclose(ratio, round(ratio), rel_tol=1e-9) else int(math.floor(ratio))
    return np.arange(steps + 1, dtype=float) * dt


def simulate_battery(params, i_load, fault=None, dt=EpsftaConfig.DEFAULT_DT_HOURS, duration=1.0,
                     v_cutoff=0.0):
    """Explicit fixed-step discharge simulation.

    The run stops early (trace truncated, ``truncated`` flag set) when the
    extracted charge reaches 0.999 of the usable capacity or the terminal
    voltage falls to ``v_cutoff``.

    Args:
        params: BatteryParams
        i_load: constant amps or [(start hour, amps), ...]
        fault: optional BatteryFault
        dt: step in hours
        duration: simulated time in hours
        v_cutoff: voltage floor that ends the run

    Returns:
        Trace
    """
    load = LoadProfile(i_load)
    times = time_grid(dt, duration)
    voltages = []
    currents = []
    q = 0.0
    truncated = ''

    for t in times:
        active = fault is not None and t >= fault.onset
        kind = fault.kind if active else None
        q_eff = params.q_max * fault.value if kind is BatteryFaultKind.CAPACITY_FADE else params.q_max
        r_eff = params.r_int * fault.value if kind is BatteryFaultKind.RESISTANCE_GROWTH else params.r_int

        if q >= EXHAUSTION_FRACTION * q_eff:
            truncated = 'charge-exhausted'
            break
        current = 0.0 if kind is BatteryFaultKind.OPEN_CIRCUIT else load(t)
        voltage = terminal_voltage(params, q, current, q_eff, r_eff)
        if voltage <= v_cutoff:
            truncated = 'cutoff-voltage'
            break

        voltages.append(voltage)
        currents.append(current)
        extraction = current
        if kind is BatteryFaultKind.INTERNAL_SHORT:
            extraction += voltage / fault.value
        q += extraction * dt

    if truncated:
        logger.warning("battery run %s stopped at %.6g h: %s",
                       fault.describe() if fault else 'healthy', times[len(voltages)], truncated)

    n = len(voltages)
    return Trace.from_columns(
        times[:n], voltages, currents,
        label=fault.describe() if fault else 'healthy',
        fault=fault.describe() if fault else '',
        truncated=bool(truncated),
        metadata={'model': 'battery', 'params': params.as_dict(), 'stop_reason': truncated or 'end'},
    )
