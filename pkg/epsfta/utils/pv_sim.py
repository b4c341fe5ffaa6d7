"""
EPSFTA Solar Array Simulator

Single-diode cell model composed into an array of parallel strings of
series cells:

    I = I_ph - I_0 (exp((V_c + I R_s) / (n V_t)) - 1) - (V_c + I R_s) / R_sh

Cells in a string carry the same current and share the string voltage
equally. Each string has a blocking diode, so string currents are never
negative. The implicit equation is solved by bracketed root finding
(scipy brentq, which falls back to bisection steps).

Array faults switch on at their onset and stay on:
- Ground: some cells of a string are shorted to ground and drop out
- LineLine: a span of cells of a string is shorted and drops out
- Mismatch: a string's irradiance is scaled (partial shading)
- OpenString: a string is disconnected
"""
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from epsfta.config import EpsftaConfig
from epsfta.errors import InvalidFaultError, NoConvergenceError, SimulationError
from epsfta.models.trace import Trace
from epsfta.utils.battery_sim import time_grid

logger = logging.getLogger(__name__)

CURRENT_TOLERANCE = 1e-9
_RTOL = 4 * np.finfo(float).eps
_MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class PVParams:
    photocurrent: float
    saturation_current: float
    ideality: float
    series_resistance: float
    shunt_resistance: float
    thermal_voltage: float
    series_cells: int
    parallel_strings: int
    irradiance: tuple = field(default=())

    def __post_init__(self):
        irradiance = tuple(float(x) for x in self.irradiance) or (1.0,) * self.parallel_strings
        object.__setattr__(self, 'irradiance', irradiance)
        if self.series_cells < 1 or self.parallel_strings < 1:
            raise SimulationError('need at least one series cell and one string')
        if len(irradiance) != self.parallel_strings:
            raise SimulationError('one irradiance factor per string is required')
        if any(not 0 <= x <= 1 for x in irradiance):
            raise SimulationError('irradiance factors must be within [0, 1]')
        if self.series_resistance < 0 or not self.shunt_resistance > 0:
            raise SimulationError('need R_s >= 0 and R_sh > 0')
        if not (self.photocurrent >= 0 and self.saturation_current > 0
                and self.ideality > 0 and self.thermal_voltage > 0):
            raise SimulationError('photocurrent, saturation current, ideality and V_t must be positive')

    @property
    def n_vt(self):
        return self.ideality * self.thermal_voltage

    def as_dict(self):
        data = asdict(self)
        data['irradiance'] = list(self.irradiance)
        return data


@dataclass(frozen=True)
class StringState:
    cells: int
    irradiance: float
    connected: bool = True


def healthy_strings(params):
    return tuple(StringState(params.series_cells, x) for x in params.irradiance)


def _cell_residual(params, photocurrent, cell_voltage, current):
    junction = cell_voltage + current * params.series_resistance
    exponent = min(junction / params.n_vt, _MAX_EXPONENT)
    return (photocurrent - params.saturation_current * math.expm1(exponent)
            - junction / params.shunt_resistance - current)


def cell_residual(params, irradiance, cell_voltage, current):
    """Residual (A) of the single-diode equation; zero at a solution."""
    return _cell_residual(params, params.photocurrent * irradiance, cell_voltage, current)


def solve_cell_current(params, irradiance, cell_voltage):
    """Cell current at a cell voltage, clipped at zero by the blocking diode.

    Raises:
        NoConvergenceError: the root could not be bracketed or refined
    """
    photocurrent = params.photocurrent * irradiance
    if _cell_residual(params, photocurrent, cell_voltage, 0.0) <= 0.0:
        return 0.0
    upper = photocurrent
    if _cell_residual(params, photocurrent, cell_voltage, upper) > 0.0:
        raise NoConvergenceError(f"no bracket for the cell current at {cell_voltage:g} V")
    try:
        current, result = brentq(
            lambda i: _cell_residual(params, photocurrent, cell_voltage, i),
            0.0, upper, xtol=1e-15, rtol=_RTOL, maxiter=200, full_output=True)
    except (ValueError, RuntimeError) as e:
        raise NoConvergenceError(f"cell current solve failed at {cell_voltage:g} V: {e}")
    if not result.converged or abs(_cell_residual(params, photocurrent, cell_voltage, current)) > CURRENT_TOLERANCE:
        raise NoConvergenceError(f"cell current did not converge at {cell_voltage:g} V")
    return current


def string_current(params, state, voltage):
    if not state.connected or state.cells < 1:
        return 0.0
    return solve_cell_current(params, state.irradiance, voltage / state.cells)


def pv_iv(params, voltage, strings=None):
    """Array current (A) at an array voltage (V >= 0)."""
    if voltage < 0:
        raise SimulationError(f"array voltage must be >= 0, got {voltage}")
    strings = healthy_strings(params) if strings is None else strings
    return sum(string_current(params, state, voltage) for state in strings)


def cell_open_circuit_voltage(params, irradiance=1.0):
    """Cell voltage at which the cell current reaches zero."""
    photocurrent = params.photocurrent * irradiance
    if photocurrent <= 0.0:
        return 0.0
    upper = params.n_vt * math.log1p(photocurrent / params.saturation_current)
    return brentq(lambda v: _cell_residual(params, photocurrent, v, 0.0),
                  0.0, upper, xtol=1e-15, rtol=_RTOL, maxiter=200)


def open_circuit_voltage(params, strings=None):
    """Largest string open-circuit voltage of the array."""
    strings = healthy_strings(params) if strings is None else strings
    values = [state.cells * cell_open_circuit_voltage(params, state.irradiance)
              for state in strings if state.connected and state.cells > 0]
    return max(values, default=0.0)


def pv_curve(params, points=200, strings=None):
    """Sampled I-V and P-V curves from 0 to the open-circuit voltage.

    Returns:
        (voltage, current, power) numpy arrays
    """
    v_oc = open_circuit_voltage(params, strings)
    voltage = np.linspace(0.0, v_oc, points)
    current = np.array([pv_iv(params, v, strings) for v in voltage])
    return voltage, current, voltage * current


def max_power_point(params, points=400, strings=None):
    """(V, I, P) at the largest sampled power."""
    voltage, current, power = pv_curve(params, points, strings)
    best = int(np.argmax(power))
    return float(voltage[best]), float(current[best]), float(power[best])


class PVFaultKind(str, Enum):
    GROUND = 'ground'
    LINE_LINE = 'line-line'
    MISMATCH = 'mismatch'
    OPEN_STRING = 'open-string'


@dataclass(frozen=True)
class PVFault:
    """An array fault on one string, switching on at ``onset`` hours.

    ``value`` is the number of bypassed cells for ground, the span of
    shorted cells for line-line and the irradiance factor for mismatch.
    """
    kind: PVFaultKind
    string: int = 0
    value: float = None
    onset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', PVFaultKind(self.kind))
        if self.onset < 0:
            raise InvalidFaultError(f"onset must be >= 0 hours, got {self.onset}")
        if self.kind in (PVFaultKind.GROUND, PVFaultKind.LINE_LINE):
            if self.value is None or self.value < 1 or self.value != int(self.value):
                raise InvalidFaultError(f"{self.kind.value} needs a whole number of cells >= 1")
        if self.kind is PVFaultKind.MISMATCH and (self.value is None or not 0 <= self.value <= 1):
            raise InvalidFaultError('mismatch needs an irradiance factor in [0, 1]')

    def check_layout(self, params):
        if not 0 <= self.string < params.parallel_strings:
            raise InvalidFaultError(f"string {self.string} outside 0..{params.parallel_strings - 1}")
        if self.kind in (PVFaultKind.GROUND, PVFaultKind.LINE_LINE) and self.value >= params.series_cells:
            raise InvalidFaultError(f"{self.kind.value} must leave at least one of "
                                    f"{params.series_cells} cells in the string")

    def apply(self, strings):
        """String states after the fault."""
        strings = list(strings)
        state = strings[self.string]
        if self.kind in (PVFaultKind.GROUND, PVFaultKind.LINE_LINE):
            strings[self.string] = replace(state, cells=state.cells - int(self.value))
        elif self.kind is PVFaultKind.MISMATCH:
            strings[self.string] = replace(state, irradiance=state.irradiance * self.value)
        else:
            strings[self.string] = replace(state, connected=False)
        return tuple(strings)

    def describe(self):
        value = '' if self.value is None else f":{self.value:g}"
        return f"{self.kind.value}:{self.string}{value}@{self.onset:g}h"


def parse_pv_fault(spec, onset=0.0):
    """Fault from ``kind:string[:value]``, e.g. ``mismatch:0:0.5``."""
    parts = [p.strip() for p in spec.split(':')]
    try:
        kind = PVFaultKind(parts[0])
        string = int(parts[1]) if len(parts) > 1 else 0
        value = float(parts[2]) if len(parts) > 2 else None
        return PVFault(kind, string, value, onset)
    except (ValueError, IndexError) as e:
        raise InvalidFaultError(f"bad array fault {spec!r}: {e}")


@dataclass(frozen=True)
class PVLoad:
    """Resistive load (ohm) or a bus clamped at a fixed voltage (V)."""
    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ('resistive', 'bus'):
            raise SimulationError(f"load must be 'resistive' or 'bus', got {self.kind!r}")
        if not self.value > 0:
            raise SimulationError('load value must be > 0')

    @classmethod
    def parse(cls, spec):
        """``resistive:OHMS`` or ``bus:VOLTS``."""
        kind, _, value = spec.partition(':')
        try:
            return cls(kind.strip(), float(value))
        except ValueError as e:
            raise SimulationError(f"bad load {spec!r}: {e}")


def operating_point(params, load, strings=None):
    """(V, I) where the array meets the load."""
    strings = healthy_strings(params) if strings is None else strings
    if load.kind == 'bus':
        return load.value, pv_iv(params, load.value, strings)

    v_high = open_circuit_voltage(params, strings)
    if v_high <= 0.0:
        return 0.0, 0.0

    def mismatch(v):
        return pv_iv(params, v, strings) - v / load.value

    if mismatch(0.0) <= 0.0:
        return 0.0, 0.0
    try:
        voltage = brentq(mismatch, 0.0, v_high, xtol=1e-12, rtol=_RTOL, maxiter=200)
    except (ValueError, RuntimeError) as e:
        raise NoConvergenceError(f"load line solve failed: {e}")
    return voltage, pv_iv(params, voltage, strings)


def simulate_pv(params, fault=None, load=None, dt=EpsftaConfig.DEFAULT_DT_HOURS, duration=1.0):
    """Array trace under constant conditions, optionally fault-injected.

    Args:
        params: PVParams
        fault: optional PVFault
        load: PVLoad (default: resistive load at the healthy maximum-power point)
        dt: step in hours
        duration: simulated time in hours

    Returns:
        Trace
    """
    times = time_grid(dt, duration)
    if load is None:
        v_mp, i_mp, _ = max_power_point(params)
        load = PVLoad('resistive', v_mp / i_mp if i_mp > 0 else 1.0)
    healthy = healthy_strings(params)
    faulty = healthy
    if fault is not None:
        fault.check_layout(params)
        faulty = fault.apply(healthy)

    points = {}
    voltages = np.empty(len(times))
    currents = np.empty(len(times))
    for position, t in enumerate(times):
        strings = faulty if fault is not None and t >= fault.onset else healthy
        if strings not in points:
            points[strings] = operating_point(params, load, strings)
        voltages[position], currents[position] = points[strings]

    label = fault.describe() if fault else 'healthy'
    return Trace.from_columns(
        times, voltages, currents,
        label=label,
        fault=fault.describe() if fault else '',
        metadata={'model': 'pv', 'params': params.as_dict(), 'load': asdict(load)},
    )
