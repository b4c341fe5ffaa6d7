"""
EPSFTA Trace

Time series produced by the battery and solar-array simulators: time
(hours), terminal voltage (V), current (A) and power (W), plus a scenario
label and the fault descriptor that produced it.
"""
from dataclasses import dataclass, field

import numpy as np

from epsfta.errors import SimulationError

CSV_HEADER = ('t_hours', 'V_volts', 'I_amps', 'P_watts')


@dataclass(frozen=True, eq=False)
class Trace:
    t: np.ndarray
    voltage: np.ndarray
    current: np.ndarray
    power: np.ndarray
    label: str = 'healthy'
    fault: str = ''
    truncated: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(self.t), len(self.voltage), len(self.current), len(self.power)}
        if len(lengths) != 1:
            raise SimulationError('trace columns differ in length')
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise SimulationError('trace times must be strictly ascending')

    @classmethod
    def from_columns(cls, t, voltage, current, **kwargs):
        """Build a trace; power is computed as V * I."""
        t = np.asarray(t, dtype=float)
        voltage = np.asarray(voltage, dtype=float)
        current = np.asarray(current, dtype=float)
        return cls(t, voltage, current, voltage * current, **kwargs)

    def __len__(self):
        return len(self.t)

    @property
    def is_healthy(self):
        return not self.fault

    def rows(self):
        return zip(self.t.tolist(), self.voltage.tolist(), self.current.tolist(), self.power.tolist())

    def energy_wh(self):
        """Delivered energy, left-rectangle sum of V*I over the steps."""
        if len(self.t) < 2:
            return 0.0
        return float(np.sum(self.power[:-1] * np.diff(self.t)))
