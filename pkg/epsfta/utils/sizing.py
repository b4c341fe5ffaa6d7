"""
EPSFTA Sizing

Power-subsystem design calculators:
- battery cell count and capacity
- solar-array power, bus current and series/parallel layout
- empirical failure rate from a test campaign

The capacity and array-power formulas are implemented exactly as printed
in the source design equations. Standard references group the
``(N - 1) * V_cdis - V_d`` and ``V_max / V_min`` terms differently.
Fractional cell and string counts round up.
"""
import math
from dataclasses import asdict, dataclass

from epsfta.errors import SizingError


def _ceil_count(need, unit):
    """Smallest N >= 1 with N * unit >= need.

    Decided on the product rather than the quotient, so noise such as
    18 / 3.6 landing just off 5 never adds or drops a cell.
    """
    n = max(math.ceil(need / unit), 1)
    while n > 1 and (n - 1) * unit >= need:
        n -= 1
    while n * unit < need:
        n += 1
    return n


def cell_count(v_line, v_cell):
    """Number of series cells needed to reach the line voltage."""
    if not (v_line > 0 and v_cell > 0):
        raise SizingError(f"voltages must be > 0, got V_line={v_line}, V_cell={v_cell}",
                          code='NonPositiveVoltage')
    return _ceil_count(v_line, v_cell)


@dataclass(frozen=True)
class BatterySizingInput:
    v_line: float
    v_cell: float
    p_eclipse: float
    t_eclipse: float
    n_batteries: int = 1
    eta_discharge: float = 0.9
    v_cdis: float = 3.6
    v_drop: float = 0.6
    dod: float = 0.3

    def __post_init__(self):
        if self.p_eclipse < 0 or self.t_eclipse < 0:
            raise SizingError('eclipse load and duration must be >= 0', code='NonPositiveInput')
        if self.n_batteries < 1:
            raise SizingError('need at least one battery', code='NonPositiveInput')
        if not 0 < self.eta_discharge <= 1:
            raise SizingError('discharge efficiency must be in (0, 1]', code='NonPositiveEfficiency')
        if not 0 < self.dod <= 1:
            raise SizingError('depth of discharge must be in (0, 1]', code='NonPositiveInput')
        if self.v_cdis <= 0 or self.v_drop < 0:
            raise SizingError('discharge voltage must be > 0 and drop >= 0', code='NonPositiveVoltage')


def battery_capacity(sizing):
    """Battery capacity in ampere-hours.

    C = (P_e T_e) / (N_b eta_dis [(N - 1) V_cdis - V_d] DOD), N from cell_count.
    """
    n = cell_count(sizing.v_line, sizing.v_cell)
    denominator = (sizing.n_batteries * sizing.eta_discharge
                   * ((n - 1) * sizing.v_cdis - sizing.v_drop) * sizing.dod)
    if denominator <= 0:
        raise SizingError(f"capacity denominator is {denominator:g} (N={n}); "
                          "need (N-1)*V_cdis > V_d", code='DegenerateDenominator')
    return sizing.p_eclipse * sizing.t_eclipse / denominator


@dataclass(frozen=True)
class ArraySizingInput:
    eta_pc: float
    eta_d: float
    p_av: float
    p_peak: float
    t_peak: float
    t_sun: float
    v_max: float
    v_min: float
    v_bus: float
    v_mp_eol: float
    i_mp_eol: float

    def __post_init__(self):
        if not (0 < self.eta_pc <= 1 and 0 < self.eta_d <= 1):
            raise SizingError('efficiencies must be in (0, 1]', code='NonPositiveEfficiency')
        if self.p_av < 0 or self.p_peak < 0 or self.t_peak < 0:
            raise SizingError('loads and peak time must be >= 0', code='NonPositiveInput')
        positive = {'t_sun': self.t_sun, 'v_max': self.v_max, 'v_min': self.v_min,
                    'v_bus': self.v_bus, 'v_mp_eol': self.v_mp_eol, 'i_mp_eol': self.i_mp_eol}
        bad = [name for name, value in positive.items() if not value > 0]
        if bad:
            raise SizingError(f"must be > 0: {', '.join(bad)}", code='NonPositiveInput')


def array_power(sizing):
    """Required array power in watts.

    P_sa = (P_av + (P_p t_p / t_s) (V_max / V_min)) / (eta_pc eta_d)
    """
    peak = sizing.p_peak * sizing.t_peak / sizing.t_sun * (sizing.v_max / sizing.v_min)
    return (sizing.p_av + peak) / (sizing.eta_pc * sizing.eta_d)


@dataclass(frozen=True)
class ArrayLayout:
    bus_current: float
    series_cells: int
    parallel_strings: int


def array_layout(p_sa, sizing):
    """Bus current and series/parallel cell counts for a required power."""
    if not (p_sa >= 0 and sizing.v_bus > 0 and sizing.v_mp_eol > 0 and sizing.i_mp_eol > 0):
        raise SizingError('array power must be >= 0 and bus/cell ratings > 0', code='NonPositiveInput')
    bus_current = p_sa / sizing.v_bus
    return ArrayLayout(
        bus_current=bus_current,
        series_cells=_ceil_count(sizing.v_bus, sizing.v_mp_eol),
        parallel_strings=_ceil_count(bus_current, sizing.i_mp_eol),
    )


def estimate_lambda(t_int, n_failed, n_total):
    """Failure rate per hour from a campaign: (1 / t_int) (N_f / N_t)."""
    if not t_int > 0:
        raise SizingError(f"test interval must be > 0 hours, got {t_int}", code='NonPositiveInterval')
    if not (n_total > 0 and 0 <= n_failed <= n_total):
        raise SizingError(f"need 0 <= N_f <= N_t and N_t > 0, got {n_failed}/{n_total}", code='BadCounts')
    return n_failed / n_total / t_int


def battery_report(sizing):
    """Cell count and capacity together with the inputs."""
    return {
        'inputs': asdict(sizing),
        'cells': cell_count(sizing.v_line, sizing.v_cell),
        'capacity_ah': battery_capacity(sizing),
    }


def array_report(sizing):
    """Array power, bus current and layout together with the inputs."""
    power = array_power(sizing)
    layout = array_layout(power, sizing)
    return {
        'inputs': asdict(sizing),
        'power_w': power,
        'bus_current_a': layout.bus_current,
        'series_cells': layout.series_cells,
        'parallel_strings': layout.parallel_strings,
    }
