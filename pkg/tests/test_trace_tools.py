import csv

import numpy as np
import pytest
import yaml

from epsfta.config import bundled_file
from epsfta.errors import GridMismatchError, SimulationError
from epsfta.models.trace import CSV_HEADER, Trace
from epsfta.utils.battery_sim import BatteryFault, battery_params_from_curve, simulate_battery
from epsfta.utils.pv_sim import PVParams
from epsfta.utils.trace_tools import (
    compare_traces,
    default_pv_faults,
    params_hash,
    simulate_fault_set,
    write_trace,
)


@pytest.fixture
def battery_params():
    with open(bundled_file('battery_cell')) as f:
        data = yaml.safe_load(f)
    return battery_params_from_curve(**data['curve'])


@pytest.fixture
def pv_params():
    with open(bundled_file('pv_array')) as f:
        data = yaml.safe_load(f)
    return PVParams(series_cells=data['series_cells'], parallel_strings=data['parallel_strings'],
                    irradiance=tuple(data['irradiance']), **data['cell'])


def test_identical_traces(battery_params):
    trace = simulate_battery(battery_params, 1.0, dt=0.01, duration=1.0)
    comparison = compare_traces(trace, trace)
    assert comparison.first_divergence is None
    assert comparison.rms_dv == 0.0 and comparison.rms_di == 0.0
    assert comparison.samples == len(trace)


def test_grid_mismatch():
    first = Trace.from_columns([0.0, 1.0], [1.0, 1.0], [1.0, 1.0])
    second = Trace.from_columns([0.0, 0.5], [1.0, 1.0], [1.0, 1.0])
    shorter = Trace.from_columns([0.0], [1.0], [1.0])
    with pytest.raises(GridMismatchError):
        compare_traces(first, second)
    with pytest.raises(GridMismatchError):
        compare_traces(first, shorter)


def test_truncated_trace_compared_on_common_prefix(battery_params):
    healthy = simulate_battery(battery_params, 1.0, dt=0.01, duration=3.0, v_cutoff=3.0)
    faulty = simulate_battery(battery_params, 1.0, BatteryFault('capacity-fade', 0.5, 0.5),
                              dt=0.01, duration=3.0, v_cutoff=3.0)
    assert faulty.truncated and len(faulty) < len(healthy)
    comparison = compare_traces(healthy, faulty)
    assert comparison.samples == len(faulty)
    assert comparison.first_divergence == pytest.approx(0.5)


def test_trace_power_and_columns():
    trace = Trace.from_columns([0.0, 1.0], [2.0, 3.0], [0.5, 1.0])
    assert trace.power.tolist() == [1.0, 3.0]
    assert trace.energy_wh() == 1.0
    with pytest.raises(SimulationError):
        Trace.from_columns([0.0, 1.0], [2.0], [0.5, 1.0])
    with pytest.raises(SimulationError):
        Trace.from_columns([1.0, 0.0], [2.0, 3.0], [0.5, 1.0])


def test_write_trace(tmp_path, battery_params):
    trace = simulate_battery(battery_params, 1.0, BatteryFault('open-circuit', 0.5), dt=0.1, duration=1.0)
    csv_path, sidecar = write_trace(trace, tmp_path / 'out' / 'battery_fault1.csv')
    assert sidecar.name == 'battery_fault1.meta.yaml'
    with open(csv_path, newline='') as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == len(trace) + 1
    assert [float(x) for x in rows[-1]] == [trace.t[-1], trace.voltage[-1], trace.current[-1], trace.power[-1]]
    with open(sidecar) as f:
        meta = yaml.safe_load(f)
    assert meta['fault'] == 'open-circuit@0.5h'
    assert meta['model'] == 'battery'
    assert meta['params_sha256'] == params_hash(battery_params.as_dict())
    assert len(meta['params_sha256']) == 64


def test_write_trace_is_deterministic(tmp_path, battery_params):
    trace = simulate_battery(battery_params, 1.0, dt=0.1, duration=1.0)
    first, _ = write_trace(trace, tmp_path / 'a.csv')
    second, _ = write_trace(simulate_battery(battery_params, 1.0, dt=0.1, duration=1.0), tmp_path / 'b.csv')
    assert first.read_bytes() == second.read_bytes()


def test_params_hash_ignores_key_order():
    assert params_hash({'a': 1, 'b': 2}) == params_hash({'b': 2, 'a': 1})
    assert params_hash({'a': 1}) != params_hash({'a': 2})


def test_battery_fault_set(battery_params):
    healthy, results = simulate_fault_set('battery', battery_params, 0.5, dt=0.01, duration=1.0, v_cutoff=3.0)
    assert [trace.fault.split('@')[0] for trace, _ in results] == [
        'open-circuit', 'internal-short:2', 'resistance-growth:3', 'capacity-fade:0.5']
    for trace, comparison in results:
        assert 0.5 <= comparison.first_divergence <= 0.51 + 1e-12
        assert np.array_equal(trace.t[:50], healthy.t[:50])


def test_pv_fault_set(pv_params):
    faults = default_pv_faults(pv_params, 0.5)
    assert [f.kind.value for f in faults] == ['ground', 'line-line', 'mismatch', 'open-string']
    assert faults[0].value == 18 and faults[1].value == 9
    healthy, results = simulate_fault_set('pv', pv_params, 0.5, dt=0.1, duration=1.0)
    assert len(results) == 4
    for trace, comparison in results:
        assert comparison.first_divergence == pytest.approx(0.5)
        assert np.all(trace.power <= healthy.power + 1e-12)


def test_unknown_model(battery_params):
    with pytest.raises(SimulationError):
        simulate_fault_set('fuel-cell', battery_params, 0.5)
