"""
EPSFTA Trace Tools

Healthy/faulty comparison, CSV export with a YAML metadata sidecar, and the
batch runner that injects every fault kind against one healthy baseline.
"""
import csv
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from epsfta.errors import GridMismatchError, SimulationError
from epsfta.models.trace import CSV_HEADER
from epsfta.utils.battery_sim import BatteryFault, BatteryFaultKind, simulate_battery
from epsfta.utils.pv_sim import PVFault, PVFaultKind, simulate_pv

logger = logging.getLogger(__name__)

DIVERGENCE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class TraceComparison:
    first_divergence: float
    rms_dv: float
    rms_di: float
    samples: int

    def as_dict(self):
        return {
            'first_divergence': self.first_divergence,
            'rms_dV': self.rms_dv,
            'rms_dI': self.rms_di,
            'samples': self.samples,
        }


def _common_grid(healthy, faulty):
    n = min(len(healthy), len(faulty))
    if len(healthy) != len(faulty) and not (healthy.truncated or faulty.truncated):
        raise GridMismatchError(f"trace lengths differ: {len(healthy)} vs {len(faulty)}")
    if not np.array_equal(healthy.t[:n], faulty.t[:n]):
        raise GridMismatchError('traces are sampled on different time grids')
    return n


def compare_traces(healthy, faulty):
    """Quantitative contrast between a healthy and a faulty trace.

    A truncated trace (charge exhausted) is compared over the samples both
    traces share; otherwise the grids must be identical.

    Returns:
        TraceComparison; ``first_divergence`` is None when the traces
        never differ by more than 1e-6 in V or I.
    """
    n = _common_grid(healthy, faulty)
    if n == 0:
        return TraceComparison(None, 0.0, 0.0, 0)
    dv = faulty.voltage[:n] - healthy.voltage[:n]
    di = faulty.current[:n] - healthy.current[:n]
    diverged = np.flatnonzero((np.abs(dv) > DIVERGENCE_THRESHOLD) | (np.abs(di) > DIVERGENCE_THRESHOLD))
    first = float(healthy.t[diverged[0]]) if diverged.size else None
    return TraceComparison(
        first_divergence=first,
        rms_dv=float(np.sqrt(np.mean(dv ** 2))),
        rms_di=float(np.sqrt(np.mean(di ** 2))),
        samples=n,
    )


def params_hash(params):
    """sha256 of the parameter dict serialized with sorted keys."""
    payload = json.dumps(params, sort_keys=True, default=str).encode('utf-8')
    return hashlib.sha256(payload).hexdigest()


def trace_metadata(trace):
    meta = trace.metadata
    return {
        'format_version': 1,
        'label': trace.label,
        'fault': trace.fault or None,
        'model': meta.get('model'),
        'truncated': trace.truncated,
        'stop_reason': meta.get('stop_reason'),
        'samples': len(trace),
        'params_sha256': params_hash(meta.get('params', {})),
        'params': meta.get('params', {}),
    }


def write_trace(trace, path):
    """Write ``path`` (CSV) and ``<path stem>.meta.yaml`` next to it.

    Returns:
        (csv path, sidecar path)
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for row in trace.rows():
            writer.writerow([repr(value) for value in row])

    sidecar = path.with_name(f"{path.stem}.meta.yaml")
    with open(sidecar, 'w', encoding='utf-8') as f:
        yaml.safe_dump(trace_metadata(trace), f, sort_keys=False, default_flow_style=False)
    logger.info("wrote %d samples to %s", len(trace), path)
    return path, sidecar


def default_battery_faults(onset):
    return [
        BatteryFault(BatteryFaultKind.OPEN_CIRCUIT, onset),
        BatteryFault(BatteryFaultKind.INTERNAL_SHORT, onset, 2.0),
        BatteryFault(BatteryFaultKind.RESISTANCE_GROWTH, onset, 3.0),
        BatteryFault(BatteryFaultKind.CAPACITY_FADE, onset, 0.5),
    ]


def default_pv_faults(params, onset):
    half = max(params.series_cells // 2, 1)
    faults = [PVFault(PVFaultKind.MISMATCH, 0, 0.5, onset),
              PVFault(PVFaultKind.OPEN_STRING, 0, None, onset)]
    if params.series_cells > 1:
        faults[:0] = [PVFault(PVFaultKind.GROUND, 0, half, onset),
                      PVFault(PVFaultKind.LINE_LINE, 0, max(half // 2, 1), onset)]
    return faults


def simulate_fault_set(model, params, onset, faults=None, dt=None, duration=1.0, **kwargs):
    """Run the healthy baseline and one faulty run per fault.

    Args:
        model: 'battery' or 'pv'
        params: BatteryParams or PVParams
        onset: fault onset (hours) used for the default fault set
        faults: explicit faults (default: one of each kind)
        dt, duration: shared time grid
        **kwargs: passed through (i_load, v_cutoff for the battery; load for pv)

    Returns:
        (healthy trace, [(faulty trace, TraceComparison), ...]) in fault order
    """
    grid = {'duration': duration}
    if dt is not None:
        grid['dt'] = dt
    if model == 'battery':
        i_load = kwargs.pop('i_load', 1.0)
        faults = default_battery_faults(onset) if faults is None else faults

        def run(fault):
            return simulate_battery(params, i_load, fault=fault, **grid, **kwargs)
    elif model == 'pv':
        faults = default_pv_faults(params, onset) if faults is None else faults

        def run(fault):
            return simulate_pv(params, fault=fault, **grid, **kwargs)
    else:
        raise SimulationError(f"unknown model {model!r}")

    healthy = run(None)
    results = []
    for fault in faults:
        faulty = run(fault)
        results.append((faulty, compare_traces(healthy, faulty)))
        logger.debug("%s: first divergence %s", fault.describe(), results[-1][1].first_divergence)
    return healthy, results
