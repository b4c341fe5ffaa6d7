#!/usr/bin/env python3
"""
EPSFTA CLI Commands

Command-line front end of the EPS reliability workbench.

    epsfta analyze eps_example --mission-hours 17520
    epsfta cutsets eps_example
    epsfta enumerate eps_example --exclude-constant
    epsfta size battery battery_sizing
    epsfta simulate battery battery_cell --fault open-circuit --onset 0.5
    epsfta risk eps_risks

Trees and parameter files are paths, or names of the bundled examples.
Exit status: 0 on success, 1 on a domain error, 2 on a usage error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from epsfta.config import EpsftaConfig, bundled_file, select_config
from epsfta.errors import EpsftaError

logger = logging.getLogger('epsfta')

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad command line that argparse cannot detect by itself."""


def _configure_logging(level):
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, str(level).upper(), logging.WARNING),
        format='%(levelname)s %(name)s: %(message)s',
        force=True,
    )


def _resolve_input(name):
    """Path of an input file, falling back to the bundled data files."""
    path = Path(name)
    if path.exists():
        return path
    bundled = bundled_file(name)
    if bundled is not None:
        return bundled
    raise UsageError(f"no such file or bundled example: {name}")


def _load_mapping(name):
    path = _resolve_input(name)
    with open(path, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a mapping of parameters")
    data.pop('format_version', None)
    return data


def _parse_overrides(pairs):
    """``key=value`` pairs from --set; values are read as YAML scalars."""
    overrides = {}
    for pair in pairs or ():
        key, sep, value = pair.partition('=')
        if not sep or not key:
            raise UsageError(f"--set expects key=value, got {pair!r}")
        overrides[key.strip()] = yaml.safe_load(value)
    return overrides


def _emit(data, output=None):
    """Write bytes to --output or stdout."""
    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        logger.info("wrote %s", path)
    else:
        sys.stdout.write(data.decode('utf-8'))
        sys.stdout.flush()


def _tool_version():
    from epsfta import __version__
    return f"epsfta {__version__}"


def _library(args):
    from epsfta.utils.component_library import ComponentLibrary, default_library

    return ComponentLibrary.load(args.library) if args.library else default_library()


def _load_tree(args, with_models=False):
    """Only analyze needs event models; other tree commands skip them."""
    from epsfta.utils.tree_file import load_tree

    return load_tree(_resolve_input(args.tree), _library(args),
                     use_library_defaults=not args.no_library_defaults,
                     with_models=with_models)


def _classifier(args, loaded):
    from epsfta.utils.scenario_enumerator import ScenarioClassifierConfig

    excluded = set(args.exclude or ())
    if args.exclude_constant:
        excluded.update(e.id for e in loaded.document.events
                        if e.model is not None and e.model.type == 'constant-probability')
    return ScenarioClassifierConfig(
        fail_gate=args.fail_gate,
        recoverable_gates=args.recoverable_gates or (),
        excluded=excluded,
    )


def _provenance(args, loaded, **kwargs):
    from epsfta.utils.report_builder import Provenance

    return Provenance.create(
        loaded.sha256, _tool_version(),
        include_timestamp=args.settings.INCLUDE_TIMESTAMP and not args.no_timestamp,
        tree_name=loaded.document.name or loaded.tree.top,
        **kwargs,
    )


# ============================================================================
# Subcommands
# ============================================================================

def cmd_analyze(args):
    from epsfta.models.fault_tree import tree_summary
    from epsfta.models.probability import MissionProfile
    from epsfta.utils.cut_sets import minimal_cut_sets
    from epsfta.utils.quantifier import quantify_mission, reliability_curve
    from epsfta.utils.report_builder import ReportDocument, emit_report
    from epsfta.utils.scenario_enumerator import enumerate_scenarios

    loaded = _load_tree(args, with_models=True)
    if args.curve_points:
        profile = MissionProfile.with_uniform_grid(args.mission_hours, args.curve_points)
    else:
        profile = MissionProfile(args.mission_hours)
    rate_scale = args.rate_scale or args.settings.RATE_SCALE
    quant = quantify_mission(loaded.tree, loaded.models, profile, method=args.method, rate_scale=rate_scale)
    curve = None
    if profile.time_grid:
        curve = tuple(reliability_curve(loaded.tree, loaded.models, profile, method=args.method))
    scenarios = None
    if args.scenarios:
        scenarios = enumerate_scenarios(loaded.tree, _classifier(args, loaded))

    doc = ReportDocument(
        provenance=_provenance(args, loaded, mission_hours=args.mission_hours, method=args.method),
        quant=quant,
        cut_sets=minimal_cut_sets(loaded.tree),
        scenarios=scenarios,
        summary=tree_summary(loaded.tree),
        curve=curve,
    )
    _emit(emit_report(doc, args.format), args.output)
    return EXIT_OK


def cmd_cutsets(args):
    from epsfta.utils.cut_sets import format_cut_sets, minimal_cut_sets

    loaded = _load_tree(args)
    cut_sets = minimal_cut_sets(loaded.tree)
    if args.format == 'structured':
        data = json.dumps({'top': loaded.tree.top, 'cut_sets': cut_sets.as_records()},
                          sort_keys=True, indent=2) + '\n'
    else:
        data = format_cut_sets(cut_sets)
    _emit(data.encode('utf-8'), args.output)
    return EXIT_OK


def cmd_enumerate(args):
    from epsfta.utils.scenario_enumerator import enumerate_scenarios, format_stats, stats_as_dict, stats_to_csv

    loaded = _load_tree(args)
    stats = enumerate_scenarios(loaded.tree, _classifier(args, loaded))
    if args.format == 'csv':
        data = stats_to_csv(stats)
    elif args.format == 'structured':
        data = json.dumps(stats_as_dict(stats), sort_keys=True, indent=2) + '\n'
    else:
        data = format_stats(stats)
    _emit(data.encode('utf-8'), args.output)
    return EXIT_OK


def _sizing_text(report):
    lines = [f"{key}: {value}" for key, value in report.items() if key != 'inputs']
    lines.append('inputs:')
    lines += [f"  {key}: {value}" for key, value in report['inputs'].items()]
    return '\n'.join(lines) + '\n'


def cmd_size(args):
    from epsfta.utils.sizing import (
        ArraySizingInput,
        BatterySizingInput,
        array_report,
        battery_report,
        estimate_lambda,
    )

    params = _load_mapping(args.params) if args.params else {}
    params.update(_parse_overrides(args.set))
    try:
        if args.target == 'battery':
            report = battery_report(BatterySizingInput(**params))
        elif args.target == 'array':
            report = array_report(ArraySizingInput(**params))
        else:
            report = {'inputs': params, 'lambda_per_hour': estimate_lambda(**params)}
    except TypeError as e:
        raise UsageError(f"bad {args.target} parameters: {e}")

    if args.format == 'structured':
        data = json.dumps(report, sort_keys=True, indent=2) + '\n'
    else:
        data = _sizing_text(report)
    _emit(data.encode('utf-8'), args.output)
    return EXIT_OK


def _battery_setup(params):
    from epsfta.utils.battery_sim import battery_params_from_curve

    if 'curve' in params:
        battery = battery_params_from_curve(**params['curve'])
    else:
        from epsfta.utils.battery_sim import BatteryParams
        battery = BatteryParams(**params['params'])
    return battery, {'i_load': params.get('load_amps', 1.0), 'v_cutoff': params.get('v_cutoff', 0.0)}


def _pv_setup(params):
    from epsfta.utils.pv_sim import PVLoad, PVParams

    pv = PVParams(series_cells=params['series_cells'], parallel_strings=params['parallel_strings'],
                  irradiance=tuple(params.get('irradiance', ())), **params['cell'])
    extra = {}
    if params.get('load'):
        extra['load'] = PVLoad.parse(str(params['load']))
    return pv, extra


def cmd_simulate(args):
    from epsfta.utils.battery_sim import parse_battery_fault
    from epsfta.utils.pv_sim import PVLoad, parse_pv_fault
    from epsfta.utils.trace_tools import simulate_fault_set, write_trace

    params = _load_mapping(args.params)
    try:
        if args.model == 'battery':
            model_params, extra = _battery_setup(params)
            if args.load is not None:
                extra['i_load'] = args.load
        else:
            model_params, extra = _pv_setup(params)
            if args.load is not None:
                extra['load'] = PVLoad.parse(args.load)
    except (KeyError, TypeError) as e:
        raise UsageError(f"bad {args.model} parameter file: {e}")

    if args.all_faults:
        faults = None
    elif args.fault:
        parse = parse_battery_fault if args.model == 'battery' else parse_pv_fault
        faults = [parse(spec, args.onset) for spec in args.fault]
    else:
        faults = []

    healthy, results = simulate_fault_set(args.model, model_params, args.onset, faults=faults,
                                          dt=args.dt, duration=args.duration, **extra)
    out_dir = Path(args.output_dir)
    write_trace(healthy, out_dir / f"{args.model}_healthy.csv")
    summary = []
    for position, (trace, comparison) in enumerate(results, start=1):
        name = f"{args.model}_fault{position}.csv"
        write_trace(trace, out_dir / name)
        summary.append({'fault': trace.fault, 'file': name, 'truncated': trace.truncated,
                        **comparison.as_dict()})

    data = json.dumps({'healthy': f"{args.model}_healthy.csv", 'samples': len(healthy),
                       'faults': summary}, sort_keys=True, indent=2) + '\n'
    _emit(data.encode('utf-8'), args.output)
    return EXIT_OK


def cmd_risk(args):
    from epsfta.utils.risk_matrix import RiskConfig, classify, load_risk_items, render_text

    config = RiskConfig.load(str(_resolve_input(args.config)) if args.config else None)
    items = load_risk_items(_resolve_input(args.items))
    matrix = classify(items, config)
    if args.format == 'structured':
        data = json.dumps({'cells': matrix.as_records(), 'items': matrix.total}, sort_keys=True, indent=2) + '\n'
    else:
        data = render_text(matrix)
    _emit(data.encode('utf-8'), args.output)
    return EXIT_OK


def cmd_validate(args):
    from epsfta.models.fault_tree import tree_summary

    loaded = _load_tree(args)
    summary = tree_summary(loaded.tree)
    if args.format == 'structured':
        data = json.dumps(summary, sort_keys=True, indent=2) + '\n'
    else:
        data = (f"Top Gate: {summary['top']}\n"
                f"No. of Gates: {summary['gates']}\n"
                f"No. of Events: {summary['events']}\n"
                f"Stochastic events (M): {summary['M']}\n")
    _emit(data.encode('utf-8'), args.output)
    return EXIT_OK


def cmd_components(args):
    library = _library(args)
    entries = sorted(library, key=lambda e: e.name.casefold())
    if args.format == 'structured':
        data = json.dumps([{'name': e.name, 'lambda_low': e.lambda_low, 'lambda_high': e.lambda_high,
                            'midpoint': e.midpoint, 'mtbf_hours': e.mtbf_hours,
                            'temperature_c': e.temperature_c} for e in entries],
                          sort_keys=True, indent=2) + '\n'
    else:
        lines = [f"{'Component':<30} {'low /h':>10} {'high /h':>10} {'MTBF h':>12}"]
        lines += [f"{e.name:<30} {e.lambda_low:>10.3g} {e.lambda_high:>10.3g} {e.mtbf_hours:>12.4g}"
                  for e in entries]
        data = '\n'.join(lines) + '\n'
    _emit(data.encode('utf-8'), args.output)
    return EXIT_OK


# ============================================================================
# Parser
# ============================================================================

def _add_output(parser, formats=('text', 'structured')):
    parser.add_argument('--format', choices=formats, default='text',
                        help="Output format (default: text)")
    parser.add_argument('--output', '-o', type=str,
                        help='Write to this file instead of stdout')


def _add_tree(parser):
    parser.add_argument('tree', help='Tree file path or bundled example name (e.g. eps_example)')
    parser.add_argument('--library', type=str,
                        help='Component library file (default: EPSFTA_COMPONENT_LIBRARY or bundled)')
    parser.add_argument('--no-library-defaults', action='store_true',
                        help='Do not fill missing failure rates from the component library')


def _add_classifier(parser):
    parser.add_argument('--fail-gate', type=str, help='Gate that defines Fail (default: top)')
    parser.add_argument('--recoverable-gates', nargs='+', metavar='GATE',
                        help='Gates whose occurrence without Fail counts as Recoverable')
    parser.add_argument('--exclude', nargs='+', metavar='EVENT',
                        help='Stochastic events held in the not-failed state')
    parser.add_argument('--exclude-constant', action='store_true',
                        help='Exclude every constant-probability event')


def build_parser():
    parser = argparse.ArgumentParser(prog='epsfta', description='EPS Reliability Workbench')
    parser.add_argument('--log-level', type=str, default=None,
                        help='Logging level on stderr (default: EPSFTA_LOG_LEVEL, else the configuration default)')
    parser.add_argument('--seed', type=int,
                        help='Reserved; accepted and ignored (no stochastic algorithms)')
    parser.add_argument('--version', action='version', version=_tool_version())
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('analyze', help='Quantify a fault tree over a mission')
    _add_tree(p)
    p.add_argument('--mission-hours', type=float, required=True, help='Mission time in hours')
    p.add_argument('--method', choices=('exact', 'rare-event'), default='exact',
                   help='Top-event method (default: exact)')
    p.add_argument('--rate-scale', type=float,
                   help='Report failure rates per this many hours (default: EPSFTA_RATE_SCALE or 1e6)')
    p.add_argument('--curve-points', type=int, default=0,
                   help='Add a reliability-over-time table with this many points')
    p.add_argument('--scenarios', action='store_true', help='Add the fault-scenario table')
    p.add_argument('--no-timestamp', action='store_true',
                   help='Leave the timestamp out of the provenance block')
    _add_classifier(p)
    _add_output(p, ('text', 'structured', 'csv', 'html'))
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser('cutsets', help='List minimal cut sets')
    _add_tree(p)
    _add_output(p)
    p.set_defaults(func=cmd_cutsets)

    p = sub.add_parser('enumerate', help='Count fault scenarios by number of failed events')
    _add_tree(p)
    _add_classifier(p)
    _add_output(p, ('text', 'structured', 'csv'))
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser('size', help='Battery, solar-array or failure-rate sizing')
    p.add_argument('target', choices=('battery', 'array', 'lambda'))
    p.add_argument('params', nargs='?', help='YAML parameter file or bundled name')
    p.add_argument('--set', action='append', metavar='KEY=VALUE', help='Override one parameter')
    _add_output(p)
    p.set_defaults(func=cmd_size)

    p = sub.add_parser('simulate', help='Healthy and faulty battery or solar-array traces')
    p.add_argument('model', choices=('battery', 'pv'))
    p.add_argument('params', help='YAML parameter file or bundled name (battery_cell, pv_array)')
    p.add_argument('--fault', action='append', metavar='SPEC',
                   help='Fault to inject, e.g. capacity-fade:0.5 or mismatch:0:0.5 (repeatable)')
    p.add_argument('--all-faults', action='store_true', help='Inject one fault of every kind')
    p.add_argument('--onset', type=float, default=0.0, help='Fault onset in hours')
    p.add_argument('--dt', type=float, default=EpsftaConfig.DEFAULT_DT_HOURS, help='Step in hours')
    p.add_argument('--duration', type=float, default=1.0, help='Simulated hours')
    p.add_argument('--load', type=str, default=None,
                   help='Battery: amps; pv: resistive:OHMS or bus:VOLTS')
    p.add_argument('--output-dir', type=str, default='.', help='Directory for the trace CSV files')
    p.add_argument('--output', '-o', type=str, help='Write the run summary to this file')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('risk', help='Classify risk items on the 5x5 matrix')
    p.add_argument('items', help='YAML risk items file or bundled name (eps_risks)')
    p.add_argument('--config', type=str,
                   help='Threshold file (default: EPSFTA_RISK_CONFIG or built-in defaults)')
    _add_output(p)
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser('validate', help='Load a tree file and summarise it')
    _add_tree(p)
    _add_output(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser('components', help='List the component failure-rate library')
    p.add_argument('--library', type=str, help='Component library file')
    _add_output(p)
    p.set_defaults(func=cmd_components)
    return parser


def run(argv=None, config_class=None):
    """CLI entry point for the epsfta command. Returns the exit status.

    Args:
        argv: arguments (default: sys.argv[1:])
        config_class: configuration class (default: select_config())
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        args.settings = config_class or select_config()
    except KeyError as e:
        print(f"error[usage]: unknown EPSFTA_CONFIG {e}", file=sys.stderr)
        return EXIT_USAGE

    _configure_logging(args.log_level or args.settings.LOG_LEVEL)
    if args.seed is not None:
        logger.debug("--seed %d ignored", args.seed)
    if args.command == 'simulate' and args.model == 'battery' and args.load is not None:
        try:
            args.load = float(args.load)
        except ValueError:
            print(f"error[usage]: --load expects amps for the battery, got {args.load!r}", file=sys.stderr)
            return EXIT_USAGE

    try:
        return args.func(args)
    except UsageError as e:
        print(f"error[usage]: {e}", file=sys.stderr)
        return EXIT_USAGE
    except EpsftaError as e:
        if args.settings.DEBUG:
            logger.error("%s failed", args.command, exc_info=True)
        print(f"error[{e.code}]: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as e:
        print(f"error[io]: {e}", file=sys.stderr)
        return EXIT_DOMAIN


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
