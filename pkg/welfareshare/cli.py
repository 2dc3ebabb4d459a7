"""
welfareshare command line.

    python -m welfareshare solve FILE --mechanism lexmax --disagreement rp
    python -m welfareshare check --fixture EX4 --submodular
    python -m welfareshare compare --fixture TWO:1/5
    python -m welfareshare fixtures

Instance files are JSON:

    {
      "kind": "general" | "matching",
      "agents": ["1", "2"],
      "alternatives": ["A1", "A2"],        (general)
      "items": ["a", "b"],                 (matching)
      "values": [["1", "-1"], ["1/5", "-1/5"]],
      "rent": "1",                         (matching, optional)
      "disagreement": {"mode": "rp-mc", "seed": 0, "samples": 1000}   (optional)
    }

Values are integers or strings ("p/q", "7", "0.25"); bare JSON decimals are
rejected unless --allow-float is given.

Exit codes: 0 success, 1 failed check or other error, 2 unreadable input,
3 incompatible options or enumeration bound exceeded, 4 empty WS-core.
"""

import argparse
import decimal
import json
import logging
import sys
from pathlib import Path

import pandas as pd

from welfareshare import settings
from welfareshare.compare import compare_mechanisms, instance_partition, report_frame
from welfareshare.core import check_anticore, check_domination, sufficient_conditions, ws_core_nonempty
from welfareshare.disagreement import MODES, disagreement_point
from welfareshare.egalitarian import lexmax
from welfareshare.exceptions import (
    EmptyWSCoreError, EnumerationBoundError, FixtureError, IncompatibleOptionsError,
    InstanceError, WelfareShareError,
)
from welfareshare.fixtures import FIXTURES, default_disagreement, fixture
from welfareshare.mechanisms import MECHANISMS, get_mechanism, run_mechanism
from welfareshare.model import Instance, MatchingInstance, apply_rent_shift
from welfareshare.utils.logger import setup_logger
from welfareshare.utils.rational import approx, format_rational, parse_rational
from welfareshare.utils.subsets import label_subset
from welfareshare.welfare import SetFunctionOracle, is_submodular

logger = logging.getLogger('welfareshare')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_OPTIONS = 3
EXIT_EMPTY_CORE = 4

OUTPUTS = ('json', 'csv', 'table')


# --- Instance I/O -----------------------------------------------------------

def instance_from_dict(data, allow_float=False):
    """Build an Instance or MatchingInstance from the JSON schema above"""
    if not isinstance(data, dict):
        raise InstanceError("Instance file must contain a JSON object")
    kind = data.get('kind', 'general')
    if 'values' not in data:
        raise InstanceError("Instance file has no 'values'")
    values = [[parse_rational(v, allow_float) for v in row] for row in data['values']]
    agents = tuple(data.get('agents', ()))
    name = data.get('name', '')
    if kind == 'matching':
        rent = data.get('rent')
        rent = parse_rational(rent, allow_float) if rent is not None else None
        return MatchingInstance(values, tuple(data.get('items', ())), agents, rent, name)
    if kind == 'general':
        return Instance(values, tuple(data.get('alternatives', ())), agents, name)
    raise InstanceError(f"Unknown instance kind {kind!r}")


def instance_to_dict(inst):
    data = {'kind': inst.kind, 'name': inst.name, 'agents': list(inst.agent_ids)}
    if isinstance(inst, MatchingInstance):
        data['items'] = list(inst.item_ids)
        if inst.rent is not None:
            data['rent'] = format_rational(inst.rent)
    else:
        data['alternatives'] = list(inst.alternative_ids)
    data['values'] = [[format_rational(v) for v in row] for row in inst.values]
    return data


def read_json(path, allow_float=False):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InstanceError(f"Cannot read {path}: {e}") from e
    try:
        # Decimal keeps bare JSON numbers exact until parse_rational decides
        return json.loads(text, parse_float=decimal.Decimal)
    except json.JSONDecodeError as e:
        raise InstanceError(f"{path} is not valid JSON: {e}") from e


def load_instance(args):
    """Instance from FILE or --fixture, with the rent folded into the valuations"""
    if args.fixture and args.file:
        raise IncompatibleOptionsError("Give either an instance file or --fixture, not both")
    if args.fixture:
        inst = fixture(args.fixture)
        file_disagreement = None
    elif args.file:
        data = read_json(args.file, args.allow_float)
        inst = instance_from_dict(data, args.allow_float)
        file_disagreement = data.get('disagreement')
    else:
        raise InstanceError("No instance given; pass FILE or --fixture NAME[:PARAM]")
    if isinstance(inst, MatchingInstance) and inst.rent is not None:
        inst = apply_rent_shift(inst)
    return inst, file_disagreement


def resolve_disagreement(args, inst, file_disagreement):
    """
    Disagreement point from --disagreement, else the instance file, else the
    fixture's own convention, else exact Random Priority.
    """
    options = {}
    text = getattr(args, 'disagreement', None)
    if text:
        mode, _, value = text.partition('=')
        if mode == 'explicit':
            if not value:
                raise IncompatibleOptionsError("Use --disagreement explicit=FILE")
            data = read_json(value, args.allow_float)
            utilities = data.get('utilities') if isinstance(data, dict) else data
            options['utilities'] = [parse_rational(u, args.allow_float) for u in utilities]
        elif mode == 'alternative':
            options['alternative'] = value
        elif value:
            raise IncompatibleOptionsError(f"Disagreement mode {mode!r} takes no value")
    elif file_disagreement:
        mode = file_disagreement.get('mode', 'rp')
        if 'utilities' in file_disagreement:
            options['utilities'] = [parse_rational(u, args.allow_float) for u in file_disagreement['utilities']]
        if 'alternative' in file_disagreement:
            options['alternative'] = file_disagreement['alternative']
        for key in ('seed', 'samples'):
            if key in file_disagreement:
                options[key] = int(file_disagreement[key])
    elif args.fixture and default_disagreement(args.fixture):
        mode, options['alternative'] = default_disagreement(args.fixture)
    else:
        mode = 'rp'
    if mode not in MODES:
        raise IncompatibleOptionsError(f"Unknown disagreement mode {mode!r}; expected one of {', '.join(MODES)}")
    if mode == 'rp-mc':
        options.setdefault('seed', getattr(args, 'seed', None))
        options.setdefault('samples', getattr(args, 'samples', None))
    return disagreement_point(inst, mode, progress=getattr(args, 'progress', False), **options)


# --- Rendering --------------------------------------------------------------

def _alternative_json(inst, alternative):
    if isinstance(inst, MatchingInstance):
        return {inst.agent_ids[i]: inst.item_ids[j] for i, j in enumerate(alternative)}
    return inst.alternative_ids[alternative]


def solution_to_dict(inst, sol, d=None, flags=None):
    data = {
        'instance': inst.name,
        'mechanism': sol.mechanism,
        'alternative': _alternative_json(inst, sol.alternative),
        'agents': list(inst.agent_ids),
        'values': [format_rational(v) for v in sol.values],
        'transfers': [format_rational(p) for p in sol.transfers],
        'utilities': [format_rational(u) for u in sol.utilities],
    }
    if sol.item_transfers is not None:
        data['item_transfers'] = {inst.item_ids[j]: format_rational(q) for j, q in enumerate(sol.item_transfers)}
    if d is not None:
        data['disagreement'] = {
            'provenance': d.provenance.describe(),
            'utilities': [format_rational(u) for u in d.utilities],
        }
    if flags is not None:
        data['flags'] = flags
    if sol.notes:
        data['notes'] = list(sol.notes)
    return data


def solution_frame(inst, sol, d=None, exact=True):
    records = []
    for i, agent in enumerate(inst.agent_ids):
        record = {
            'agent': agent,
            'value': format_rational(sol.values[i]),
            'transfer': format_rational(sol.transfers[i]),
            'utility': format_rational(sol.utilities[i]),
        }
        if not exact:
            record['≈utility'] = approx(sol.utilities[i], settings.DECIMAL_DIGITS)
        if d is not None:
            record['disagreement'] = format_rational(d.utilities[i])
        records.append(record)
    return pd.DataFrame.from_records(records)


def emit(payload, frame, output, out=None):
    out = out or sys.stdout
    if output == 'json':
        out.write(json.dumps(payload, indent=2) + '\n')
    elif output == 'csv':
        out.write(frame.to_csv(index=False))
    else:
        out.write(frame.to_string(index=False) + '\n')


# --- Commands ---------------------------------------------------------------

def cmd_solve(args):
    inst, file_disagreement = load_instance(args)
    mechanism = get_mechanism(args.mechanism)
    if mechanism.matching_only and not (isinstance(inst, MatchingInstance) and inst.is_square):
        raise IncompatibleOptionsError(f"{args.mechanism} needs a square matching instance")
    d = resolve_disagreement(args, inst, file_disagreement)
    logger.info(f"Solving {inst.name or args.file} with {args.mechanism}, disagreement {d.provenance.describe()}")

    o = SetFunctionOracle(inst)
    explain = None
    if args.mechanism == 'lexmax':
        result = lexmax(o, d)
        sol = result.solution
        explain = {'method': result.method}
        if result.trace is not None:
            explain['water_filling'] = result.trace.to_dict(list(inst.agent_ids))
        if result.levels:
            explain['lp_levels'] = [
                {'level': format_rational(lv.level), 'agents': [inst.agent_ids[i] for i in lv.fixed]}
                for lv in result.levels
            ]
    else:
        sol = run_mechanism(args.mechanism, inst, d, oracle=o)
        explain = {'notes': list(sol.notes)}

    flags = {
        'in_anticore': bool(check_anticore(o, sol.utilities)),
        'dominates_disagreement': bool(check_domination(sol.utilities, d)),
    }
    payload = solution_to_dict(inst, sol, d, flags)
    if args.explain:
        payload['explain'] = explain
    emit(payload, solution_frame(inst, sol, d, exact=args.output != 'table'), args.output)
    return EXIT_OK


def _read_solution_utilities(path, allow_float):
    data = read_json(path, allow_float)
    utilities = data.get('utilities') if isinstance(data, dict) else data
    if utilities is None:
        raise InstanceError(f"{path} has no 'utilities'")
    return [parse_rational(u, allow_float) for u in utilities]


def cmd_check(args):
    inst, file_disagreement = load_instance(args)
    o = SetFunctionOracle(inst)
    labels = list(inst.agent_ids)
    requested = args.submodular or args.anticore or args.ws_core or args.decompose
    results = {}

    if args.submodular or not requested:
        verdict = is_submodular(o)
        entry = {'passed': verdict.holds}
        if not verdict.holds:
            s, t = verdict.witness
            entry['witness'] = {
                'S': label_subset(s, labels), 'T': label_subset(t, labels),
                'f(S)+f(T)': format_rational(o.wmax(s) + o.wmax(t)),
                'f(S&T)+f(S|T)': format_rational(o.wmax(s & t) + o.wmax(s | t)),
            }
        results['submodular'] = entry

    if args.anticore:
        utilities = _read_solution_utilities(args.anticore, args.allow_float)
        if len(utilities) != inst.n_agents:
            raise InstanceError(f"Solution has {len(utilities)} utilities for {inst.n_agents} agents")
        verdict = check_anticore(o, utilities)
        entry = {'passed': verdict.ok}
        if not verdict.ok:
            entry['violation'] = {'set': label_subset(verdict.subset, labels), 'slack': format_rational(verdict.slack)}
        results['anticore'] = entry

    if args.ws_core or not requested:
        d = resolve_disagreement(args, inst, file_disagreement)
        verdict = ws_core_nonempty(o, d)
        entry = {'passed': verdict.nonempty, 'sufficient_condition': sufficient_conditions(o, d)}
        if verdict.nonempty:
            entry['witness'] = [format_rational(u) for u in verdict.witness]
        elif verdict.gap is not None:
            entry['gap'] = format_rational(verdict.gap)
        results['ws_core'] = entry

    if args.decompose or not requested:
        partition = instance_partition(inst)
        if partition is None:
            results['decompose'] = {'passed': False, 'reason': 'component search unavailable for this instance'}
        else:
            results['decompose'] = {'passed': True, **partition.to_dict(inst)}

    passed = all(entry['passed'] for entry in results.values())
    for name, entry in results.items():
        logger.info(f"[{'PASS' if entry['passed'] else 'FAIL'}] {name}")
    frame = pd.DataFrame.from_records(
        [{'check': name, 'passed': entry['passed']} for name, entry in results.items()]
    )
    emit({'instance': inst.name, 'checks': results, 'passed': passed}, frame, args.output)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_compare(args):
    inst, file_disagreement = load_instance(args)
    d = resolve_disagreement(args, inst, file_disagreement)
    report = compare_mechanisms(inst, d)
    payload = {
        'instance': inst.name,
        'agents': list(inst.agent_ids),
        'disagreement': [format_rational(u) for u in report.disagreement],
        'mechanisms': [
            {
                'mechanism': row.mechanism,
                'utilities': [format_rational(u) for u in row.solution.utilities] if row.solution else None,
                'transfers': [format_rational(p) for p in row.solution.transfers] if row.solution else None,
                'flags': row.flags,
                'error': row.error or None,
            }
            for row in report.rows
        ],
    }
    emit(payload, report_frame(report, exact=args.output != 'table'), args.output)
    return EXIT_OK


def cmd_fixtures(args):
    if args.show:
        inst = fixture(args.show)
        sys.stdout.write(json.dumps(instance_to_dict(inst), indent=2) + '\n')
        return EXIT_OK
    frame = pd.DataFrame.from_records([
        {
            'name': spec.name,
            'parameter': f"{spec.param} (default {spec.default})" if spec.param else '',
            'description': spec.description,
        }
        for spec in FIXTURES.values()
    ])
    emit({'fixtures': frame.to_dict(orient='records')}, frame, args.output)
    return EXIT_OK


# --- Parser -----------------------------------------------------------------

def _add_instance_arguments(parser, with_disagreement=True):
    parser.add_argument('file', nargs='?', help='Instance JSON file')
    parser.add_argument('--fixture', help='Built-in instance, NAME or NAME:PARAM (see the fixtures command)')
    parser.add_argument('--allow-float', action='store_true', help='Accept bare JSON decimal numbers')
    parser.add_argument('--output', choices=OUTPUTS, default='json')
    if with_disagreement:
        parser.add_argument(
            '--disagreement',
            help='uniform | rp | rp-mc | eating | explicit=FILE | alternative=K (default: rp)',
        )
        parser.add_argument('--seed', type=int, help=f"Monte-Carlo seed (default {settings.MC_SEED})")
        parser.add_argument('--samples', type=int, help=f"Monte-Carlo samples (default {settings.MC_SAMPLES})")
        parser.add_argument('--progress', action='store_true', help='Show progress bars for long enumerations')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='welfareshare',
        description='Welfare sharing with transfers: lexmax-WS and rival solution concepts',
    )
    parser.add_argument('--log-level', default=None, help=f"Logging level (default {settings.LOG_LEVEL})")
    parser.add_argument('--log-file', default=None, help='Also log to this file')
    sub = parser.add_subparsers(dest='command', required=True)

    solve = sub.add_parser('solve', help='Solve an instance with one mechanism')
    _add_instance_arguments(solve)
    solve.add_argument('--mechanism', choices=tuple(MECHANISMS), default='lexmax')
    solve.add_argument('--explain', action='store_true', help='Attach the water-filling trace or LP level log')
    solve.set_defaults(handler=cmd_solve)

    check = sub.add_parser('check', help='Run structural checks on an instance')
    _add_instance_arguments(check)
    check.add_argument('--submodular', action='store_true')
    check.add_argument('--anticore', metavar='SOLFILE', help='Check the utilities of a solution file')
    check.add_argument('--ws-core', action='store_true')
    check.add_argument('--decompose', action='store_true')
    check.set_defaults(handler=cmd_check)

    compare = sub.add_parser('compare', help='Compare all applicable mechanisms')
    _add_instance_arguments(compare)
    compare.set_defaults(handler=cmd_compare)

    fixtures = sub.add_parser('fixtures', help='List built-in instances')
    fixtures.add_argument('--show', metavar='NAME', help='Print a fixture as instance JSON')
    fixtures.add_argument('--output', choices=OUTPUTS, default='table')
    fixtures.set_defaults(handler=cmd_fixtures)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger(level=args.log_level, log_file=args.log_file)

    try:
        return args.handler(args)
    except (InstanceError, FixtureError) as e:
        logger.error(f"Input error: {e}")
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_INPUT
    except (IncompatibleOptionsError, EnumerationBoundError) as e:
        logger.error(f"Options error: {e}")
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_OPTIONS
    except EmptyWSCoreError as e:
        logger.error(f"Empty WS-core: {e}")
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_EMPTY_CORE
    except WelfareShareError as e:
        logger.error(f"Solver error: {e}")
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
