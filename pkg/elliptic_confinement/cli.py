"""Command-line interface.

Exit codes: 0 when every outcome matches its expectation, 1 when some
task produced an unexpected outcome or failed while running, 2 on usage,
parse or validation errors.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__, conf
from .exceptions import ConfinementError, ValidationError
from .scenario import (
    find_scenario,
    load_scenario,
    run_certify,
    run_monitor,
    run_scenario,
    run_solve,
    sweep,
    sweep_p_function,
)
from .serialization import dumps_report, read_grid, write_grid
from .specs import build_body, build_field, parse_point, parse_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2


def _print(payload: Dict[str, Any]) -> None:
    sys.stdout.write(dumps_report(payload))


def _expectation_code(outcome: str, expect: Optional[str]) -> int:
    if expect is not None and outcome != expect:
        logger.warning('Expected %s, got %s', expect, outcome)
        return EXIT_UNEXPECTED
    return EXIT_OK


def command_run(args: argparse.Namespace) -> int:
    """Run a scenario file or a bundled scenario."""
    scenario = load_scenario(find_scenario(args.scenario))
    if args.seed is not None:
        scenario = scenario._replace(seed=args.seed)
    report, results = run_scenario(scenario, args.out)
    for result in results:
        logger.info('%s: %s (expected %s)', result.id, result.outcome, result.expect or 'nothing')
    _print({'scenario': report['scenario'], 'success': report['success'], 'tasks': [
        {'id': result.id, 'outcome': result.outcome, 'expect': result.expect} for result in results
    ]})
    return EXIT_OK if report['success'] else EXIT_UNEXPECTED


def _certify_task(args: argparse.Namespace) -> Dict[str, Any]:
    task: Dict[str, Any] = {'method': args.method, 'samples': args.samples}
    if args.shell_outer is not None:
        task['shell_outer'] = args.shell_outer
    if args.e is not None:
        task['e'] = parse_point(args.e)
    if args.L is not None:
        task['L'] = args.L
    if args.box is not None:
        task['box'] = args.box
    if args.variant is not None:
        task['variant'] = args.variant
    return task


def command_certify(args: argparse.Namespace) -> int:
    """Certify one structural condition."""
    field = build_field(args.field)
    body = build_body(args.body, field) if args.body else None
    overrides = {} if args.tol is None else {'MARGIN_THRESHOLD': args.tol}
    with conf.override_settings(**overrides):
        outcome, data = run_certify(_certify_task(args), field, body, args.seed)
    _print({'outcome': outcome, **data})
    return _expectation_code(outcome, args.expect)


def command_solve(args: argparse.Namespace) -> int:
    """Solve one boundary-value problem and write the grid."""
    field = build_field(args.field)
    body = build_body(args.body, field) if args.body else None
    one_dimensional = args.solver == 'bvp_1d'
    task: Dict[str, Any] = {
        'solver': args.solver,
        'N': args.grid or (2001 if one_dimensional else 81),
    }
    if one_dimensional:
        task['interval'] = args.interval or 20.0
        task['bc'] = [parse_point(point) for point in args.bc.split()]
    else:
        task['rect'] = args.interval or 5.0
        task['boundary'] = parse_spec(args.boundary)
    solution = run_solve(task, field, body)
    path = write_grid(solution, args.out or Path(conf.settings.OUTPUT_DIR) / 'solution.csv')
    outcome = 'pass' if solution.converged else 'fail'
    _print({
        'outcome': outcome,
        'converged': solution.converged,
        'iterations': solution.iterations,
        'residual_norm': solution.residual_norm,
        'grid': str(path),
    })
    return _expectation_code(outcome, args.expect)


def command_monitor(args: argparse.Namespace) -> int:
    """Run one monitor on a stored grid."""
    solution = read_grid(args.solution)
    body = None
    if args.body:
        field = build_field(args.field) if args.field else None
        body = build_body(args.body, field)
    task: Dict[str, Any] = {'monitor': args.monitor, 'tol': args.tol, 'band': args.band}
    if args.C is not None:
        task['C'] = args.C
    if args.R is not None:
        task['R'] = args.R
    if args.e is not None:
        task['e'] = parse_point(args.e)
    if args.L is not None:
        task['L'] = args.L
    report = run_monitor(task, solution, body)
    outcome = 'pass' if report.passed else 'fail'
    _print({'outcome': outcome, 'report': report.to_dict()})
    return _expectation_code(outcome, args.expect)


def command_project(args: argparse.Namespace) -> int:
    """Print the signed distance, the closest boundary point and the classification of a point."""
    body = build_body(args.body, build_field(args.field) if args.field else None)
    point = parse_point(args.point)
    _print({
        'signed_distance': body.signed_distance(point),
        'closest': body.project_boundary(point),
        'classification': body.contains(point, args.tol),
    })
    return EXIT_OK


def _write_rows(rows: List[Dict[str, Any]], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as stream:
        writer = csv.DictWriter(stream, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({
                key: repr(value) if isinstance(value, float) else
                ' '.join(repr(x) for x in value) if isinstance(value, list) else value
                for key, value in row.items()
            })


def command_sweep(args: argparse.Namespace) -> int:
    """Vary one parameter over a range and write one CSV row per value."""
    count = int(np.floor((args.stop - args.start) / args.step + 1e-9)) + 1
    values = args.start + args.step * np.arange(count)
    if args.solution:
        rows = sweep_p_function(read_grid(args.solution), args.R, values)
    else:
        rows = sweep(
            parse_spec(args.field),
            parse_spec(args.body) if args.body else None,
            args.param,
            values,
            args.samples,
            args.seed,
        )
    path = Path(args.out or Path(conf.settings.OUTPUT_DIR) / f'sweep_{args.param}.csv')
    _write_rows(rows, path)
    _print({'parameter': args.param, 'rows': rows, 'csv': str(path)})
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--seed', type=int, default=0, help='Sampling seed.')
    parser.add_argument('--out', type=Path, default=None, help='Output file or directory.')
    parser.add_argument('--expect', choices=('pass', 'fail', 'inconclusive'), default=None)


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    parser = argparse.ArgumentParser(
        prog='elliptic-confinement',
        description='Certificates, solvers and confinement monitors for Δu = F(u).',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='Log debug messages.')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='Log errors only.')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='Run a scenario file or a bundled scenario.')
    run.add_argument('scenario', help='Path or bundled scenario name.')
    run.add_argument('--seed', type=int, default=None, help='Override the scenario seed.')
    run.add_argument('--out', type=Path, default=None, help='Output directory.')
    run.set_defaults(handler=command_run)

    certify = commands.add_parser('certify', help='Certify one structural condition.')
    certify.add_argument('--field', required=True)
    certify.add_argument('--body', default=None)
    certify.add_argument(
        '--method',
        choices=('convex', 'halfspace', 'triangle', 'symmetry', 'symmetry_variants'),
        default='convex',
    )
    certify.add_argument('--samples', type=int, default=None)
    certify.add_argument('--shell-outer', dest='shell_outer', type=float, default=None)
    certify.add_argument('--e', default=None, help='Unit direction, e.g. "1 0".')
    certify.add_argument('--L', type=float, default=None, help='Half-space level.')
    certify.add_argument('--box', type=float, default=None, help='Half-width of the sampling box.')
    certify.add_argument('--variant', choices=('as_stated', 'rotated_lemma'), default=None)
    certify.add_argument('--tol', type=float, default=None, help='Margin threshold.')
    _add_common(certify)
    certify.set_defaults(handler=command_certify)

    solve = commands.add_parser('solve', help='Solve one boundary-value problem.')
    solve.add_argument('--field', required=True)
    solve.add_argument('--body', default=None, help='Body the boundary data must lie in.')
    solve.add_argument('--solver', choices=('bvp_1d', 'relax_2d'), default='bvp_1d')
    solve.add_argument('--grid', type=int, default=None, help='Nodes per axis.')
    solve.add_argument('--interval', type=float, default=None, help='Domain half-width.')
    solve.add_argument('--bc', default='-1 1', help='End states, e.g. "0,1 1,0".')
    solve.add_argument('--boundary', default='radial', help='Planar boundary data.')
    _add_common(solve)
    solve.set_defaults(handler=command_solve)

    monitor = commands.add_parser('monitor', help='Run one monitor on a stored grid.')
    monitor.add_argument('--solution', required=True, type=Path)
    monitor.add_argument(
        '--monitor',
        required=True,
        choices=('confinement', 'strictness', 'p_function', 'component_bound', 'symmetry'),
    )
    monitor.add_argument('--field', default=None, help='Field, for `--body auto`.')
    monitor.add_argument('--body', default=None)
    monitor.add_argument('--tol', type=float, default=None)
    monitor.add_argument('--band', type=float, default=None)
    monitor.add_argument('--C', type=float, default=None)
    monitor.add_argument('--R', type=float, default=None)
    monitor.add_argument('--e', default=None)
    monitor.add_argument('--L', type=float, default=None)
    _add_common(monitor)
    monitor.set_defaults(handler=command_monitor)

    project = commands.add_parser('project', help='Project a point onto the boundary of a body.')
    project.add_argument('--body', required=True)
    project.add_argument('--point', required=True)
    project.add_argument('--field', default=None, help='Field, for `--body auto`.')
    project.add_argument('--tol', type=float, default=None)
    project.set_defaults(handler=command_project)

    sweep_parser = commands.add_parser('sweep', help='Vary one parameter over a range.')
    sweep_parser.add_argument('--field', default=None)
    sweep_parser.add_argument('--body', default=None)
    sweep_parser.add_argument('--solution', type=Path, default=None, help='Grid for a C sweep.')
    sweep_parser.add_argument('--param', required=True)
    sweep_parser.add_argument('--start', type=float, required=True)
    sweep_parser.add_argument('--stop', type=float, required=True)
    sweep_parser.add_argument('--step', type=float, required=True)
    sweep_parser.add_argument('--samples', type=int, default=None)
    sweep_parser.add_argument('--R', type=float, default=1.0)
    _add_common(sweep_parser)
    sweep_parser.set_defaults(handler=command_sweep)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Configure the root logger for command-line use."""
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', force=True)
    logging.captureWarnings(True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return EXIT_OK if error.code in (0, None) else EXIT_USAGE
    configure_logging(args.verbose, args.quiet)
    if args.command == 'sweep' and not args.solution and not args.field:
        sys.stderr.write('error: sweep needs --field or --solution\n')
        return EXIT_USAGE
    if args.command == 'sweep' and args.step <= 0:
        sys.stderr.write('error: --step must be positive\n')
        return EXIT_USAGE
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (ValidationError, KeyError) as error:
        sys.stderr.write(f'error: {error}\n')
        return EXIT_USAGE
    except ConfinementError as error:
        sys.stderr.write(f'error: {error}\n')
        return EXIT_UNEXPECTED

