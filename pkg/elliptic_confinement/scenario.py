"""Scenario files: a field, a body and a list of tasks run in order.

```toml
name = "gp_wall"
seed = 0

[field]
kind = "gross_pitaevskii"
g11 = 1.0

[body]
kind = "auto"

[[task]]
id = "wall"
type = "solve"
solver = "bvp_1d"
```

Task types are `certify`, `solve` and `monitor`. Every task may carry
`expect = "pass" | "fail" | "inconclusive"`; the run fails when an
outcome differs from its expectation.
"""

import logging
import re
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy

from . import __version__, conf
from .certifier import (
    Certificate,
    certify_convex_condition,
    certify_halfspace,
    certify_symmetry_condition,
    certify_symmetry_variants,
    certify_triangle,
)
from .exceptions import ConfinementError, DimensionMismatchError, ScenarioError
from .fields import VectorField
from .geometry import ConvexBody, Polytope
from .monitors import (
    MonitorReport,
    component_bound_report,
    confinement_report,
    monitor_columns,
    p_function_report,
    strictness_report,
    symmetry_report,
)
from .serialization import read_grid, write_grid, write_report
from .solver import SolutionGrid, solve_bvp_1d, solve_relax_2d
from .specs import build_body, build_field, build_profile

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

TASK_TYPES = ('certify', 'solve', 'monitor')
OUTCOMES = ('pass', 'fail', 'inconclusive')
TOP_LEVEL_KEYS = {'name', 'seed', 'output_dir', 'field', 'body', 'task', 'description'}
LOCATION = re.compile(r'line (\d+), column (\d+)')


class Scenario(NamedTuple):
    """Parsed scenario file."""

    name: str
    field: Dict[str, Any]
    body: Optional[Dict[str, Any]]
    tasks: List[Dict[str, Any]]
    seed: int = 0
    output_dir: Optional[str] = None
    source: Optional[Path] = None


class TaskResult(NamedTuple):
    """Outcome of one task together with the data written to the report."""

    id: str  # noqa: A003
    type: str  # noqa: A003
    outcome: str
    expect: Optional[str]
    data: Dict[str, Any]

    @property
    def met(self) -> bool:
        """Return whether the outcome matches the expectation."""
        return self.expect is None or self.outcome == self.expect

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible representation."""
        return {
            'id': self.id,
            'type': self.type,
            'outcome': self.outcome,
            'expect': self.expect,
            'met': self.met,
            **self.data,
        }


def parse_scenario(text: str, source: Optional[Path] = None) -> Scenario:
    """Parse and validate the text of a scenario file."""
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as error:
        match = LOCATION.search(str(error))
        line, column = (int(match.group(1)), int(match.group(2))) if match else (None, None)
        raise ScenarioError(
            f'Invalid scenario syntax: {error}', line=line, column=column,
        ) from error
    unknown = set(document) - TOP_LEVEL_KEYS
    if unknown:
        raise ScenarioError(f'Unknown scenario keys: {sorted(unknown)}', key=sorted(unknown)[0])
    if 'field' not in document:
        raise ScenarioError('The scenario has no [field] table', key='field')
    tasks = document.get('task', [])
    if not isinstance(tasks, list) or not tasks:
        raise ScenarioError('The scenario has no [[task]] entries', key='task')
    scenario = Scenario(
        name=str(document.get('name', source.stem if source else 'scenario')),
        field=document['field'],
        body=document.get('body'),
        tasks=tasks,
        seed=int(document.get('seed', 0)),
        output_dir=document.get('output_dir'),
        source=source,
    )
    validate_scenario(scenario)
    return scenario


def load_scenario(path: Path) -> Scenario:
    """Read, parse and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as error:
        raise ScenarioError(f'Cannot read the scenario file `{path}`: {error}') from error
    return parse_scenario(text, path)


def build_objects(scenario: Scenario) -> Tuple[VectorField, Optional[ConvexBody]]:
    """Return the field and the body of a scenario."""
    try:
        field = build_field(scenario.field)
    except ScenarioError as error:
        key = f'field.{error.key}' if error.key else 'field'
        raise ScenarioError(error.message, key=key) from error
    except (ConfinementError, KeyError, TypeError) as error:
        raise ScenarioError(f'Invalid field: {error}', key='field') from error
    body = None
    if scenario.body is not None:
        try:
            body = build_body(scenario.body, field)
        except ScenarioError as error:
            key = f'body.{error.key}' if error.key else 'body'
            raise ScenarioError(error.message, key=key) from error
        except (ConfinementError, KeyError, TypeError) as error:
            raise ScenarioError(f'Invalid body: {error}', key='body') from error
        if body.dimension != field.dimension:
            raise ScenarioError(
                str(DimensionMismatchError(field.dimension, body.dimension, 'body')), key='body',
            )
    return field, body


def validate_scenario(scenario: Scenario) -> None:
    """Check task types, identifiers, expectations and solution references."""
    build_objects(scenario)
    seen: Dict[str, str] = {}
    for index, task in enumerate(scenario.tasks):
        key = f'task[{index}]'
        if not isinstance(task, dict):
            raise ScenarioError('Tasks must be tables', key=key)
        task_type = task.get('type')
        if task_type not in TASK_TYPES:
            raise ScenarioError(f'Task type must be one of {TASK_TYPES}', key=f'{key}.type')
        task_id = str(task.get('id', f'{task_type}_{index}'))
        if task_id in seen:
            raise ScenarioError(f'Duplicate task id `{task_id}`', key=f'{key}.id')
        if task.get('expect') is not None and task['expect'] not in OUTCOMES:
            raise ScenarioError(f'Expectations must be one of {OUTCOMES}', key=f'{key}.expect')
        if task_type == 'monitor':
            reference = task.get('solution')
            if reference is None:
                raise ScenarioError('Monitor tasks need a `solution`', key=f'{key}.solution')
            if seen.get(reference) != 'solve' and not _resolve(scenario, reference).exists():
                raise ScenarioError(
                    f'`{reference}` is neither an earlier solve task nor a grid file',
                    key=f'{key}.solution',
                )
            if 'monitor' not in task:
                raise ScenarioError('Monitor tasks need a `monitor` kind', key=f'{key}.monitor')
        if task_type == 'certify' and scenario.body is None and task.get('method') in (
            None, 'convex', 'triangle',
        ):
            raise ScenarioError('This certificate needs a [body] table', key=f'{key}.method')
        seen[task_id] = task_type


def _resolve(scenario: Scenario, reference: str) -> Path:
    path = Path(reference)
    if not path.is_absolute() and scenario.source is not None:
        path = scenario.source.parent / path
    return path


def _certificate_outcome(certificates: Dict[str, Certificate]) -> str:
    statuses = [certificate.status.value for certificate in certificates.values()]
    for outcome in ('fail', 'inconclusive'):
        if outcome in statuses:
            return outcome
    return 'pass'


def run_certify(
    task: Dict[str, Any],
    field: VectorField,
    body: Optional[ConvexBody],
    seed: int,
) -> Tuple[str, Dict[str, Any]]:
    """Run a certify task and return its outcome and data."""
    method = task.get('method', 'convex')
    samples = task.get('samples')
    seed = int(task.get('seed', seed))
    if method == 'convex':
        certificate = certify_convex_condition(
            field, body, float(task.get('shell_outer', 2.0)), samples, seed,
        )
    elif method == 'halfspace':
        certificate = certify_halfspace(
            field, task['e'], float(task['L']), task.get('box', 3.0), samples, seed,
        )
    elif method == 'triangle':
        if not isinstance(body, Polytope):
            raise ScenarioError('Triangle certificates need a polytope body', key='method')
        certificate = certify_triangle(
            field, body, samples, seed, float(task.get('shell_outer', 2.0)),
        )
    elif method == 'symmetry':
        certificate = certify_symmetry_condition(
            field, task.get('variant', 'rotated_lemma'), task.get('box', 3.0), samples, seed,
        )
    elif method == 'symmetry_variants':
        certificates = certify_symmetry_variants(field, task.get('box', 3.0), samples, seed)
        return _certificate_outcome(certificates), {
            'certificates': {name: c.to_dict() for name, c in certificates.items()},
        }
    else:
        raise ScenarioError(f'Unknown certificate method `{method}`', key='method')
    return certificate.status.value, {'certificate': certificate.to_dict()}


def run_solve(
    task: Dict[str, Any],
    field: VectorField,
    body: Optional[ConvexBody],
) -> SolutionGrid:
    """Run a solve task."""
    solver = task.get('solver', 'bvp_1d')
    if solver == 'bvp_1d':
        return solve_bvp_1d(
            field,
            task.get('interval', 20.0),
            tuple(task.get('bc', (-1.0, 1.0))),
            int(task.get('N', 2001)),
        )
    if solver == 'relax_2d':
        if 'boundary' not in task:
            raise ScenarioError('Relaxation tasks need a `boundary` table', key='boundary')
        return solve_relax_2d(
            field,
            task.get('rect', 5.0),
            build_profile(task['boundary'], field),
            int(task.get('N', 81)),
            dt=task.get('dt'),
            body=body if task.get('check_boundary', True) else None,
        )
    raise ScenarioError(f'Unknown solver `{solver}`', key='solver')


def run_monitor(
    task: Dict[str, Any],
    solution: SolutionGrid,
    body: Optional[ConvexBody],
) -> MonitorReport:
    """Run a monitor task on a solution."""
    kind = task['monitor']
    if kind in ('confinement', 'strictness') and body is None:
        raise ScenarioError(f'The {kind} monitor needs a [body] table', key='monitor')
    if kind == 'confinement':
        tol = task.get('tol')
        if tol is None:
            kappa = float(task.get('kappa', conf.settings.CONFINEMENT_KAPPA))
            tol = max(kappa * solution.h ** 2, conf.settings.MONITOR_TOLERANCE)
        return confinement_report(solution, body, tol)
    if kind == 'strictness':
        return strictness_report(solution, body, task.get('band'))
    if kind == 'p_function':
        return p_function_report(solution, float(task['C']), float(task['R']), task.get('tol'))
    if kind == 'component_bound':
        return component_bound_report(solution, task['e'], float(task['L']), task.get('tol'))
    if kind == 'symmetry':
        return symmetry_report(solution, task.get('tol'))
    raise ScenarioError(f'Unknown monitor `{kind}`', key='monitor')


def _versions() -> Dict[str, str]:
    return {
        'elliptic_confinement': __version__,
        'numpy': np.__version__,
        'scipy': scipy.__version__,
    }


def run_scenario(
    scenario: Scenario,
    output_dir: Optional[Path] = None,
) -> Tuple[Dict[str, Any], List[TaskResult]]:
    """Run every task in order, write the JSON report and grids, return the report and results."""
    field, body = build_objects(scenario)
    root = output_dir or scenario.output_dir or conf.settings.OUTPUT_DIR
    output_dir = Path(root) / scenario.name
    solutions: Dict[str, SolutionGrid] = {}
    results: List[TaskResult] = []
    for index, task in enumerate(scenario.tasks):
        task_id = str(task.get('id', f'{task["type"]}_{index}'))
        logger.info('Scenario %s: running task %s', scenario.name, task_id)
        if task['type'] == 'certify':
            outcome, data = run_certify(task, field, body, scenario.seed)
        elif task['type'] == 'solve':
            solution = run_solve(task, field, body)
            solutions[task_id] = solution
            outcome = 'pass' if solution.converged else 'fail'
            grid_path = write_grid(
                solution, output_dir / f'{task_id}.csv', monitor_columns(solution, body),
            )
            data = {
                'converged': solution.converged,
                'iterations': solution.iterations,
                'residual_norm': solution.residual_norm,
                'h': solution.h,
                'grid': grid_path.name,
                'solver': solution.metadata or {},
            }
        else:
            reference = task['solution']
            solution = solutions.get(reference)
            if solution is None:
                solution = read_grid(_resolve(scenario, reference))
            report = run_monitor(task, solution, body)
            outcome = 'pass' if report.passed else 'fail'
            data = {'report': report.to_dict(), 'solution': reference}
        result = TaskResult(task_id, task['type'], outcome, task.get('expect'), data)
        if not result.met:
            logger.warning('Task %s: expected %s, got %s', task_id, result.expect, outcome)
        results.append(result)
    report = {
        'scenario': scenario.name,
        'seed': scenario.seed,
        'versions': _versions(),
        'field': field.to_dict(),
        'body': body.to_dict() if body is not None else None,
        'tasks': [result.to_dict() for result in results],
        'success': all(result.met for result in results),
        'generated_at': datetime.now(timezone.utc).isoformat(timespec='seconds'),
    }
    write_report(report, output_dir / 'report.json')
    return report, results


def bundled_scenarios() -> Dict[str, Path]:
    """Return the scenario files shipped with the package by name."""
    directory = Path(__file__).parent / 'scenarios'
    return {path.stem: path for path in sorted(directory.glob('*.toml'))}


def find_scenario(name_or_path: str) -> Path:
    """Return a scenario path from a file path or the name of a bundled scenario."""
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = bundled_scenarios()
    if name_or_path in bundled:
        return bundled[name_or_path]
    raise ScenarioError(
        f'No scenario file `{name_or_path}`; bundled scenarios are {sorted(bundled)}',
    )


def sweep(
    field_spec: Dict[str, Any],
    body_spec: Optional[Dict[str, Any]],
    parameter: str,
    values: Sequence[float],
    n_samples: Optional[int] = None,
    seed: int = 0,
    shell_outer: float = 2.0,
) -> List[Dict[str, Any]]:
    """Certify the convex condition while one field parameter varies."""
    rows = []
    base = build_field(field_spec)
    for value in values:
        field = base.replace(**{parameter: float(value)})
        body = build_body(body_spec or {'kind': 'auto'}, field)
        certificate = certify_convex_condition(field, body, shell_outer, n_samples, seed)
        rows.append({
            parameter: float(value),
            'status': certificate.status.value,
            'worst_margin': certificate.worst_margin,
            'witness': certificate.witness.tolist(),
        })
    return rows


def sweep_p_function(
    solution: SolutionGrid,
    R: float,  # noqa: N803
    c_values: Sequence[float],
) -> List[Dict[str, Any]]:
    """Report the largest P-function value for each constant `C`."""
    rows = []
    for C in c_values:  # noqa: N806
        report = p_function_report(solution, float(C), R)
        rows.append({
            'C': float(C),
            'status': 'pass' if report.passed else 'fail',
            'extremum': report.extremum,
            'witness': report.witness,
        })
    return rows
