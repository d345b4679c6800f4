"""Reading and writing of reports and solution grids.

Reports are JSON objects with sorted keys. Grids are CSV files with one row
per node; the first line is a `#`-prefixed JSON object holding everything
needed to rebuild the grid.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from .exceptions import ValidationError
from .solver import SolutionGrid

PathLike = Union[str, Path]
CSV_FORMAT = '%.17g'


def to_jsonable(value: Any) -> Any:
    """Convert numpy values, enums and named tuples to plain JSON types."""
    if hasattr(value, 'to_dict'):
        return to_jsonable(value.to_dict())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def dumps_report(report: Dict[str, Any]) -> str:
    """Serialise a report; floats keep their shortest round-trip representation."""
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, allow_nan=True) + '\n'


def write_report(report: Dict[str, Any], path: PathLike) -> Path:
    """Write a report as JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report), encoding='utf-8')
    return path


def read_report(path: PathLike) -> Dict[str, Any]:
    """Read a JSON report."""
    return json.loads(Path(path).read_text(encoding='utf-8'))


def grid_metadata(solution: SolutionGrid) -> Dict[str, Any]:
    """Return the JSON metadata line of a grid file."""
    return to_jsonable({
        'bounds': [list(bound) for bound in solution.bounds],
        'N': solution.N,
        'm': solution.m,
        'residual_norm': solution.residual_norm,
        'iterations': solution.iterations,
        'converged': solution.converged,
        'metadata': solution.metadata or {},
    })


def grid_columns(solution: SolutionGrid) -> List[str]:
    """Return the coordinate and component column names of a grid."""
    return ['x', 'y', 'z'][:solution.n] + [f'u{c + 1}' for c in range(solution.m)]


def write_grid(
    solution: SolutionGrid,
    path: PathLike,
    columns: Optional[Dict[str, np.ndarray]] = None,
) -> Path:
    """Write a grid as CSV, optionally followed by per-node monitor columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = columns or {}
    names = grid_columns(solution) + list(columns)
    data = np.column_stack(
        [solution.flat_coordinates(), solution.flat_values()]
        + [np.asarray(values, dtype=float).ravel() for values in columns.values()],
    )
    header = '# ' + json.dumps(grid_metadata(solution), sort_keys=True) + '\n' + ','.join(names)
    np.savetxt(path, data, fmt=CSV_FORMAT, delimiter=',', header=header, comments='')
    return path


def read_grid(path: PathLike) -> SolutionGrid:
    """Rebuild a grid from a CSV file written by `write_grid`."""
    path = Path(path)
    with path.open(encoding='utf-8') as stream:
        first = stream.readline()
    if not first.startswith('#'):
        raise ValidationError(f'`{path}` has no grid metadata line')
    metadata = json.loads(first[1:])
    n, m, N = len(metadata['bounds']), metadata['m'], metadata['N']  # noqa: N806
    data = np.loadtxt(path, delimiter=',', skiprows=2, ndmin=2)
    if data.shape[0] != N ** n:
        raise ValidationError(f'`{path}` holds {data.shape[0]} nodes, expected {N ** n}')
    return SolutionGrid(
        bounds=tuple(tuple(bound) for bound in metadata['bounds']),
        values=data[:, n:n + m].reshape((N,) * n + (m,)),
        residual_norm=metadata['residual_norm'],
        iterations=metadata['iterations'],
        converged=metadata['converged'],
        metadata=metadata['metadata'],
    )
