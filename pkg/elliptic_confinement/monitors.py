"""Checks of confinement conclusions on stored solution grids.

Monitors are pure functions of a solution and their parameters;
they never run a solver.
"""

import logging
import warnings
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

from . import conf
from .exceptions import DimensionMismatchError, PreconditionError, ValidationError
from .geometry import ArrayLike, ConvexBody, HalfSpace
from .solver import SolutionGrid

logger = logging.getLogger(__name__)


class MonitorKind(str, Enum):
    """Monitored conclusion."""

    CONFINEMENT = 'confinement'
    STRICTNESS = 'strictness'
    P_FUNCTION = 'p_function'
    COMPONENT_BOUND = 'component_bound'
    SYMMETRY = 'symmetry'


class Strictness(str, Enum):
    """Position of a solution relative to the boundary of a body."""

    STRICTLY_INTERIOR = 'strictly_interior'
    BOUNDARY_LOCKED = 'boundary_locked'
    MIXED = 'mixed'


class MonitorReport(NamedTuple):
    """Extremum of a monitored scalar over the nodes of a solution."""

    kind: MonitorKind
    extremum: float
    witness: List[int]
    statistics: Dict[str, float]
    tolerance: float
    passed: bool
    details: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible representation."""
        return {
            'kind': self.kind.value,
            'extremum': float(self.extremum),
            'witness': list(self.witness),
            'statistics': {key: float(value) for key, value in self.statistics.items()},
            'tolerance': float(self.tolerance),
            'pass': bool(self.passed),
            'details': self.details or {},
        }


def _statistics(values: np.ndarray) -> Dict[str, float]:
    return {
        'min': float(np.min(values)),
        'max': float(np.max(values)),
        'mean': float(np.mean(values)),
    }


def _check_dimension(solution: SolutionGrid, dimension: int) -> None:
    if solution.m != dimension:
        raise DimensionMismatchError(dimension, solution.m, 'solution')


def _maximum_report(
    kind: MonitorKind,
    solution: SolutionGrid,
    values: np.ndarray,
    tolerance: float,
    details: Optional[Dict[str, Any]] = None,
) -> MonitorReport:
    """Report the node-wise maximum of a scalar, passing when it does not exceed the tolerance."""
    flat = values.ravel()
    index = int(np.argmax(flat))
    extremum = float(flat[index])
    report = MonitorReport(
        kind=kind,
        extremum=extremum,
        witness=list(solution.flat_index(index)),
        statistics=_statistics(flat),
        tolerance=tolerance,
        passed=extremum <= tolerance,
        details=details or {},
    )
    logger.info(
        '%s monitor: maximum %.6e at node %s, %s',
        kind.value, extremum, report.witness, 'pass' if report.passed else 'fail',
    )
    return report


def confinement_report(
    solution: SolutionGrid,
    body: ConvexBody,
    tol: Optional[float] = None,
) -> MonitorReport:
    """Report the largest signed distance `d(u(x))` over all nodes."""
    _check_dimension(solution, body.dimension)
    tol = conf.settings.MONITOR_TOLERANCE if tol is None else tol
    distances = body.signed_distance(solution.flat_values())
    return _maximum_report(
        MonitorKind.CONFINEMENT, solution, distances, tol, {'body': body.to_dict()},
    )


def confinement_constant(solution: SolutionGrid, body: ConvexBody) -> float:
    """Return `κ = max(d⁺)/h²`, the smallest constant passing confinement at `κh²`."""
    _check_dimension(solution, body.dimension)
    excess = max(float(np.max(body.signed_distance(solution.flat_values()))), 0.0)
    return excess / solution.h ** 2


def oscillation(values: np.ndarray) -> float:
    """Return the diameter `max|u(x) - u(y)|` of a set of states."""
    values = np.unique(np.asarray(values, dtype=float), axis=0)
    if values.shape[0] < 2:
        return 0.0
    candidates = values
    if values.shape[1] > 1 and values.shape[0] > values.shape[1] + 1:
        try:
            candidates = values[ConvexHull(values).vertices]
        except RuntimeError:
            candidates = values
    elif values.shape[1] == 1:
        return float(values.max() - values.min())
    if candidates.shape[0] > 4096:
        candidates = candidates[np.linspace(0, candidates.shape[0] - 1, 4096).astype(int)]
        warnings.warn('Oscillation computed on a subsample of the states')
    return float(np.max(pdist(candidates)))


def core_mask(solution: SolutionGrid, fraction: Optional[float] = None) -> np.ndarray:
    """Return the nodes whose coordinates lie within `fraction` of the half-widths."""
    fraction = conf.settings.CORE_FRACTION if fraction is None else fraction
    coordinates = solution.coordinates()
    centers = np.array([0.5 * (lower + upper) for lower, upper in solution.bounds])
    half_widths = np.array(solution.half_widths)
    return np.all(np.abs(coordinates - centers) <= fraction * half_widths + 1e-12, axis=-1)


def strictness_report(
    solution: SolutionGrid,
    body: ConvexBody,
    band: Optional[float] = None,
    fraction: Optional[float] = None,
) -> MonitorReport:
    """Classify a solution as strictly interior, locked to the boundary or mixed.

    Only core nodes are examined, since truncated boundary data may sit on
    the boundary of the body. A face is locking when every core node lies
    within the band of it; a node is touching when it lies within the touch
    tolerance of some face. Mixed solutions touch without being locked.
    The report fails on mixed solutions and on nonconstant solutions
    locked to the boundary of a strictly convex body.
    """
    _check_dimension(solution, body.dimension)
    band = 10 * solution.h ** 2 if band is None else band
    if band < 0:
        raise ValidationError('The boundary band must be non-negative')
    mask = core_mask(solution, fraction)
    if not np.any(mask):
        warnings.warn('The core region contains no nodes, using all nodes')
        mask = np.ones(solution.values.shape[:-1], dtype=bool)
    states = solution.values[mask]
    clearances = body.face_clearances(states)
    nearest = clearances.min(axis=1)
    locked_faces = np.all(clearances <= band, axis=0)
    touching = nearest <= conf.settings.TOUCH_TOLERANCE
    if np.any(locked_faces):
        classification = Strictness.BOUNDARY_LOCKED
    elif np.any(touching):
        classification = Strictness.MIXED
    else:
        classification = Strictness.STRICTLY_INTERIOR
    spread = oscillation(states)
    passed = classification != Strictness.MIXED and not (
        classification == Strictness.BOUNDARY_LOCKED and body.strictly_convex and spread > band
    )
    flat_core = np.flatnonzero(mask.ravel())
    index = int(np.argmin(nearest))
    report = MonitorReport(
        kind=MonitorKind.STRICTNESS,
        extremum=float(nearest[index]),
        witness=list(solution.flat_index(flat_core[index])),
        statistics=_statistics(nearest),
        tolerance=band,
        passed=passed,
        details={
            'classification': classification.value,
            'oscillation': spread,
            'locked_faces': np.flatnonzero(locked_faces).tolist(),
            'touching_nodes': int(np.count_nonzero(touching)),
            'core_nodes': int(states.shape[0]),
        },
    )
    logger.info(
        'Strictness monitor: %s, minimum clearance %.6e', classification.value, report.extremum,
    )
    if classification == Strictness.MIXED:
        logger.warning('Solution touches the boundary without being locked to it')
    return report


def p_function_values(solution: SolutionGrid, C: float, R: float) -> np.ndarray:  # noqa: N803
    """Return `P = ½|∇u|² + C(|u|² - R²)` at every node.

    Gradients are centered in the interior and one-sided of second order
    at the edges of the grid.
    """
    squared_gradient = np.zeros(solution.values.shape[:-1])
    for axis, h in enumerate(solution.spacings):
        derivative = np.gradient(solution.values, h, axis=axis, edge_order=2)
        squared_gradient += np.sum(derivative ** 2, axis=-1)
    return 0.5 * squared_gradient + C * (np.sum(solution.values ** 2, axis=-1) - R ** 2)


def p_function_report(
    solution: SolutionGrid,
    C: float,  # noqa: N803
    R: float,  # noqa: N803
    tol: Optional[float] = None,
) -> MonitorReport:
    """Report the largest value of the P-function."""
    if not (C > 0 and R > 0):
        raise PreconditionError('The P-function needs positive constants C and R')
    if solution.N < 3:
        raise PreconditionError('The P-function needs at least three nodes per axis')
    tol = conf.settings.P_FUNCTION_TOLERANCE if tol is None else tol
    return _maximum_report(
        MonitorKind.P_FUNCTION, solution, p_function_values(solution, C, R), tol, {'C': C, 'R': R},
    )


def p_function_threshold(
    solution: SolutionGrid,
    R: float,  # noqa: N803
    c_values: Sequence[float],
    tol: Optional[float] = None,
) -> Optional[float]:
    """Return the smallest `C` of an increasing sequence from which the P-function test passes."""
    threshold = None
    for C in sorted(c_values, reverse=True):  # noqa: N806
        if not p_function_report(solution, C, R, tol).passed:
            break
        threshold = C
    return threshold


def component_bound_report(
    solution: SolutionGrid,
    e: ArrayLike,
    L: float,  # noqa: N803
    tol: Optional[float] = None,
) -> MonitorReport:
    """Report the largest value of `u(x)·e - L`."""
    half_space = HalfSpace(e, L)
    _check_dimension(solution, half_space.dimension)
    tol = conf.settings.MONITOR_TOLERANCE if tol is None else tol
    values = solution.flat_values() @ half_space.normal - half_space.level
    return _maximum_report(
        MonitorKind.COMPONENT_BOUND, solution, values, tol,
        {'normal': half_space.normal.tolist(), 'level': half_space.level},
    )


def symmetry_report(solution: SolutionGrid, tol: Optional[float] = None) -> MonitorReport:
    """Report the largest value of `|u₁(x) - u₂(x)|`."""
    _check_dimension(solution, 2)
    tol = conf.settings.MONITOR_TOLERANCE if tol is None else tol
    values = np.abs(solution.flat_values()[:, 0] - solution.flat_values()[:, 1])
    return _maximum_report(MonitorKind.SYMMETRY, solution, values, tol)


def monitor_columns(
    solution: SolutionGrid,
    body: Optional[ConvexBody] = None,
    C: Optional[float] = None,  # noqa: N803
    R: Optional[float] = None,  # noqa: N803
    e: Optional[ArrayLike] = None,
    L: Optional[float] = None,  # noqa: N803
) -> Dict[str, np.ndarray]:
    """Return per-node columns of the monitored scalars that can be computed."""
    columns: Dict[str, np.ndarray] = {}
    if body is not None:
        columns['signed_distance'] = body.signed_distance(solution.flat_values())
    if C is not None and R is not None:
        columns['p_function'] = p_function_values(solution, C, R).ravel()
    if e is not None and L is not None:
        half_space = HalfSpace(e, L)
        columns['component_excess'] = solution.flat_values() @ half_space.normal - L
    if solution.m == 2:
        columns['asymmetry'] = np.abs(solution.flat_values()[:, 0] - solution.flat_values()[:, 1])
    return columns
