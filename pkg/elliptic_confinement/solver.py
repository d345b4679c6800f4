"""Finite-difference solvers of `Δu = F(u)` on truncated domains.

One-dimensional walls are computed by damped Newton iteration on the
centered three-point discretisation. Planar solutions are relaxed to the
steady state of `u_t = Δu - F(u)` with a linearly stabilised semi-implicit
scheme: the Laplacian and a stabilising shift are implicit, the field is
explicit, so a single sparse factorisation serves every step.
"""

import logging
import warnings
from typing import Any, Callable, Dict, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import MatrixRankWarning, spsolve, splu

from . import conf
from .exceptions import (
    DimensionMismatchError,
    PreconditionError,
    SingularJacobianError,
    ValidationError,
)
from .fields import VectorField
from .geometry import ArrayLike, ConvexBody

logger = logging.getLogger(__name__)

Bounds = Tuple[Tuple[float, float], ...]
Profile = Callable[[np.ndarray], np.ndarray]


class SolutionGrid(NamedTuple):
    """Node values of a solution on a uniform grid.

    `values` has shape `(N, m)` on an interval and `(N, N, m)` on a
    rectangle; `bounds` holds one `(lower, upper)` pair per axis.
    """

    bounds: Bounds
    values: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    metadata: Optional[Dict[str, Any]] = None

    @property
    def n(self) -> int:
        """Return the dimension of the physical domain."""
        return len(self.bounds)

    @property
    def N(self) -> int:  # noqa: N802
        """Return the number of nodes along each axis."""
        return self.values.shape[0]

    @property
    def m(self) -> int:
        """Return the dimension of the state space."""
        return self.values.shape[-1]

    @property
    def spacings(self) -> Tuple[float, ...]:
        """Return the grid spacing along each axis."""
        return tuple((upper - lower) / (self.N - 1) for lower, upper in self.bounds)

    @property
    def h(self) -> float:
        """Return the largest grid spacing."""
        return max(self.spacings)

    @property
    def half_widths(self) -> Tuple[float, ...]:
        """Return the half-widths of the domain."""
        return tuple((upper - lower) / 2 for lower, upper in self.bounds)

    def axes(self) -> Tuple[np.ndarray, ...]:
        """Return the node coordinates along each axis."""
        return tuple(np.linspace(lower, upper, self.N) for lower, upper in self.bounds)

    def coordinates(self) -> np.ndarray:
        """Return node coordinates with shape `values.shape[:-1] + (n,)`."""
        return np.stack(np.meshgrid(*self.axes(), indexing='ij'), axis=-1)

    def flat_coordinates(self) -> np.ndarray:
        """Return node coordinates as a `(nodes, n)` array."""
        return self.coordinates().reshape(-1, self.n)

    def flat_values(self) -> np.ndarray:
        """Return node values as a `(nodes, m)` array."""
        return self.values.reshape(-1, self.m)

    def flat_index(self, index: int) -> Tuple[int, ...]:
        """Return the grid index of a flat node index."""
        return tuple(int(i) for i in np.unravel_index(index, self.values.shape[:-1]))


def make_grid(
    bounds: Union[float, Sequence[float], Sequence[Sequence[float]]],
    n: int,
) -> Bounds:
    """Return grid bounds from half-widths or explicit `(lower, upper)` pairs."""
    if np.ndim(bounds) == 0:
        bounds = [float(bounds)] * n
    result = []
    for axis in bounds:
        lower, upper = (-float(axis), float(axis)) if np.ndim(axis) == 0 else map(float, axis)
        if not upper > lower:
            raise ValidationError('The domain must have positive length along every axis')
        result.append((lower, upper))
    if len(result) != n:
        raise DimensionMismatchError(n, len(result), 'domain')
    return tuple(result)


def _check_nodes(N: int) -> None:  # noqa: N803
    if int(N) != N or N < 3:
        raise ValidationError(f'A grid needs at least 3 nodes per axis, got {N}')


def _second_difference(N: int, h: float) -> sp.csr_matrix:  # noqa: N803
    """Return the interior Dirichlet second difference matrix."""
    return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(N - 2, N - 2), format='csr') / h ** 2


def _block_diagonal(blocks: np.ndarray) -> sp.csr_matrix:
    """Return the sparse block diagonal matrix of a `(k, m, m)` stack."""
    k, m, _ = blocks.shape
    base = np.arange(k)[:, None, None] * m
    rows = np.broadcast_to(base + np.arange(m)[None, :, None], blocks.shape)
    columns = np.broadcast_to(base + np.arange(m)[None, None, :], blocks.shape)
    return sp.csr_matrix((blocks.ravel(), (rows.ravel(), columns.ravel())), shape=(k * m, k * m))


def _laplacian(values: np.ndarray, spacings: Sequence[float]) -> np.ndarray:
    """Return the centered Laplacian at the interior nodes of a full grid."""
    n = len(spacings)
    interior = tuple([slice(1, -1)] * n)
    result = np.zeros(values[interior].shape)
    for axis, h in enumerate(spacings):
        lower = list(interior)
        upper = list(interior)
        lower[axis] = slice(0, -2)
        upper[axis] = slice(2, None)
        result += (values[tuple(lower)] - 2.0 * values[interior] + values[tuple(upper)]) / h ** 2
    return result


def residual(solution: SolutionGrid, field: VectorField) -> float:
    """Return the max-norm of `Δ_h u - F(u)` over the interior nodes."""
    if solution.m != field.dimension:
        raise DimensionMismatchError(field.dimension, solution.m, 'solution')
    interior = tuple([slice(1, -1)] * solution.n)
    values = _laplacian(solution.values, solution.spacings) - field.eval(solution.values[interior])
    return float(np.max(np.abs(values))) if values.size else 0.0


def _state(value: ArrayLike, m: Optional[int] = None) -> np.ndarray:
    state = np.atleast_1d(np.asarray(value, dtype=float))
    if m is not None and state.size != m:
        raise DimensionMismatchError(m, state.size, 'boundary value')
    if not np.all(np.isfinite(state)):
        raise ValidationError('Boundary values must be finite')
    return state


def tanh_initial_guess(x: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Return `½(uL + uR) + ½(uR - uL)tanh(x - x_mid)` at the nodes."""
    profile = np.tanh(x - 0.5 * (x[0] + x[-1]))[:, None]
    return 0.5 * (left + right) + 0.5 * (right - left) * profile


def solve_bvp_1d(
    field: VectorField,
    interval: Union[float, Sequence[float]] = 20.0,
    bc: Tuple[ArrayLike, ArrayLike] = (-1.0, 1.0),
    N: int = 2001,  # noqa: N803
    initial: Optional[np.ndarray] = None,
    tolerance: Optional[float] = None,
    max_iterations: Optional[int] = None,
    max_halvings: Optional[int] = None,
) -> SolutionGrid:
    """Solve `u'' = F(u)` with Dirichlet values by damped Newton iteration.

    The interior unknowns are ordered node by node. Each Newton step halves
    its length until the residual max-norm decreases.
    """
    _check_nodes(N)
    tolerance = conf.settings.NEWTON_TOLERANCE if tolerance is None else tolerance
    if max_iterations is None:
        max_iterations = conf.settings.NEWTON_MAX_ITERATIONS
    max_halvings = conf.settings.NEWTON_MAX_HALVINGS if max_halvings is None else max_halvings
    bounds = make_grid([interval], 1)
    m = field.dimension
    left, right = _state(bc[0], m), _state(bc[1], m)
    x = np.linspace(bounds[0][0], bounds[0][1], N)
    h = x[1] - x[0]
    values = tanh_initial_guess(x, left, right) if initial is None else np.array(
        initial, dtype=float,
    ).reshape(N, m)
    values[0], values[-1] = left, right
    second_difference = sp.kron(_second_difference(N, h), sp.identity(m), format='csr')

    def interior_residual(candidate: np.ndarray) -> np.ndarray:
        laplacian = (candidate[:-2] - 2.0 * candidate[1:-1] + candidate[2:]) / h ** 2
        return (laplacian - field.eval(candidate[1:-1])).ravel()

    current = interior_residual(values)
    norm = float(np.max(np.abs(current))) if current.size else 0.0
    iteration = 0
    stalled = False
    while norm > tolerance and iteration < max_iterations:
        iteration += 1
        jacobian = second_difference - _block_diagonal(field.jacobian(values[1:-1]))
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', MatrixRankWarning)
            step = spsolve(jacobian.tocsc(), -current)
        if not np.all(np.isfinite(step)):
            raise SingularJacobianError(iteration)
        step = step.reshape(-1, m)
        damping = 1.0
        for _ in range(max_halvings + 1):
            trial = values.copy()
            trial[1:-1] += damping * step
            trial_residual = interior_residual(trial)
            trial_norm = float(np.max(np.abs(trial_residual)))
            if trial_norm < norm:
                break
            damping /= 2
        else:
            stalled = True
            break
        values, current, norm = trial, trial_residual, trial_norm
        logger.debug('Newton iteration %d: residual %.3e, damping %.3e', iteration, norm, damping)
    converged = norm <= tolerance
    if not converged:
        reason = 'the line search stalled' if stalled else 'the iteration limit was reached'
        warnings.warn(f'Newton iteration did not converge: {reason}, residual {norm:.3e}')
    logger.info('Newton solve with N=%d finished after %d iterations', N, iteration)
    return SolutionGrid(
        bounds=bounds,
        values=values,
        residual_norm=norm,
        iterations=iteration,
        converged=converged,
        metadata={'solver': 'newton', 'tolerance': tolerance, 'field': field.to_dict()},
    )


def constant_profile(value: ArrayLike) -> Profile:
    """Return boundary data equal to a constant state."""
    state = _state(value)
    return lambda points: np.tile(state, (points.shape[0], 1))


def radial_profile(scale: Optional[ArrayLike] = None) -> Profile:
    """Return the degree-one boundary data `x/|x|`, optionally multiplied by `scale`."""
    factor = 1.0 if scale is None else _state(scale)

    def profile(points: np.ndarray) -> np.ndarray:
        radii = np.linalg.norm(points, axis=1)
        if np.any(radii == 0):
            raise PreconditionError('Radial boundary data is undefined at the origin')
        return factor * points / radii[:, None]

    return profile


def three_phase_profile(a: ArrayLike, b: ArrayLike, c: ArrayLike) -> Profile:
    """Return boundary data equal to the vertex whose direction from the centroid is closest."""
    vertices = np.stack([_state(a, 2), _state(b, 2), _state(c, 2)])
    directions = vertices - vertices.mean(axis=0)
    directions /= np.linalg.norm(directions, axis=1)[:, None]

    def profile(points: np.ndarray) -> np.ndarray:
        return vertices[np.argmax(points @ directions.T, axis=1)]

    return profile


def diagonal_profile(amplitude: float = 1.0) -> Profile:
    """Return boundary data `u₁ = u₂ = amplitude · x₁/X` on the rectangle."""
    def profile(points: np.ndarray) -> np.ndarray:
        column = amplitude * points[:, 0] / np.max(np.abs(points[:, 0]))
        return np.column_stack([column, column])

    return profile


def lipschitz_estimate(field: VectorField, states: np.ndarray) -> float:
    """Return the largest spectral norm of the Jacobian over some states."""
    return float(np.max(np.linalg.norm(field.jacobian(states), ord=2, axis=(-2, -1))))


def solve_relax_2d(
    field: VectorField,
    rect: Union[float, Sequence[float]] = 5.0,
    bc: Union[Profile, np.ndarray, None] = None,
    N: int = 81,  # noqa: N803
    dt: Optional[float] = None,
    initial: Optional[np.ndarray] = None,
    tolerance: Optional[float] = None,
    max_steps: Optional[int] = None,
    body: Optional[ConvexBody] = None,
) -> SolutionGrid:
    """Relax `u_t = Δu - F(u)` on a rectangle until the update rate is below the tolerance.

    `bc` is a profile evaluated at the boundary nodes or a full `(N, N, m)`
    array whose boundary entries are used. When `body` is given, the
    boundary data must lie in its closure.

    Each step solves `((1 + dtS)I - dtΔ)uⁿ⁺¹ = (1 + dtS)uⁿ - dtF(uⁿ)` with
    `S` half the Lipschitz estimate of the field and, unless given,
    `dt = safety/Lipschitz`.
    """
    _check_nodes(N)
    tolerance = conf.settings.STEADY_TOLERANCE if tolerance is None else tolerance
    max_steps = conf.settings.RELAX_MAX_STEPS if max_steps is None else max_steps
    bounds = make_grid(rect if np.ndim(rect) else [rect, rect], 2)
    m = field.dimension
    grid = SolutionGrid(bounds, np.zeros((N, N, m)), np.inf, 0, False)
    coordinates = grid.coordinates()
    on_boundary = np.ones((N, N), dtype=bool)
    on_boundary[1:-1, 1:-1] = False
    values = np.zeros((N, N, m))
    if bc is None:
        raise ValidationError('Boundary data is required')
    if callable(bc):
        values[on_boundary] = np.asarray(bc(coordinates[on_boundary]), dtype=float).reshape(-1, m)
    else:
        data = np.asarray(bc, dtype=float)
        if data.shape != values.shape:
            raise DimensionMismatchError(m, data.shape[-1], 'boundary array')
        values[on_boundary] = data[on_boundary]
    if not np.all(np.isfinite(values[on_boundary])):
        raise ValidationError('Boundary values must be finite')
    if body is not None:
        distances = body.signed_distance(values[on_boundary])
        if np.max(distances) > conf.settings.MONITOR_TOLERANCE:
            raise PreconditionError(
                f'Boundary data leaves the body by {np.max(distances):.3e}',
            )
    if initial is None:
        values[1:-1, 1:-1] = values[on_boundary].mean(axis=0)
    else:
        values[1:-1, 1:-1] = np.asarray(initial, dtype=float).reshape(N, N, m)[1:-1, 1:-1]

    lipschitz = max(lipschitz_estimate(field, values.reshape(-1, m)), 1.0)
    stabilisation = 0.5 * lipschitz
    if dt is None:
        dt = conf.settings.TIME_STEP_SAFETY / lipschitz
    elif not dt > 0:
        raise ValidationError(f'The time step must be positive, got {dt}')
    hx, hy = grid.spacings
    size = (N - 2) ** 2
    operator = sp.kron(_second_difference(N, hx), sp.identity(N - 2)) + sp.kron(
        sp.identity(N - 2), _second_difference(N, hy),
    )
    shift = 1.0 + dt * stabilisation
    factor = splu((shift * sp.identity(size) - dt * operator).tocsc())
    frame = values.copy()
    frame[1:-1, 1:-1] = 0.0
    boundary_term = _laplacian(frame, grid.spacings).reshape(size, m)

    interior = values[1:-1, 1:-1].reshape(size, m)
    rate = np.inf
    step = 0
    while step < max_steps:
        step += 1
        updated = factor.solve(shift * interior - dt * field.eval(interior) + dt * boundary_term)
        if not np.all(np.isfinite(updated)):
            warnings.warn(f'Relaxation produced non-finite values at step {step}')
            break
        rate = float(np.max(np.abs(updated - interior))) / dt
        interior = updated
        if step % 500 == 0:
            logger.debug('Relaxation step %d: update rate %.3e', step, rate)
        if rate <= tolerance:
            break
    values[1:-1, 1:-1] = interior.reshape(N - 2, N - 2, m)
    converged = rate <= tolerance
    if not converged:
        warnings.warn(f'Relaxation did not reach a steady state: update rate {rate:.3e}')
    logger.info('Relaxation with N=%d finished after %d steps', N, step)
    solution = grid._replace(values=values, iterations=step, converged=converged, metadata={
        'solver': 'relaxation',
        'dt': dt,
        'lipschitz': lipschitz,
        'update_rate': rate,
        'field': field.to_dict(),
    })
    return solution._replace(residual_norm=residual(solution, field))


def truncation_sensitivity(
    solve: Callable[[float, int], SolutionGrid],
    X: float,  # noqa: N803
    N: int,  # noqa: N803
    factor: float = 1.5,
) -> float:
    """Return the max difference on `[-X, X]ⁿ` between solves at half-widths `X` and `factor·X`.

    `solve(half_width, nodes)` runs the solver; the larger domain keeps the
    grid spacing and is interpolated onto the smaller grid.
    """
    small = solve(X, N)
    large = solve(factor * X, int(round(factor * (N - 1))) + 1)
    points = small.flat_coordinates()
    if small.n == 1:
        interpolated = np.column_stack([
            np.interp(points[:, 0], large.axes()[0], large.values[:, c]) for c in range(large.m)
        ])
    else:
        interpolated = RegularGridInterpolator(large.axes(), large.values)(points)
    difference = float(np.max(np.abs(interpolated - small.flat_values())))
    logger.info('Truncation sensitivity between X=%g and X=%g: %.3e', X, factor * X, difference)
    return difference


def kink_error_estimate(x: ArrayLike, h: float) -> np.ndarray:
    """Return the leading discretisation error `(h²/12)(1 - u²)(2u - x/√2)` of the kink."""
    x = np.asarray(x, dtype=float)
    u = np.tanh(x / np.sqrt(2))
    return h ** 2 / 12 * (1 - u ** 2) * (2 * u - x / np.sqrt(2))
