"""Sampling certificates of the structural conditions that confine solutions.

A certificate evaluates a margin function on a quasi-random cloud of an
explicit, bounded region of the state space, refines the worst samples by
a derivative-free local search and reports the smallest value found.
A positive margin is evidence, never a proof: the region is always
reported with the result.
"""

import logging
import warnings
from enum import Enum
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.stats import qmc

from . import conf
from .exceptions import (
    DimensionMismatchError,
    EmptyRegionError,
    PreconditionError,
    ValidationError,
)
from .fields import TransformedField, VectorField
from .geometry import ArrayLike, ConvexBody, Ellipsoid, EuclideanMotion, HalfSpace, Polytope
from .proxies import CountingField

logger = logging.getLogger(__name__)

MarginFunction = Callable[[np.ndarray], np.ndarray]
Box = Tuple[np.ndarray, np.ndarray]

FIRST_BATCH_POWER = 12
MAX_DRAWN_POWER = 22


class Status(str, Enum):
    """Outcome of a certificate."""

    PASS = 'pass'
    FAIL = 'fail'
    INCONCLUSIVE = 'inconclusive'


class SymmetryVariant(str, Enum):
    """Reading of the symmetry condition."""

    AS_STATED = 'as_stated'
    ROTATED_LEMMA = 'rotated_lemma'


class Certificate(NamedTuple):
    """Result of a sampling certificate over an explicit region."""

    condition: str
    status: Status
    worst_margin: float
    witness: np.ndarray
    samples_used: int
    seed: int
    region: Dict[str, Any]
    evaluations: int
    shell: Optional[Tuple[float, float]] = None
    details: Tuple['Certificate', ...] = ()

    @property
    def passed(self) -> bool:
        """Return whether the certificate passed."""
        return self.status == Status.PASS

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible representation."""
        result = {
            'condition': self.condition,
            'status': self.status.value,
            'worst_margin': float(self.worst_margin),
            'witness': [float(x) for x in self.witness],
            'samples_used': int(self.samples_used),
            'seed': int(self.seed),
            'region': self.region,
            'evaluations': int(self.evaluations),
            'shell': list(self.shell) if self.shell is not None else None,
        }
        if self.details:
            result['details'] = [detail.to_dict() for detail in self.details]
        return result


def classify_margin(worst_margin: float, threshold: Optional[float] = None) -> Status:
    """Return the status of a worst margin."""
    threshold = conf.settings.MARGIN_THRESHOLD if threshold is None else threshold
    if not worst_margin > 0:
        return Status.FAIL
    if worst_margin <= threshold:
        return Status.INCONCLUSIVE
    return Status.PASS


def as_box(box: Union[float, ArrayLike, Box], dimension: int) -> Box:
    """Return a sampling box from a half-width, a `(lower, upper)` pair or a `(2, m)` array."""
    if np.ndim(box) == 0:
        half_width = float(box)
        lower, upper = -np.full(dimension, half_width), np.full(dimension, half_width)
    else:
        lower, upper = (np.asarray(bound, dtype=float).ravel() for bound in box)
    if lower.size != dimension or upper.size != dimension:
        raise DimensionMismatchError(dimension, lower.size, 'sampling box')
    if not np.all(upper > lower):
        raise ValidationError('The sampling box must have positive extent along every axis')
    return lower, upper


def sample_region(
    admissible: Callable[[np.ndarray], np.ndarray],
    box: Box,
    n_samples: int,
    seed: int,
) -> np.ndarray:
    """Return the first `n_samples` admissible points of a scrambled Sobol sequence in a box.

    Batches double the generated total, so a larger request extends a
    smaller one with the same seed.
    """
    lower, upper = box
    sampler = qmc.Sobol(d=lower.size, scramble=True, seed=seed)
    accepted: List[np.ndarray] = []
    count = 0
    power = FIRST_BATCH_POWER
    while count < n_samples and sampler.num_generated < 2 ** MAX_DRAWN_POWER:
        points = qmc.scale(sampler.random_base2(power), lower, upper)
        points = points[admissible(points)]
        accepted.append(points)
        count += points.shape[0]
        power = int(np.log2(sampler.num_generated))
    if count == 0:
        raise EmptyRegionError('The sampling region contains no admissible points')
    if count < n_samples:
        warnings.warn(
            f'Only {count} of {n_samples} requested samples were found in the sampling region',
        )
    return np.concatenate(accepted)[:n_samples]


def compass_search(
    margin: MarginFunction,
    admissible: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    value: float,
    step: float,
    budget: int,
) -> Tuple[np.ndarray, float]:
    """Minimise a margin by coordinate search restricted to the admissible region."""
    point, best = start.copy(), value
    directions = np.vstack([np.eye(point.size), -np.eye(point.size)])
    used = 0
    while used + directions.shape[0] <= budget and step > 1e-12:
        trials = point + step * directions
        values = np.full(trials.shape[0], np.inf)
        inside = admissible(trials)
        if np.any(inside):
            values[inside] = margin(trials[inside])
        used += directions.shape[0]
        index = int(np.argmin(values))
        if values[index] < best:
            point, best = trials[index], float(values[index])
        else:
            step /= 2
    return point, best


def _certify(
    condition: str,
    field: CountingField,
    margin: MarginFunction,
    admissible: Callable[[np.ndarray], np.ndarray],
    box: Box,
    n_samples: Optional[int],
    seed: int,
    region: Dict[str, Any],
    refine_count: Optional[int] = None,
    shell: Optional[Tuple[float, float]] = None,
) -> Certificate:
    n_samples = conf.settings.SAMPLES if n_samples is None else n_samples
    refine_count = conf.settings.REFINE_COUNT if refine_count is None else refine_count
    if int(n_samples) != n_samples or n_samples < 1:
        raise ValidationError(f'The number of samples must be a positive integer, got {n_samples}')
    points = sample_region(admissible, box, int(n_samples), seed)
    values = margin(points)
    logger.debug('%s: %d samples, sampled minimum %.6e', condition, points.shape[0], values.min())
    candidates = [(float(values[i]), points[i]) for i in np.argsort(values, kind='stable')]
    step = 0.05 * float(np.max(box[1] - box[0]))
    refined = [
        compass_search(margin, admissible, start, value, step, conf.settings.REFINE_BUDGET)
        for value, start in candidates[:refine_count]
        if np.isfinite(value)
    ]
    witness, worst = candidates[0][1], candidates[0][0]
    for point, value in refined:
        if value < worst:
            witness, worst = point, value
    status = classify_margin(worst)
    logger.info('%s: %s with worst margin %.6e', condition, status.value, worst)
    return Certificate(
        condition=condition,
        status=status,
        worst_margin=worst,
        witness=np.asarray(witness, dtype=float),
        samples_used=points.shape[0],
        seed=seed,
        region=region,
        evaluations=field.evaluations,
        shell=shell,
    )


def _check_dimensions(field: VectorField, dimension: int) -> None:
    if field.dimension != dimension:
        raise DimensionMismatchError(dimension, field.dimension, 'field')


def certify_convex_condition(
    field: VectorField,
    body: ConvexBody,
    shell_outer: float = 2.0,
    n_samples: Optional[int] = None,
    seed: int = 0,
    refine_count: Optional[int] = None,
) -> Certificate:
    """Check `(u - u₀)·F(u) > 0` outside the body, `u₀` being the closest boundary point.

    Samples are drawn between the copies of the body dilated about its
    center by the inner shell factor and by `shell_outer`.
    """
    _check_dimensions(field, body.dimension)
    if isinstance(body, HalfSpace):
        raise PreconditionError('Half-spaces are certified with `certify_halfspace`')
    shell_inner = conf.settings.SHELL_INNER
    if not shell_outer > shell_inner:
        raise ValidationError(
            f'The outer shell factor must exceed the inner one ({shell_inner}), got {shell_outer}',
        )
    counting = CountingField(field)

    def margin(points: np.ndarray) -> np.ndarray:
        offsets = points - body.project_boundary(points)
        return np.einsum('ij,ij->i', offsets, counting.eval(points))

    def admissible(points: np.ndarray) -> np.ndarray:
        gauge = body.gauge(points)
        return (gauge >= shell_inner) & (gauge <= shell_outer)

    region = {'kind': 'shell', 'body': body.to_dict(), 'inner': shell_inner, 'outer': shell_outer}
    return _certify(
        'convex_condition',
        counting,
        margin,
        admissible,
        body.bounding_box(shell_outer),
        n_samples,
        seed,
        region,
        refine_count,
        shell=(shell_inner, shell_outer),
    )


def certify_halfspace(
    field: VectorField,
    e: ArrayLike,
    L: float,  # noqa: N803
    box: Union[float, ArrayLike, Box],
    n_samples: Optional[int] = None,
    seed: int = 0,
    refine_count: Optional[int] = None,
) -> Certificate:
    """Check `F(u)·e > 0` on the part of the box beyond the level, `u·e > L`.

    Samples within the half-space clearance of the level are excluded.
    """
    half_space = HalfSpace(e, L)
    _check_dimensions(field, half_space.dimension)
    lower, upper = as_box(box, half_space.dimension)
    clearance = conf.settings.HALFSPACE_CLEARANCE
    e = half_space.normal
    if np.sum(np.where(e > 0, upper, lower) * e) <= L + clearance:
        raise EmptyRegionError(f'The sampling box does not reach beyond the level {L}')
    counting = CountingField(field)

    def margin(points: np.ndarray) -> np.ndarray:
        return counting.eval(points) @ e

    def admissible(points: np.ndarray) -> np.ndarray:
        inside_box = np.all((points >= lower) & (points <= upper), axis=1)
        return inside_box & (points @ e > L + clearance)

    region = {
        'kind': 'halfspace',
        'normal': e.tolist(),
        'level': float(L),
        'clearance': clearance,
        'box': [lower.tolist(), upper.tolist()],
    }
    return _certify(
        'halfspace', counting, margin, admissible, (lower, upper), n_samples, seed, region,
        refine_count,
    )


def aggregate_status(statuses: List[Status]) -> Status:
    """Return fail if any part failed, else inconclusive if any part is, else pass."""
    if Status.FAIL in statuses:
        return Status.FAIL
    if Status.INCONCLUSIVE in statuses:
        return Status.INCONCLUSIVE
    return Status.PASS


def certify_triangle(
    field: VectorField,
    triangle: Polytope,
    n_samples: Optional[int] = None,
    seed: int = 0,
    shell_outer: float = 2.0,
    refine_count: Optional[int] = None,
) -> Certificate:
    """Check the half-space condition on each side of a triangle.

    Each side is moved onto `{u₁ = 0}` with the triangle in `{u₁ < 0}`, the
    field is moved with it and the half-space condition is checked with
    `e = (1, 0)` and `L = 0` in the box circumscribing the moved, dilated
    triangle. Witnesses are mapped back to the original frame.
    """
    if not isinstance(triangle, Polytope) or triangle.vertices.shape[0] != 3:
        raise ValidationError('`certify_triangle` needs a polytope with three vertices')
    _check_dimensions(field, 2)
    dilated = triangle.center + shell_outer * (triangle.vertices - triangle.center)
    sides = []
    for index in range(3):
        motion = EuclideanMotion.from_face(triangle, index)
        moved = motion.apply(dilated)
        side = certify_halfspace(
            TransformedField(field, motion),
            [1.0, 0.0],
            0.0,
            (moved.min(axis=0), moved.max(axis=0)),
            n_samples,
            seed,
            refine_count,
        )
        region = {
            **side.region,
            'side': index,
            'vertices': [
                triangle.vertices[index].tolist(),
                triangle.vertices[(index + 1) % 3].tolist(),
            ],
        }
        sides.append(side._replace(witness=motion.inverse(side.witness), region=region))
        logger.debug('Side %d: %s', index, side.status.value)
    worst = min(sides, key=lambda side: side.worst_margin)
    return Certificate(
        condition='triangle',
        status=aggregate_status([side.status for side in sides]),
        worst_margin=worst.worst_margin,
        witness=worst.witness,
        samples_used=sum(side.samples_used for side in sides),
        seed=seed,
        region={'kind': 'triangle', 'body': triangle.to_dict(), 'outer': shell_outer},
        evaluations=sum(side.evaluations for side in sides),
        details=tuple(sides),
    )


def certify_symmetry_condition(
    field: VectorField,
    variant: Union[SymmetryVariant, str] = SymmetryVariant.ROTATED_LEMMA,
    box: Union[float, ArrayLike, Box] = 3.0,
    n_samples: Optional[int] = None,
    seed: int = 0,
    refine_count: Optional[int] = None,
) -> Certificate:
    """Check a condition forcing `u₁ = u₂` away from the diagonal band.

    `as_stated` checks `(-u₂, u₁)·F(u) > 0`; `rotated_lemma` checks the
    half-space condition in the frame rotated by 45°, that is
    `sign(u₁ - u₂)(F₁ - F₂)/√2 > 0`.

    The rotated margin is the normal component of the field in that frame.
    It has the sign of `(u₁ - u₂)(F₁ - F₂)` but is that product divided by
    `√2|u₁ - u₂|`, so its size does not shrink with the square of the
    distance to the diagonal and stays comparable with the margin threshold
    at the edge of the band.
    """
    variant = SymmetryVariant(variant)
    _check_dimensions(field, 2)
    lower, upper = as_box(box, 2)
    band = conf.settings.SYMMETRY_BAND
    counting = CountingField(field)

    def margin(points: np.ndarray) -> np.ndarray:
        values = counting.eval(points)
        if variant == SymmetryVariant.AS_STATED:
            return -points[:, 1] * values[:, 0] + points[:, 0] * values[:, 1]
        return np.sign(points[:, 0] - points[:, 1]) * (values[:, 0] - values[:, 1]) / np.sqrt(2)

    def admissible(points: np.ndarray) -> np.ndarray:
        inside_box = np.all((points >= lower) & (points <= upper), axis=1)
        return inside_box & (np.abs(points[:, 0] - points[:, 1]) > band)

    region = {
        'kind': 'symmetry',
        'variant': variant.value,
        'band': band,
        'box': [lower.tolist(), upper.tolist()],
    }
    return _certify(
        f'symmetry_{variant.value}', counting, margin, admissible, (lower, upper), n_samples,
        seed, region, refine_count,
    )


def certify_symmetry_variants(
    field: VectorField,
    box: Union[float, ArrayLike, Box] = 3.0,
    n_samples: Optional[int] = None,
    seed: int = 0,
) -> Dict[str, Certificate]:
    """Return both symmetry certificates side by side, warning when they disagree."""
    certificates = {
        variant.value: certify_symmetry_condition(field, variant, box, n_samples, seed)
        for variant in SymmetryVariant
    }
    statuses = {certificate.status for certificate in certificates.values()}
    if len(statuses) > 1:
        warnings.warn(
            'The symmetry conditions disagree: '
            + ', '.join(f'{name} {c.status.value}' for name, c in certificates.items()),
        )
    return certificates


def _diagonal(A: ArrayLike) -> np.ndarray:  # noqa: N803
    matrix = np.asarray(A, dtype=float)
    return np.diag(matrix) if matrix.ndim == 2 else matrix.ravel()


def gl_anisotropic_margin(A: ArrayLike, v: ArrayLike) -> float:  # noqa: N803
    """Return `((|A⁻¹v|² - 1)A⁻¹v)·(v - v₀)` with `v₀` closest on `{|A⁻¹v| = 1}`."""
    diagonal = _diagonal(A)
    v = np.asarray(v, dtype=float)
    w = v / diagonal
    norm_squared = float(w @ w)
    if norm_squared <= 1.0:
        raise PreconditionError('The point must lie outside the closed ellipsoid |A⁻¹v| ≤ 1')
    v0 = Ellipsoid(diagonal).project_boundary(v)
    return float((norm_squared - 1.0) * w @ (v - v0))


def gl_anisotropic_margin_closed_form(A: ArrayLike, v: ArrayLike) -> float:  # noqa: N803
    """Return the factorised margin `(|A⁻¹v|² - 1)t(A⁻¹v)·(A + tA⁻¹)⁻¹A⁻¹v`.

    Here `v - v₀ = tA⁻²v₀`; the value agrees with `gl_anisotropic_margin`.
    """
    diagonal = _diagonal(A)
    v = np.asarray(v, dtype=float)
    w = v / diagonal
    norm_squared = float(w @ w)
    if norm_squared <= 1.0:
        raise PreconditionError('The point must lie outside the closed ellipsoid |A⁻¹v| ≤ 1')
    v0 = Ellipsoid(diagonal).project_boundary(v)
    t = np.linalg.norm(v - v0) / np.linalg.norm(v0 / diagonal ** 2)
    return float((norm_squared - 1.0) * t * np.sum(w ** 2 / (diagonal + t / diagonal)))
