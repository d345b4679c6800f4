"""Convex bodies of the state space.

Every body exposes the signed distance to its boundary (negative inside),
the closest boundary point, the outward unit normal and a classification
of points against a tolerance. All operations are vectorised over the
leading axis: a point of shape `(m,)` gives scalar results, a stack of
points of shape `(k, m)` gives arrays of length `k`.
"""

import warnings
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.stats import norm, qmc
from stringcase import snakecase

from . import conf
from .exceptions import DimensionMismatchError, PreconditionError, ValidationError

ArrayLike = Union[Sequence[float], np.ndarray]


class Classification(str, Enum):
    """Position of a point relative to a body."""

    INSIDE = 'inside'
    BOUNDARY = 'boundary'
    OUTSIDE = 'outside'


def as_points(u: ArrayLike, dimension: int) -> Tuple[np.ndarray, bool]:
    """Return `u` as a `(k, m)` float array and whether a single point was given."""
    points = np.asarray(u, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    if points.ndim != 2 or points.shape[-1] != dimension:
        raise DimensionMismatchError(dimension, points.shape[-1])
    if not np.all(np.isfinite(points)):
        raise PreconditionError('Points must have finite coordinates')
    return points, single


class ConvexBody(ABC):
    """Convex region of the state space."""

    strictly_convex: ClassVar[bool] = False
    registry: ClassVar[Dict[str, type]] = {}

    def __init__(self, dimension: int, tolerance: Optional[float] = None) -> None:
        self.dimension = dimension
        self.tolerance = conf.settings.GEOMETRY_TOLERANCE if tolerance is None else tolerance
        if self.tolerance < 0:
            raise ValidationError('The geometric tolerance must be non-negative')

    def __init_subclass__(cls, **kwargs) -> None:
        """Register concrete bodies under the snake case name of the class."""
        super().__init_subclass__(**kwargs)
        ConvexBody.registry[snakecase(cls.__name__)] = cls

    @property
    def kind(self) -> str:
        """Return the registry name of the body."""
        return snakecase(type(self).__name__)

    @property
    @abstractmethod
    def center(self) -> np.ndarray:
        """Return the point about which the body is dilated."""

    @abstractmethod
    def _signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed distances of a `(k, m)` stack of points."""

    @abstractmethod
    def _project(self, points: np.ndarray) -> np.ndarray:
        """Closest boundary points of a `(k, m)` stack of points off the boundary."""

    @abstractmethod
    def _normal(self, points: np.ndarray) -> np.ndarray:
        """Outward unit normals at a `(k, m)` stack of boundary points."""

    @abstractmethod
    def _gauge(self, points: np.ndarray) -> np.ndarray:
        """Minkowski gauge of the body about its center."""

    @abstractmethod
    def face_clearances(self, u: ArrayLike) -> np.ndarray:
        """Return a `(k, faces)` array of distances to each boundary face, positive inside."""

    @abstractmethod
    def bounding_box(self, scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
        """Return the bounding box of the body dilated by `scale` about its center."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible description of the body."""

    def signed_distance(self, u: ArrayLike) -> Union[float, np.ndarray]:
        """Return the signed distance from the boundary, negative inside."""
        points, single = as_points(u, self.dimension)
        distances = self._signed_distance(points)
        return float(distances[0]) if single else distances

    def project_boundary(self, u: ArrayLike) -> np.ndarray:
        """Return the closest boundary point.

        Points within the tolerance of the boundary are returned unchanged.
        """
        points, single = as_points(u, self.dimension)
        projected = points.copy()
        off_boundary = np.abs(self._signed_distance(points)) > self.tolerance
        if np.any(off_boundary):
            projected[off_boundary] = self._project(points[off_boundary])
        return projected[0] if single else projected

    def outward_normal(self, p: ArrayLike) -> np.ndarray:
        """Return the outward unit normal at a boundary point."""
        points, single = as_points(p, self.dimension)
        distances = np.abs(self._signed_distance(points))
        if np.any(distances > self.tolerance):
            raise PreconditionError(
                f'Point is {distances.max():.3e} away from the boundary, '
                f'more than the tolerance {self.tolerance:.1e}',
            )
        normals = self._normal(points)
        return normals[0] if single else normals

    def contains(
        self,
        u: ArrayLike,
        tol: Optional[float] = None,
    ) -> Union[Classification, List[Classification]]:
        """Classify points as inside, on the boundary or outside."""
        tol = self.tolerance if tol is None else tol
        if tol < 0:
            raise PreconditionError('The classification tolerance must be non-negative')
        points, single = as_points(u, self.dimension)
        classes = [
            Classification.OUTSIDE if d > tol else
            Classification.INSIDE if d < -tol else Classification.BOUNDARY
            for d in self._signed_distance(points)
        ]
        return classes[0] if single else classes

    def gauge(self, u: ArrayLike) -> Union[float, np.ndarray]:
        """Return the Minkowski gauge: 1 on the boundary, `s` on the boundary dilated by `s`."""
        points, single = as_points(u, self.dimension)
        values = self._gauge(points)
        return float(values[0]) if single else values


class Ball(ConvexBody):
    """Euclidean ball."""

    strictly_convex = True

    def __init__(
        self,
        radius: float,
        center: Optional[ArrayLike] = None,
        dimension: int = 2,
        tolerance: Optional[float] = None,
    ) -> None:
        if not radius > 0:
            raise ValidationError(f'The ball radius must be positive, got {radius}')
        self._center = np.zeros(dimension) if center is None else np.asarray(center, dtype=float)
        super().__init__(self._center.size, tolerance)
        self.radius = float(radius)

    @property
    def center(self) -> np.ndarray:
        """Return the ball center."""
        return self._center

    def _offsets(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        offsets = points - self._center
        lengths = np.linalg.norm(offsets, axis=1)
        directions = np.zeros_like(offsets)
        directions[:, 0] = 1.0
        nonzero = lengths > 0
        directions[nonzero] = offsets[nonzero] / lengths[nonzero, None]
        return directions, lengths

    def _signed_distance(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(points - self._center, axis=1) - self.radius

    def _project(self, points: np.ndarray) -> np.ndarray:
        directions, _ = self._offsets(points)
        return self._center + self.radius * directions

    def _normal(self, points: np.ndarray) -> np.ndarray:
        return self._offsets(points)[0]

    def _gauge(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(points - self._center, axis=1) / self.radius

    def face_clearances(self, u: ArrayLike) -> np.ndarray:
        """Return the distance to the sphere as a single face."""
        points, _ = as_points(u, self.dimension)
        return -self._signed_distance(points)[:, None]

    def bounding_box(self, scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
        """Return the box circumscribing the dilated ball."""
        return self._center - scale * self.radius, self._center + scale * self.radius

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible description of the ball."""
        return {'kind': self.kind, 'radius': self.radius, 'center': self._center.tolist()}


class Ellipsoid(ConvexBody):
    """Axis-aligned ellipsoid `{|A⁻¹(u - c)| < 1}` with `A = diag(semi_axes)`.

    Closest points solve the Lagrange condition `u = x + t A⁻²x` for the
    multiplier `t` with a safeguarded Newton iteration started from the
    radial intersection. Points whose iteration stalls are handed to
    `boundary_sweep_projection`.
    """

    strictly_convex = True
    max_iterations = 200

    def __init__(
        self,
        semi_axes: ArrayLike,
        center: Optional[ArrayLike] = None,
        tolerance: Optional[float] = None,
    ) -> None:
        axes = np.asarray(semi_axes, dtype=float).ravel()
        if axes.size == 0 or not np.all(axes > 0) or not np.all(np.isfinite(axes)):
            raise ValidationError(f'Ellipsoid semi-axes must be positive, got {axes.tolist()}')
        super().__init__(axes.size, tolerance)
        self.semi_axes = axes
        self._center = np.zeros(axes.size) if center is None else np.asarray(center, dtype=float)
        if self._center.shape != axes.shape:
            raise DimensionMismatchError(axes.size, self._center.size, 'center')

    @property
    def center(self) -> np.ndarray:
        """Return the ellipsoid center."""
        return self._center

    def _closest(self, points: np.ndarray) -> np.ndarray:
        """Closest boundary points, including points on the boundary."""
        offsets = points - self._center
        signs = np.where(offsets < 0, -1.0, 1.0)
        z = np.abs(offsets)
        closest = np.empty_like(z)
        e = self.semi_axes
        e2 = e ** 2
        e2_min = e2.min()
        minimal = e2 == e2_min
        # Interior points with no component along the shortest axes may
        # have their minimiser at the pole of the multiplier equation.
        stretched = np.zeros_like(z)
        stretched[:, ~minimal] = e[~minimal] * z[:, ~minimal] / (e2[~minimal] - e2_min)
        pole_value = np.sum(stretched ** 2, axis=1) - 1.0
        degenerate = np.all(z[:, minimal] == 0, axis=1) & (pole_value <= 0)
        if np.any(degenerate):
            closest[degenerate] = self._pole_points(z[degenerate])
        regular = ~degenerate
        if np.any(regular):
            t, converged = self._solve_multiplier(z[regular])
            regular_closest = e2 * z[regular] / (t[:, None] + e2)
            if not np.all(converged):
                warnings.warn(
                    f'Ellipsoid projection root-finder stalled for {np.sum(~converged)} points, '
                    'falling back to the boundary sweep.',
                )
                stalled = np.flatnonzero(~converged)
                for index in stalled:
                    regular_closest[index] = boundary_sweep_projection(
                        Ellipsoid(e), z[regular][index],
                    )
            closest[regular] = regular_closest
        return self._center + signs * closest

    def _pole_points(self, z: np.ndarray) -> np.ndarray:
        e = self.semi_axes
        e2 = e ** 2
        e2_min = e2.min()
        minimal = e2 == e2_min
        x = np.zeros_like(z)
        x[:, ~minimal] = e2[~minimal] * z[:, ~minimal] / (e2[~minimal] - e2_min)
        remainder = 1.0 - np.sum((x[:, ~minimal] / e[~minimal]) ** 2, axis=1)
        x[:, np.flatnonzero(minimal)[0]] = e[minimal][0] * np.sqrt(np.maximum(remainder, 0.0))
        return x

    def _solve_multiplier(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Solve `sum((e z / (t + e²))²) = 1` for `t > -min(e²)` in the first orthant."""
        e = self.semi_axes
        e2 = e ** 2
        ez = e * z
        lower = np.full(z.shape[0], -e2.min())
        upper = e.max() * np.linalg.norm(z, axis=1)
        rho = np.linalg.norm(z / e, axis=1)
        radial = z / np.where(rho > 0, rho, 1.0)[:, None]
        t = np.sign(rho - 1.0) * np.linalg.norm(z - radial, axis=1) / np.maximum(
            np.linalg.norm(radial / e2, axis=1), np.finfo(float).tiny,
        )
        t = np.clip(t, lower, upper)
        t = np.where(t <= lower, 0.5 * (lower + upper), t)
        converged = np.zeros(z.shape[0], dtype=bool)
        for _ in range(self.max_iterations):
            active = ~converged
            if not np.any(active):
                break
            denominators = t[active, None] + e2
            terms = ez[active] / denominators
            value = np.sum(terms ** 2, axis=1) - 1.0
            slope = -2.0 * np.sum(terms ** 2 / denominators, axis=1)
            lower[active] = np.where(value > 0, t[active], lower[active])
            upper[active] = np.where(value <= 0, t[active], upper[active])
            with np.errstate(divide='ignore', invalid='ignore'):
                candidate = t[active] - value / slope
            outside = ~np.isfinite(candidate) | (candidate <= lower[active]) | (
                candidate >= upper[active]
            )
            candidate = np.where(outside, 0.5 * (lower[active] + upper[active]), candidate)
            # An exact root closes the bracket on itself.
            candidate = np.where(value == 0, t[active], candidate)
            step = np.abs(candidate - t[active])
            t[active] = candidate
            scale = np.maximum(1.0, np.abs(candidate))
            done = (step <= 4 * np.finfo(float).eps * scale) | (value == 0) | (
                upper[active] - lower[active] <= 4 * np.finfo(float).eps * scale
            )
            converged[np.flatnonzero(active)[done]] = True
        return t, converged

    def _signed_distance(self, points: np.ndarray) -> np.ndarray:
        distances = np.linalg.norm(points - self._closest(points), axis=1)
        return np.where(self._gauge(points) >= 1.0, distances, -distances)

    def _project(self, points: np.ndarray) -> np.ndarray:
        return self._closest(points)

    def _normal(self, points: np.ndarray) -> np.ndarray:
        gradients = (points - self._center) / self.semi_axes ** 2
        return gradients / np.linalg.norm(gradients, axis=1)[:, None]

    def _gauge(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm((points - self._center) / self.semi_axes, axis=1)

    def face_clearances(self, u: ArrayLike) -> np.ndarray:
        """Return the distance to the ellipsoid surface as a single face."""
        points, _ = as_points(u, self.dimension)
        return -self._signed_distance(points)[:, None]

    def bounding_box(self, scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
        """Return the box circumscribing the dilated ellipsoid."""
        return self._center - scale * self.semi_axes, self._center + scale * self.semi_axes

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible description of the ellipsoid."""
        return {
            'kind': self.kind,
            'semi_axes': self.semi_axes.tolist(),
            'center': self._center.tolist(),
        }


class Polytope(ConvexBody):
    """Convex polygon of the plane given by its vertices.

    Vertices may be listed in either orientation; they are stored
    counterclockwise. Face `i` joins vertex `i` to vertex `i + 1`.
    """

    def __init__(
        self,
        vertices: ArrayLike,
        face_normals: Optional[ArrayLike] = None,
        tolerance: Optional[float] = None,
    ) -> None:
        vertices = np.asarray(vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise ValidationError('Polytopes are planar: vertices must have shape (k, 2)')
        if vertices.shape[0] < 3:
            raise ValidationError('A polytope needs at least three vertices')
        super().__init__(2, tolerance)
        edges = np.roll(vertices, -1, axis=0) - vertices
        area = 0.5 * np.sum(vertices[:, 0] * edges[:, 1] - vertices[:, 1] * edges[:, 0])
        if area < 0:
            vertices = vertices[::-1].copy()
            edges = np.roll(vertices, -1, axis=0) - vertices
        lengths = np.linalg.norm(edges, axis=1)
        turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(
            edges, -1, axis=0,
        )[:, 0]
        scale = max(float(np.max(lengths)), 1.0)
        if abs(area) <= self.tolerance * scale or np.any(turns <= self.tolerance * scale ** 2):
            raise ValidationError('Polytope vertices must span a non-degenerate convex polygon')
        self.vertices = vertices
        self.tangents = edges / lengths[:, None]
        self.face_normals = np.column_stack([self.tangents[:, 1], -self.tangents[:, 0]])
        self.offsets = np.einsum('ij,ij->i', self.face_normals, vertices)
        if face_normals is not None:
            given = np.asarray(face_normals, dtype=float)
            if given.shape != self.face_normals.shape or not np.allclose(
                given, self.face_normals, atol=1e-9,
            ):
                raise ValidationError('Face normals must be the unit outward normals of the faces')

    @property
    def center(self) -> np.ndarray:
        """Return the vertex centroid."""
        return self.vertices.mean(axis=0)

    def _plane_values(self, points: np.ndarray) -> np.ndarray:
        return points @ self.face_normals.T - self.offsets

    def _segment_points(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Closest points on every face segment and their distances."""
        edges = np.roll(self.vertices, -1, axis=0) - self.vertices
        relative = points[:, None, :] - self.vertices[None, :, :]
        fractions = np.clip(
            np.einsum('kfi,fi->kf', relative, edges) / np.sum(edges ** 2, axis=1),
            0.0,
            1.0,
        )
        feet = self.vertices[None, :, :] + fractions[:, :, None] * edges[None, :, :]
        return feet, np.linalg.norm(points[:, None, :] - feet, axis=2)

    def _signed_distance(self, points: np.ndarray) -> np.ndarray:
        plane_values = self._plane_values(points)
        inside = np.all(plane_values <= 0, axis=1)
        _, segment_distances = self._segment_points(points)
        return np.where(inside, plane_values.max(axis=1), segment_distances.min(axis=1))

    def _project(self, points: np.ndarray) -> np.ndarray:
        plane_values = self._plane_values(points)
        inside = np.all(plane_values <= 0, axis=1)
        feet, segment_distances = self._segment_points(points)
        rows = np.arange(points.shape[0])
        nearest_face = np.argmax(plane_values, axis=1)
        offsets = plane_values[rows, nearest_face, None]
        interior = points - offsets * self.face_normals[nearest_face]
        exterior = feet[rows, np.argmin(segment_distances, axis=1)]
        return np.where(inside[:, None], interior, exterior)

    def _normal(self, points: np.ndarray) -> np.ndarray:
        _, segment_distances = self._segment_points(points)
        adjacent = segment_distances <= max(self.tolerance, 1e-12)
        adjacent[np.arange(points.shape[0]), np.argmin(segment_distances, axis=1)] = True
        normals = adjacent.astype(float) @ self.face_normals
        return normals / np.linalg.norm(normals, axis=1)[:, None]

    def _gauge(self, points: np.ndarray) -> np.ndarray:
        center = self.center
        return np.max(
            (points - center) @ self.face_normals.T / (self.offsets - self.face_normals @ center),
            axis=1,
        )

    def face_clearances(self, u: ArrayLike) -> np.ndarray:
        """Return the distances to the supporting line of each face, positive inside."""
        points, _ = as_points(u, self.dimension)
        return -self._plane_values(points)

    def bounding_box(self, scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
        """Return the box circumscribing the dilated polygon."""
        dilated = self.center + scale * (self.vertices - self.center)
        return dilated.min(axis=0), dilated.max(axis=0)

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible description of the polygon."""
        return {
            'kind': self.kind,
            'vertices': self.vertices.tolist(),
            'face_normals': self.face_normals.tolist(),
        }


class HalfSpace(ConvexBody):
    """Half-space `{u : e·u < L}` with a unit normal `e`."""

    def __init__(
        self,
        normal: ArrayLike,
        level: float,
        tolerance: Optional[float] = None,
    ) -> None:
        normal = np.asarray(normal, dtype=float).ravel()
        if normal.size == 0 or abs(np.linalg.norm(normal) - 1.0) > 1e-9:
            raise ValidationError('The half-space normal must be a unit vector')
        super().__init__(normal.size, tolerance)
        self.normal = normal
        self.level = float(level)

    @property
    def center(self) -> np.ndarray:
        """Return the boundary point closest to the origin."""
        return self.level * self.normal

    def _signed_distance(self, points: np.ndarray) -> np.ndarray:
        return points @ self.normal - self.level

    def _project(self, points: np.ndarray) -> np.ndarray:
        return points - self._signed_distance(points)[:, None] * self.normal

    def _normal(self, points: np.ndarray) -> np.ndarray:
        return np.tile(self.normal, (points.shape[0], 1))

    def _gauge(self, points: np.ndarray) -> np.ndarray:
        raise PreconditionError('A half-space has no gauge: it is unbounded')

    def face_clearances(self, u: ArrayLike) -> np.ndarray:
        """Return the distance to the bounding hyperplane, positive inside."""
        points, _ = as_points(u, self.dimension)
        return -self._signed_distance(points)[:, None]

    def bounding_box(self, scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
        """Half-spaces are unbounded."""
        raise PreconditionError('A half-space has no bounding box: it is unbounded')

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible description of the half-space."""
        return {'kind': self.kind, 'normal': self.normal.tolist(), 'level': self.level}


def boundary_sweep_projection(
    ellipsoid: Ellipsoid,
    u: ArrayLike,
    samples: int = 20000,
) -> np.ndarray:
    """Closest boundary point of an ellipsoid by sweeping a dense boundary parametrisation.

    In the plane the sweep is refined by root-finding the tangency condition
    between the two neighbours of the best sample; in higher dimensions the best
    quasi-random direction is refined by a quasi-Newton minimisation.
    """
    y = np.asarray(u, dtype=float) - ellipsoid.center
    e = ellipsoid.semi_axes
    if ellipsoid.dimension == 2:
        angles = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        boundary = np.column_stack([e[0] * np.cos(angles), e[1] * np.sin(angles)])
        best = int(np.argmin(np.sum((boundary - y) ** 2, axis=1)))
        step = angles[1] - angles[0]

        def tangency(theta: float) -> float:
            point = np.array([e[0] * np.cos(theta), e[1] * np.sin(theta)])
            tangent = np.array([-e[0] * np.sin(theta), e[1] * np.cos(theta)])
            return float((point - y) @ tangent)

        left, right = angles[best] - step, angles[best] + step
        if tangency(left) * tangency(right) < 0:
            theta = brentq(tangency, left, right, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        else:
            theta = minimize_scalar(
                lambda angle: float(np.sum(
                    (np.array([e[0] * np.cos(angle), e[1] * np.sin(angle)]) - y) ** 2,
                )),
                bounds=(left, right),
                method='bounded',
                options={'xatol': 1e-14},
            ).x
        closest = np.array([e[0] * np.cos(theta), e[1] * np.sin(theta)])
    else:
        sampler = qmc.Sobol(d=ellipsoid.dimension, scramble=True, seed=0)
        directions = norm.ppf(np.clip(sampler.random(samples), 1e-12, 1 - 1e-12))
        directions /= np.linalg.norm(directions, axis=1)[:, None]
        boundary = directions * e
        start = directions[int(np.argmin(np.sum((boundary - y) ** 2, axis=1)))]

        def squared_distance(w: np.ndarray) -> float:
            return float(np.sum((e * w / np.linalg.norm(w) - y) ** 2))

        w = minimize(squared_distance, start, method='BFGS', options={'gtol': 1e-13}).x
        closest = e * w / np.linalg.norm(w)
    return ellipsoid.center + closest


class EuclideanMotion:
    """Rigid motion `u ↦ Q(u - p)` of the state space."""

    def __init__(self, rotation: ArrayLike, shift: ArrayLike) -> None:
        self.rotation = np.asarray(rotation, dtype=float)
        self.shift = np.asarray(shift, dtype=float)
        m = self.shift.size
        if self.rotation.shape != (m, m):
            raise DimensionMismatchError(m, self.rotation.shape[0], 'rotation')
        if not np.allclose(self.rotation @ self.rotation.T, np.eye(m), atol=1e-12):
            raise ValidationError('The motion matrix must be orthogonal')

    @classmethod
    def from_face(cls, polytope: Polytope, index: int) -> 'EuclideanMotion':
        """Map face `index` onto `{u₁ = 0}` with the polygon in `{u₁ < 0}`."""
        n = polytope.face_normals[index]
        rotation = np.array([[n[0], n[1]], [-n[1], n[0]]])
        return cls(rotation, polytope.vertices[index])

    @classmethod
    def planar_rotation(cls, angle: float) -> 'EuclideanMotion':
        """Return the rotation of the plane by `angle` about the origin."""
        c, s = np.cos(angle), np.sin(angle)
        return cls(np.array([[c, -s], [s, c]]), np.zeros(2))

    def apply(self, u: ArrayLike) -> np.ndarray:
        """Move points into the new frame."""
        return (np.asarray(u, dtype=float) - self.shift) @ self.rotation.T

    def inverse(self, u: ArrayLike) -> np.ndarray:
        """Move points back to the original frame."""
        return np.asarray(u, dtype=float) @ self.rotation + self.shift
