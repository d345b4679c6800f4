"""`geometry` module tests."""

import time
from unittest import TestCase
from unittest.mock import patch

import numpy as np
from elliptic_confinement.exceptions import (
    DimensionMismatchError,
    PreconditionError,
    ValidationError,
)
from elliptic_confinement.geometry import (
    Ball,
    Classification,
    ConvexBody,
    Ellipsoid,
    EuclideanMotion,
    HalfSpace,
    Polytope,
    boundary_sweep_projection,
)


def exterior_points(body: ConvexBody, count: int, seed: int = 1) -> np.ndarray:
    """Return random points between the boundary and its copy dilated by 3."""
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(count, body.dimension))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    radii = rng.uniform(1.05, 3.0, size=count)
    boundary = directions / body.gauge(body.center + directions)[:, None]
    return body.center + radii[:, None] * boundary


class BallTests(TestCase):
    """Tests for the `Ball` class."""

    def setUp(self) -> None:
        """Create the unit disc."""
        self.ball = Ball(1.0)

    def test_signed_distance(self) -> None:
        """Test signed distances inside, on and outside the ball."""
        self.assertAlmostEqual(1.0, self.ball.signed_distance([2.0, 0.0]))
        self.assertAlmostEqual(0.0, self.ball.signed_distance([0.0, 1.0]))
        self.assertAlmostEqual(-0.5, self.ball.signed_distance([0.3, 0.4]))
        np.testing.assert_allclose(
            [1.0, -1.0],
            self.ball.signed_distance([[0.0, -2.0], [0.0, 0.0]]),
        )

    def test_project_boundary(self) -> None:
        """Test closest boundary points, including the center tie-break."""
        np.testing.assert_allclose([1.0, 0.0], self.ball.project_boundary([2.0, 0.0]))
        np.testing.assert_allclose([0.6, 0.8], self.ball.project_boundary([0.3, 0.4]))
        np.testing.assert_allclose([1.0, 0.0], self.ball.project_boundary([0.0, 0.0]))
        on_boundary = np.array([0.6, -0.8])
        np.testing.assert_array_equal(on_boundary, self.ball.project_boundary(on_boundary))

    def test_outward_normal(self) -> None:
        """Test normals at boundary points and the precondition off the boundary."""
        np.testing.assert_allclose([0.0, 1.0], self.ball.outward_normal([0.0, 1.0]))
        with self.assertRaises(PreconditionError):
            self.ball.outward_normal([0.0, 0.5])

    def test_contains(self) -> None:
        """Test the classification of points."""
        self.assertEqual(Classification.INSIDE, self.ball.contains([0.0, 0.0]))
        self.assertEqual(Classification.BOUNDARY, self.ball.contains([1.0, 0.0]))
        self.assertEqual(Classification.OUTSIDE, self.ball.contains([1.0, 1.0]))
        self.assertEqual(Classification.BOUNDARY, self.ball.contains([1.001, 0.0], tol=0.01))
        self.assertEqual(
            [Classification.INSIDE, Classification.OUTSIDE],
            self.ball.contains([[0.0, 0.0], [2.0, 0.0]]),
        )
        with self.assertRaises(PreconditionError):
            self.ball.contains([0.0, 0.0], tol=-1.0)

    def test_center_and_gauge(self) -> None:
        """Test a shifted ball and its gauge."""
        ball = Ball(2.0, center=[1.0, 1.0])
        self.assertAlmostEqual(1.0, ball.gauge([3.0, 1.0]))
        self.assertAlmostEqual(2.0, ball.gauge([1.0, 5.0]))
        lower, upper = ball.bounding_box(2.0)
        np.testing.assert_allclose([-3.0, -3.0], lower)
        np.testing.assert_allclose([5.0, 5.0], upper)

    def test_validation(self) -> None:
        """Test invalid parameters and inputs."""
        with self.assertRaises(ValidationError):
            Ball(0.0)
        with self.assertRaises(DimensionMismatchError):
            self.ball.signed_distance([1.0, 0.0, 0.0])
        with self.assertRaises(PreconditionError):
            self.ball.signed_distance([np.nan, 0.0])

    def test_to_dict(self) -> None:
        """Test the description of the ball."""
        self.assertEqual(
            {'kind': 'ball', 'radius': 1.0, 'center': [0.0, 0.0]},
            self.ball.to_dict(),
        )


class EllipsoidTests(TestCase):
    """Tests for the `Ellipsoid` class."""

    def setUp(self) -> None:
        """Create the ellipse with semi-axes (2, 1)."""
        self.ellipse = Ellipsoid([2.0, 1.0])

    def test_axis_points(self) -> None:
        """Test points on the axes."""
        self.assertAlmostEqual(1.0, self.ellipse.signed_distance([3.0, 0.0]))
        np.testing.assert_allclose([2.0, 0.0], self.ellipse.project_boundary([3.0, 0.0]))
        self.assertAlmostEqual(2.0, self.ellipse.signed_distance([0.0, 3.0]))
        np.testing.assert_allclose([0.0, -1.0], self.ellipse.project_boundary([0.0, -3.0]))
        self.assertAlmostEqual(-0.5, self.ellipse.signed_distance([0.0, 0.5]))

    def test_interior_major_axis(self) -> None:
        """Test interior points of the major axis, whose closest points leave the axis."""
        self.assertAlmostEqual(-np.sqrt(2.0 / 3.0), self.ellipse.signed_distance([1.0, 0.0]))
        closest = self.ellipse.project_boundary([1.0, 0.0])
        self.assertAlmostEqual(4.0 / 3.0, closest[0])
        self.assertAlmostEqual(np.sqrt(5.0 / 9.0), abs(closest[1]))
        self.assertAlmostEqual(-1.0, self.ellipse.signed_distance([0.0, 0.0]))

    def test_boundary_points(self) -> None:
        """Test vertices of the ellipse and points of a circle given as an ellipsoid."""
        self.assertEqual(0.0, self.ellipse.signed_distance([2.0, 0.0]))
        np.testing.assert_array_equal([0.0, -1.0], self.ellipse.project_boundary([0.0, -1.0]))
        self.assertEqual(Classification.BOUNDARY, self.ellipse.contains([-2.0, 0.0]))
        self.assertEqual(Classification.OUTSIDE, self.ellipse.contains([0.0, 1.5], tol=1e-9))
        circle = Ellipsoid([1.0, 1.0])
        angles = np.linspace(0.0, 2 * np.pi, 1000, endpoint=False)
        points = np.column_stack([np.cos(angles), np.sin(angles)])
        self.assertLess(np.max(np.abs(circle.signed_distance(points))), 1e-9)
        np.testing.assert_allclose(points, circle.project_boundary(points), atol=1e-9)
        np.testing.assert_allclose(2.0, circle.signed_distance(3.0 * points))
        np.testing.assert_allclose(-0.5, circle.signed_distance(0.5 * points))
        sphere = Ellipsoid([2.0, 2.0, 2.0], center=[1.0, 0.0, 0.0])
        offset = 3.0 / np.sqrt(2.0)
        self.assertAlmostEqual(1.0, sphere.signed_distance([1.0, offset, offset]))

    def test_sweep_oracle(self) -> None:
        """Test projections of exterior points against the boundary sweep."""
        points = exterior_points(self.ellipse, 1000)
        started = time.perf_counter()
        projected = self.ellipse.project_boundary(points)
        self.assertLess(time.perf_counter() - started, 5.0)
        oracle = np.array([boundary_sweep_projection(self.ellipse, point) for point in points])
        self.assertLess(np.max(np.linalg.norm(projected - oracle, axis=1)), 1e-8)

    def test_three_dimensional_oracle(self) -> None:
        """Test projections onto a three-dimensional ellipsoid."""
        ellipsoid = Ellipsoid([3.0, 2.0, 1.0], center=[0.5, 0.0, -0.5])
        for point in exterior_points(ellipsoid, 5):
            np.testing.assert_allclose(
                boundary_sweep_projection(ellipsoid, point, samples=4096),
                ellipsoid.project_boundary(point),
                atol=1e-6,
            )

    def test_stalled_root_finder(self) -> None:
        """Test the fallback to the boundary sweep when the root-finder stalls."""
        point = np.array([3.0, 2.0])
        expected = self.ellipse.project_boundary(point)
        with patch.object(Ellipsoid, 'max_iterations', 0), self.assertWarns(UserWarning):
            actual = self.ellipse.project_boundary(point)
        np.testing.assert_allclose(expected, actual, atol=1e-8)

    def test_outward_normal(self) -> None:
        """Test the normal of the ellipse."""
        np.testing.assert_allclose([1.0, 0.0], self.ellipse.outward_normal([2.0, 0.0]))
        point = np.array([np.sqrt(2.0), np.sqrt(0.5)])
        expected = np.array([point[0] / 4.0, point[1]])
        np.testing.assert_allclose(
            expected / np.linalg.norm(expected),
            self.ellipse.outward_normal(point),
        )

    def test_validation(self) -> None:
        """Test invalid semi-axes and centers."""
        with self.assertRaises(ValidationError):
            Ellipsoid([1.0, -1.0])
        with self.assertRaises(DimensionMismatchError):
            Ellipsoid([1.0, 2.0], center=[0.0, 0.0, 0.0])


class PolytopeTests(TestCase):
    """Tests for the `Polytope` class."""

    def setUp(self) -> None:
        """Create the triangle with vertices (0, 1), (0, -1), (-1, 0)."""
        self.triangle = Polytope([[0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]])

    def test_orientation(self) -> None:
        """Test that vertices are stored counterclockwise with outward normals."""
        np.testing.assert_allclose([[-1.0, 0.0], [0.0, -1.0], [0.0, 1.0]], self.triangle.vertices)
        np.testing.assert_allclose([1.0, 0.0], self.triangle.face_normals[1])
        np.testing.assert_allclose(
            [-np.sqrt(0.5), -np.sqrt(0.5)],
            self.triangle.face_normals[0],
        )

    def test_signed_distance(self) -> None:
        """Test distances inside, next to faces and next to vertices."""
        self.assertAlmostEqual(-0.25, self.triangle.signed_distance([-0.25, 0.0]))
        self.assertAlmostEqual(1.0, self.triangle.signed_distance([1.0, 0.0]))
        self.assertAlmostEqual(np.sqrt(2.0), self.triangle.signed_distance([1.0, 2.0]))
        self.assertAlmostEqual(0.0, self.triangle.signed_distance([0.0, 1.0]))

    def test_project_boundary(self) -> None:
        """Test closest points on faces and vertices."""
        np.testing.assert_allclose([0.0, 0.0], self.triangle.project_boundary([1.0, 0.0]))
        np.testing.assert_allclose([0.0, 1.0], self.triangle.project_boundary([1.0, 2.0]))
        np.testing.assert_allclose([0.0, 0.5], self.triangle.project_boundary([-0.1, 0.5]))

    def test_outward_normal(self) -> None:
        """Test face normals and averaged vertex normals."""
        np.testing.assert_allclose([1.0, 0.0], self.triangle.outward_normal([0.0, 0.5]))
        vertex_normal = np.array([1.0 - np.sqrt(0.5), np.sqrt(0.5)])
        np.testing.assert_allclose(
            vertex_normal / np.linalg.norm(vertex_normal),
            self.triangle.outward_normal([0.0, 1.0]),
        )

    def test_face_clearances(self) -> None:
        """Test per-face clearances."""
        clearances = self.triangle.face_clearances([[-0.25, 0.0]])
        self.assertEqual((1, 3), clearances.shape)
        self.assertAlmostEqual(0.25, clearances[0, 1])

    def test_validation(self) -> None:
        """Test degenerate and nonconvex vertex lists."""
        with self.assertRaises(ValidationError):
            Polytope([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        with self.assertRaises(ValidationError):
            Polytope([[0.0, 0.0], [2.0, 0.0], [0.5, 0.5], [0.0, 2.0]])
        with self.assertRaises(ValidationError):
            Polytope([[0.0, 0.0], [1.0, 0.0]])
        with self.assertRaises(ValidationError):
            Polytope(
                [[0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]],
                face_normals=[[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]],
            )


class HalfSpaceTests(TestCase):
    """Tests for the `HalfSpace` class."""

    def test_half_space(self) -> None:
        """Test distances, projections and normals of a half-space."""
        half_space = HalfSpace([1.0, 0.0], 1.0)
        self.assertAlmostEqual(2.0, half_space.signed_distance([3.0, 5.0]))
        np.testing.assert_allclose([1.0, 5.0], half_space.project_boundary([3.0, 5.0]))
        np.testing.assert_allclose([1.0, 0.0], half_space.outward_normal([1.0, -2.0]))
        with self.assertRaises(PreconditionError):
            half_space.gauge([0.0, 0.0])
        with self.assertRaises(ValidationError):
            HalfSpace([1.0, 1.0], 0.0)


class PropertyTests(TestCase):
    """Convexity, projection and normal properties on random samples."""

    def bodies(self) -> list:
        """Return the bodies checked."""
        return [
            Ball(1.5, center=[0.5, -0.5]),
            Ellipsoid([2.0, 1.0]),
            Ellipsoid([1.0, 3.0], center=[1.0, 1.0]),
            Polytope([[0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]]),
        ]

    def test_convexity_of_distance(self) -> None:
        """Test `d(tp + (1 - t)q) ≤ t·d(p) + (1 - t)·d(q)` for random `t`."""
        rng = np.random.default_rng(2)
        for body in self.bodies():
            p, q = rng.uniform(-4.0, 4.0, size=(2, 10000, 2))
            t = rng.uniform(0.0, 1.0, size=(10000, 1))
            combined = body.signed_distance(t * p + (1 - t) * q)
            bound = t[:, 0] * body.signed_distance(p) + (1 - t[:, 0]) * body.signed_distance(q)
            self.assertTrue(np.all(combined <= bound + 1e-12), body.kind)

    def test_projection_optimality(self) -> None:
        """Test that no sampled boundary point is closer than the projection."""
        rng = np.random.default_rng(5)
        for body in self.bodies():
            points = rng.uniform(-4.0, 4.0, size=(300, 2))
            directions = rng.normal(size=(2000, 2))
            boundary = body.center + directions / body.gauge(body.center + directions)[:, None]
            distances = np.linalg.norm(points - body.project_boundary(points), axis=1)
            sampled = np.linalg.norm(points[:, None, :] - boundary[None, :, :], axis=2)
            self.assertTrue(np.all(distances <= sampled.min(axis=1) + 1e-8), body.kind)

    def test_projection_consistency(self) -> None:
        """Test that projections lie on the boundary at distance `|d|`."""
        rng = np.random.default_rng(3)
        for body in self.bodies():
            points = rng.uniform(-4.0, 4.0, size=(10000, 2))
            projected = body.project_boundary(points)
            np.testing.assert_allclose(0.0, body.signed_distance(projected), atol=1e-9)
            np.testing.assert_allclose(
                np.abs(body.signed_distance(points)),
                np.linalg.norm(points - projected, axis=1),
                atol=1e-9,
            )

    def test_normal_alignment(self) -> None:
        """Test that exterior offsets point along the outward normal at the projection."""
        for body in self.bodies():
            points = exterior_points(body, 10000, seed=4)
            self.assertGreater(np.min(body.signed_distance(points)), 0.0, body.kind)
            projected = body.project_boundary(points)
            offsets = points - projected
            offsets /= np.linalg.norm(offsets, axis=1)[:, None]
            smooth = body.contains(projected, tol=1e-9)
            self.assertTrue(all(c == Classification.BOUNDARY for c in smooth))
            normals = body.outward_normal(projected)
            if isinstance(body, Polytope):
                # Vertex normals are averages: keep projections onto a single face.
                keep = np.sum(np.abs(body.face_clearances(projected)) <= 1e-9, axis=1) == 1
                offsets, normals = offsets[keep], normals[keep]
            self.assertGreater(np.min(np.einsum('ij,ij->i', offsets, normals)), 1 - 1e-6)


class EuclideanMotionTests(TestCase):
    """Tests for the `EuclideanMotion` class."""

    def test_from_face(self) -> None:
        """Test that a side is moved onto `{u₁ = 0}` with the body in `{u₁ < 0}`."""
        triangle = Polytope([[0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]])
        for index in range(3):
            motion = EuclideanMotion.from_face(triangle, index)
            ends = motion.apply(triangle.vertices[[index, (index + 1) % 3]])
            np.testing.assert_allclose([0.0, 0.0], ends[:, 0], atol=1e-12)
            self.assertLess(motion.apply(triangle.center)[0], 0.0)
            point = np.array([0.3, -0.7])
            np.testing.assert_allclose(point, motion.inverse(motion.apply(point)))

    def test_validation(self) -> None:
        """Test that non-orthogonal matrices are rejected."""
        with self.assertRaises(ValidationError):
            EuclideanMotion([[1.0, 1.0], [0.0, 1.0]], [0.0, 0.0])
        with self.assertRaises(DimensionMismatchError):
            EuclideanMotion(np.eye(3), [0.0, 0.0])


class RegistryTests(TestCase):
    """Tests for the body registry."""

    def test_registry(self) -> None:
        """Test that bodies are registered by snake case names."""
        self.assertEqual(Ball, ConvexBody.registry['ball'])
        self.assertEqual(HalfSpace, ConvexBody.registry['half_space'])
        self.assertEqual('polytope', Polytope([[0, 0], [1, 0], [0, 1]]).kind)
