"""`monitors` module tests."""

from unittest import TestCase

import numpy as np
from elliptic_confinement.exceptions import (
    DimensionMismatchError,
    PreconditionError,
    ValidationError,
)
from elliptic_confinement.geometry import Ball, Polytope
from elliptic_confinement.monitors import (
    MonitorKind,
    MonitorReport,
    Strictness,
    component_bound_report,
    confinement_constant,
    confinement_report,
    core_mask,
    monitor_columns,
    oscillation,
    p_function_report,
    p_function_threshold,
    p_function_values,
    strictness_report,
    symmetry_report,
)
from elliptic_confinement.solver import SolutionGrid


def line_solution(values: np.ndarray, half_width: float = 1.0) -> SolutionGrid:
    """Wrap node values on `[-half_width, half_width]`."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    return SolutionGrid(((-half_width, half_width),), values, 0.0, 1, True)


def square_solution(core: np.ndarray, outer: np.ndarray = (0.0, 0.0)) -> SolutionGrid:
    """Return a 5 × 5 grid on `[-1, 1]²` whose 3 × 3 core holds the given states."""
    values = np.tile(np.asarray(outer, dtype=float), (5, 5, 1))
    values[1:4, 1:4] = np.asarray(core, dtype=float).reshape(3, 3, 2)
    return SolutionGrid(((-1.0, 1.0), (-1.0, 1.0)), values, 0.0, 1, True)


class ConfinementTests(TestCase):
    """Tests for the confinement monitor."""

    def test_confined(self) -> None:
        """Test a curve inside the unit disc."""
        angles = np.linspace(0.0, np.pi, 11)
        solution = line_solution(0.5 * np.column_stack([np.cos(angles), np.sin(angles)]))
        report = confinement_report(solution, Ball(1.0))
        self.assertEqual(MonitorKind.CONFINEMENT, report.kind)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(-0.5, report.extremum)
        self.assertEqual('ball', report.details['body']['kind'])
        self.assertEqual(0.0, confinement_constant(solution, Ball(1.0)))

    def test_report_without_details(self) -> None:
        """Test that reports built without details do not share a dictionary."""
        first = MonitorReport(MonitorKind.SYMMETRY, 0.0, [0], {}, 1e-8, True)
        second = MonitorReport(MonitorKind.SYMMETRY, 1.0, [1], {}, 1e-8, False)
        self.assertIsNone(first.details)
        self.assertEqual({}, first.to_dict()['details'])
        first.to_dict()['details']['note'] = 'changed'
        self.assertEqual({}, second.to_dict()['details'])

    def test_escaping(self) -> None:
        """Test that a node outside the body fails with its index as witness."""
        values = np.zeros((11, 2))
        values[3] = [1.1, 0.0]
        solution = line_solution(values)
        report = confinement_report(solution, Ball(1.0))
        self.assertFalse(report.passed)
        self.assertEqual([3], report.witness)
        self.assertAlmostEqual(0.1, report.extremum)
        self.assertTrue(confinement_report(solution, Ball(1.0), tol=0.2).passed)
        self.assertAlmostEqual(0.1 / 0.2 ** 2, confinement_constant(solution, Ball(1.0)))
        self.assertEqual(
            {'kind', 'extremum', 'witness', 'statistics', 'tolerance', 'pass', 'details'},
            set(report.to_dict()),
        )

    def test_dimension(self) -> None:
        """Test that the solution and the body must share the state dimension."""
        with self.assertRaises(DimensionMismatchError):
            confinement_report(line_solution(np.zeros(5)), Ball(1.0))


class OscillationTests(TestCase):
    """Tests for `oscillation` and `core_mask`."""

    def test_oscillation(self) -> None:
        """Test diameters of planar, scalar and degenerate sets."""
        square = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]]
        self.assertAlmostEqual(np.sqrt(2.0), oscillation(square))
        self.assertAlmostEqual(3.0, oscillation([[0.0], [3.0], [1.0]]))
        self.assertEqual(0.0, oscillation([[1.0, 2.0], [1.0, 2.0]]))
        collinear = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [-1.0, -1.0]]
        self.assertAlmostEqual(3.0 * np.sqrt(2.0), oscillation(collinear))

    def test_core_mask(self) -> None:
        """Test that the core holds the nodes within half of the half-widths."""
        mask = core_mask(square_solution(np.zeros((9, 2))))
        self.assertEqual(9, int(np.count_nonzero(mask)))
        self.assertTrue(mask[2, 2])
        self.assertFalse(mask[0, 2])


class StrictnessTests(TestCase):
    """Tests for the strictness monitor."""

    def test_strictly_interior(self) -> None:
        """Test a solution away from the boundary."""
        report = strictness_report(square_solution(np.full((9, 2), 0.2)), Ball(1.0), band=1e-6)
        self.assertEqual(Strictness.STRICTLY_INTERIOR.value, report.details['classification'])
        self.assertTrue(report.passed)
        self.assertEqual(9, report.details['core_nodes'])
        self.assertAlmostEqual(1.0 - 0.2 * np.sqrt(2.0), report.extremum)

    def test_constant_on_boundary(self) -> None:
        """Test that a constant boundary state is locked and passes."""
        solution = square_solution(np.tile([1.0, 0.0], (9, 1)), outer=[1.0, 0.0])
        report = strictness_report(solution, Ball(1.0), band=1e-6)
        self.assertEqual(Strictness.BOUNDARY_LOCKED.value, report.details['classification'])
        self.assertTrue(report.passed)
        self.assertEqual(0.0, report.details['oscillation'])

    def test_moving_on_strictly_convex_boundary(self) -> None:
        """Test that a nonconstant solution locked to a circle fails."""
        angles = np.linspace(0.0, 1.0, 9)
        core = np.column_stack([np.cos(angles), np.sin(angles)])
        report = strictness_report(square_solution(core), Ball(1.0), band=1e-6)
        self.assertEqual(Strictness.BOUNDARY_LOCKED.value, report.details['classification'])
        self.assertFalse(report.passed)

    def test_locked_to_face(self) -> None:
        """Test that a solution moving along one face of a polygon passes."""
        triangle = Polytope([[0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]])
        core = np.column_stack([np.zeros(9), np.linspace(-0.5, 0.5, 9)])
        report = strictness_report(square_solution(core), triangle, band=1e-6)
        self.assertEqual(Strictness.BOUNDARY_LOCKED.value, report.details['classification'])
        self.assertEqual([1], report.details['locked_faces'])
        self.assertTrue(report.passed)

    def test_mixed(self) -> None:
        """Test that touching without locking fails."""
        core = np.zeros((9, 2))
        core[4] = [1.0, 0.0]
        report = strictness_report(square_solution(core), Ball(1.0), band=1e-6)
        self.assertEqual(Strictness.MIXED.value, report.details['classification'])
        self.assertEqual(1, report.details['touching_nodes'])
        self.assertEqual([2, 2], report.witness)
        self.assertFalse(report.passed)

    def test_default_band(self) -> None:
        """Test the default band `10h²` and negative bands."""
        solution = square_solution(np.zeros((9, 2)))
        self.assertEqual(2.5, strictness_report(solution, Ball(1.0)).tolerance)
        with self.assertRaises(ValidationError):
            strictness_report(solution, Ball(1.0), band=-1.0)


class PFunctionTests(TestCase):
    """Tests for the P-function monitor on the scalar kink."""

    def setUp(self) -> None:
        """Sample `tanh(x/√2)` on `[-10, 10]`."""
        x = np.linspace(-10.0, 10.0, 2001)
        self.solution = line_solution(np.tanh(x / np.sqrt(2)), 10.0)

    def test_values(self) -> None:
        """Test `P(0) = ¼ - C` for the kink with `R = 1`."""
        values = p_function_values(self.solution, 0.1, 1.0)
        self.assertAlmostEqual(0.15, values[1000], delta=1e-4)

    def test_report(self) -> None:
        """Test failing and passing constants."""
        self.assertFalse(p_function_report(self.solution, 0.1, 1.0).passed)
        report = p_function_report(self.solution, 0.4, 1.0)
        self.assertTrue(report.passed)
        self.assertEqual(MonitorKind.P_FUNCTION, report.kind)
        self.assertEqual({'C': 0.4, 'R': 1.0}, report.details)
        with self.assertRaises(PreconditionError):
            p_function_report(self.solution, 0.0, 1.0)

    def test_threshold(self) -> None:
        """Test the smallest passing constant of a sweep."""
        self.assertEqual(0.3, p_function_threshold(self.solution, 1.0, [0.1, 0.2, 0.3, 0.4]))
        self.assertIsNone(p_function_threshold(self.solution, 1.0, [0.05, 0.1]))


class ComponentAndSymmetryTests(TestCase):
    """Tests for the component bound and symmetry monitors."""

    def test_component_bound(self) -> None:
        """Test `u·e ≤ L` with `e = (1, 0)` and `L = 1`."""
        values = np.column_stack([np.linspace(0.0, 1.0, 11), np.linspace(1.0, 0.0, 11)])
        report = component_bound_report(line_solution(values), [1.0, 0.0], 1.0)
        self.assertTrue(report.passed)
        self.assertEqual([10], report.witness)
        self.assertAlmostEqual(0.0, report.extremum)
        self.assertFalse(component_bound_report(line_solution(values), [1.0, 0.0], 0.5).passed)

    def test_symmetry(self) -> None:
        """Test `|u₁ - u₂|` on symmetric and asymmetric states."""
        values = np.column_stack([np.linspace(-1.0, 1.0, 11)] * 2)
        self.assertTrue(symmetry_report(line_solution(values)).passed)
        values[5, 1] = 0.5
        report = symmetry_report(line_solution(values))
        self.assertFalse(report.passed)
        self.assertAlmostEqual(0.5, report.extremum)
        with self.assertRaises(DimensionMismatchError):
            symmetry_report(line_solution(np.zeros(5)))

    def test_columns(self) -> None:
        """Test the per-node columns."""
        solution = line_solution(np.zeros((11, 2)))
        columns = monitor_columns(solution, Ball(1.0), 0.5, 1.0, [1.0, 0.0], 1.0)
        self.assertEqual(
            {'signed_distance', 'p_function', 'component_excess', 'asymmetry'}, set(columns),
        )
        np.testing.assert_allclose(np.full(11, -1.0), columns['signed_distance'])
        self.assertEqual({'asymmetry'}, set(monitor_columns(solution)))
