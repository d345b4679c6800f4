"""`proxies` module tests."""

from unittest import TestCase

import numpy as np
from elliptic_confinement.fields import GinzburgLandau, VectorField
from elliptic_confinement.proxies import CountingField


class CountingFieldTests(TestCase):
    """Tests for the `CountingField` class."""

    def setUp(self) -> None:
        """Wrap the Ginzburg-Landau field."""
        self.field = CountingField(GinzburgLandau())

    def test_forwarding(self) -> None:
        """Test that the proxy behaves like the wrapped field."""
        self.assertIsInstance(self.field, VectorField)
        self.assertEqual('ginzburg_landau', self.field.kind)
        self.assertEqual(2, self.field.dimension)
        np.testing.assert_allclose([6.0, 0.0], self.field([2.0, 0.0]))

    def test_counting(self) -> None:
        """Test that single points, clouds and grids are counted by points."""
        self.field.eval([1.0, 0.0])
        self.field(np.zeros((5, 2)))
        self.field.jacobian(np.zeros((3, 4, 2)))
        self.assertEqual(1 + 5 + 12, self.field.evaluations)
        self.assertEqual(3, self.field.calls)

    def test_reset(self) -> None:
        """Test that `reset` zeroes the counters."""
        self.field(np.zeros((5, 2)))
        self.field.reset()
        self.assertEqual(0, self.field.evaluations)
        self.assertEqual(0, self.field.calls)
