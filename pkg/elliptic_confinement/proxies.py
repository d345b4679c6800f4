"""Proxies around vector fields."""

from typing import Any

import numpy as np
from wrapt import ObjectProxy

from .fields import VectorField


class CountingField(ObjectProxy):
    """Proxy for a VectorField object.

    Certificates report how many field evaluations they spent.
    The proxy forwards everything to the wrapped field and counts
    the points passed to `eval` and `jacobian`.
    """

    __slots__ = ('evaluations', 'calls')

    def __init__(self, wrapped: VectorField) -> None:
        super().__init__(wrapped)
        self.evaluations = 0
        self.calls = 0

    def _count(self, u: Any) -> None:
        shape = np.shape(u)
        self.evaluations += int(np.prod(shape[:-1])) if len(shape) > 1 else 1
        self.calls += 1

    def eval(self, u: Any) -> np.ndarray:  # noqa: A003
        """Evaluate the wrapped field and count the points."""
        self._count(u)
        return self.__wrapped__.eval(u)

    def __call__(self, u: Any) -> np.ndarray:
        """Evaluate the wrapped field and count the points."""
        return self.eval(u)

    def jacobian(self, u: Any) -> np.ndarray:
        """Return the wrapped Jacobian and count the points."""
        self._count(u)
        return self.__wrapped__.jacobian(u)

    def reset(self) -> None:
        """Zero the counters."""
        self.evaluations = 0
        self.calls = 0
