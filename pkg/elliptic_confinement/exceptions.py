"""Exceptions raised by the library."""

from typing import Optional


class ConfinementError(Exception):
    """Base class of all library errors."""


class ValidationError(ConfinementError, ValueError):
    """Invalid construction parameters of a body, a field or a task."""


class DimensionMismatchError(ValidationError):
    """Points, fields and bodies of different state-space dimensions were combined."""

    def __init__(self, expected: int, actual: int, what: str = 'point') -> None:
        super().__init__(f'Expected a {what} of dimension {expected}, got dimension {actual}')
        self.expected = expected
        self.actual = actual


class PreconditionError(ConfinementError, ValueError):
    """An operation was called outside of its domain."""


class EmptyRegionError(PreconditionError):
    """A sampling region contains no admissible points."""


class SingularJacobianError(ConfinementError, ArithmeticError):
    """The Newton matrix could not be factorised."""

    def __init__(self, iteration: int) -> None:
        super().__init__(f'Singular Jacobian at Newton iteration {iteration}')
        self.iteration = iteration


class ScenarioError(ValidationError):
    """A scenario file or a command-line description could not be understood."""

    def __init__(
        self,
        message: str,
        key: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        location = []
        if key is not None:
            location.append(f'key `{key}`')
        if line is not None:
            location.append(f'line {line}' + (f', column {column}' if column is not None else ''))
        super().__init__(f'{message} ({"; ".join(location)})' if location else message)
        self.message = message
        self.key = key
        self.line = line
        self.column = column
