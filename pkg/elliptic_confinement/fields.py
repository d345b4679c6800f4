"""Right-hand sides `F` of the systems `Δu = F(u)`.

Fields evaluate on arrays whose last axis is the state-space dimension,
so the same object serves single points, sample clouds and solution grids.
"""

from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from stringcase import snakecase

from .exceptions import DimensionMismatchError, ValidationError
from .geometry import ArrayLike, ConvexBody, Ellipsoid, EuclideanMotion, Polytope


def _as_state(u: ArrayLike, dimension: int) -> np.ndarray:
    state = np.asarray(u, dtype=float)
    if state.ndim == 0 or state.shape[-1] != dimension:
        raise DimensionMismatchError(dimension, state.shape[-1] if state.ndim else 1)
    return state


class VectorField(ABC):
    """Right-hand side `F: ℝᵐ → ℝᵐ`."""

    registry: ClassVar[Dict[str, type]] = {}

    def __init__(self, dimension: int) -> None:
        self.dimension = dimension

    def __init_subclass__(cls, **kwargs) -> None:
        """Register concrete fields under the snake case name of the class."""
        super().__init_subclass__(**kwargs)
        VectorField.registry[snakecase(cls.__name__)] = cls

    @property
    def kind(self) -> str:
        """Return the registry name of the field."""
        return snakecase(type(self).__name__)

    @abstractmethod
    def _eval(self, u: np.ndarray) -> np.ndarray:
        """Evaluate on an array whose last axis has the field dimension."""

    @abstractmethod
    def parameters(self) -> Dict[str, Any]:
        """Return the constructor arguments of the field."""

    def eval(self, u: ArrayLike) -> np.ndarray:
        """Return `F(u)`."""
        return self._eval(_as_state(u, self.dimension))

    __call__ = eval

    def jacobian(self, u: ArrayLike) -> np.ndarray:
        """Return the Jacobian `∂F/∂u` with shape `(..., m, m)`."""
        return finite_difference_jacobian(self, u)

    def invariant_body(self) -> Optional[ConvexBody]:
        """Return the convex body the field is known to confine solutions to."""
        return None

    def replace(self, **changes: Any) -> 'VectorField':
        """Return a copy of the field with some parameters changed."""
        unknown = set(changes) - set(self.parameters())
        if unknown:
            raise ValidationError(f'Unknown parameters of `{self.kind}`: {sorted(unknown)}')
        return type(self)(**{**self.parameters(), **changes})

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible description of the field."""
        description: Dict[str, Any] = {'kind': self.kind}
        for name, value in self.parameters().items():
            if isinstance(value, VectorField):
                description[name] = value.to_dict()
            elif isinstance(value, np.ndarray):
                description[name] = value.tolist()
            else:
                description[name] = value
        return description


def finite_difference_jacobian(field: VectorField, u: ArrayLike, h: float = 1e-5) -> np.ndarray:
    """Return the central finite difference Jacobian of a field."""
    state = _as_state(u, field.dimension)
    columns = []
    for j in range(field.dimension):
        step = np.zeros(field.dimension)
        step[j] = h
        columns.append((field.eval(state + step) - field.eval(state - step)) / (2 * h))
    return np.stack(columns, axis=-1)


class GinzburgLandau(VectorField):
    """Ginzburg-Landau field in the variable `v = Au`: `F(v) = (|A⁻¹v|² - 1)A⁻¹v`.

    With `A = diag(a)` the system `AΔu = (|u|² - 1)u` becomes `Δv = F(v)`.
    A one-dimensional state space gives the scalar kink field `(u² - 1)u`.
    """

    def __init__(self, A: ArrayLike = (1.0, 1.0)) -> None:  # noqa: N803
        diagonal = np.asarray(A, dtype=float)
        if diagonal.ndim == 2:
            if not np.allclose(diagonal, np.diag(np.diag(diagonal))):
                raise ValidationError('The Ginzburg-Landau matrix A must be diagonal')
            diagonal = np.diag(diagonal)
        diagonal = diagonal.ravel()
        if diagonal.size == 0 or not np.all(diagonal > 0):
            raise ValidationError('The diagonal of A must have positive entries')
        super().__init__(diagonal.size)
        self.diagonal = diagonal

    def _eval(self, u: np.ndarray) -> np.ndarray:
        w = u / self.diagonal
        return (np.sum(w ** 2, axis=-1) - 1.0)[..., None] * w

    def jacobian(self, u: ArrayLike) -> np.ndarray:
        """Return `2 w (w/a)ᵀ + (|w|² - 1) A⁻¹` with `w = A⁻¹v`."""
        w = _as_state(u, self.dimension) / self.diagonal
        s = np.sum(w ** 2, axis=-1) - 1.0
        return 2.0 * w[..., :, None] * (w / self.diagonal)[..., None, :] + s[
            ..., None, None
        ] * np.diag(1.0 / self.diagonal)

    def to_physical(self, v: ArrayLike) -> np.ndarray:
        """Return `u = A⁻¹v`."""
        return np.asarray(v, dtype=float) / self.diagonal

    def from_physical(self, u: ArrayLike) -> np.ndarray:
        """Return `v = Au`."""
        return np.asarray(u, dtype=float) * self.diagonal

    def invariant_body(self) -> Ellipsoid:
        """Return the ellipsoid `{|A⁻¹v| < 1}`."""
        return Ellipsoid(self.diagonal)

    def parameters(self) -> Dict[str, Any]:
        """Return the diagonal of `A`."""
        return {'A': self.diagonal.tolist()}


def triple_well_potential(u: ArrayLike, a: ArrayLike, b: ArrayLike, c: ArrayLike) -> np.ndarray:
    """Return `W(u) = |u - a|²|u - b|²|u - c|²`."""
    u = np.asarray(u, dtype=float)
    return (
        np.sum((u - np.asarray(a)) ** 2, axis=-1)
        * np.sum((u - np.asarray(b)) ** 2, axis=-1)
        * np.sum((u - np.asarray(c)) ** 2, axis=-1)
    )


def allen_cahn_gradient(u: ArrayLike, a: ArrayLike, b: ArrayLike, c: ArrayLike) -> np.ndarray:
    """Return `∇W(u)` of the triple-well potential in closed form."""
    u = np.asarray(u, dtype=float)
    da, db, dc = u - np.asarray(a), u - np.asarray(b), u - np.asarray(c)
    na, nb, nc = (np.sum(d ** 2, axis=-1)[..., None] for d in (da, db, dc))
    return 2.0 * (da * nb * nc + db * na * nc + dc * na * nb)


class AllenCahn3(VectorField):
    """Gradient of the triple-well potential with minima at `a`, `b`, `c`."""

    def __init__(self, a: ArrayLike, b: ArrayLike, c: ArrayLike) -> None:
        super().__init__(2)
        self.a, self.b, self.c = (np.asarray(p, dtype=float).ravel() for p in (a, b, c))
        for point in (self.a, self.b, self.c):
            if point.size != 2:
                raise DimensionMismatchError(2, point.size, 'well')
        ab, ac = self.b - self.a, self.c - self.a
        scale = max(np.linalg.norm(ab), np.linalg.norm(ac), 1.0)
        if abs(ab[0] * ac[1] - ab[1] * ac[0]) <= 1e-12 * scale ** 2:
            raise ValidationError('The wells a, b, c must not lie on the same line')

    def potential(self, u: ArrayLike) -> np.ndarray:
        """Return `W(u)`."""
        return triple_well_potential(_as_state(u, 2), self.a, self.b, self.c)

    def _eval(self, u: np.ndarray) -> np.ndarray:
        return allen_cahn_gradient(u, self.a, self.b, self.c)

    def jacobian(self, u: ArrayLike) -> np.ndarray:
        """Return the Hessian of `W`."""
        u = _as_state(u, 2)
        da, db, dc = u - self.a, u - self.b, u - self.c
        na, nb, nc = (np.sum(d ** 2, axis=-1)[..., None] for d in (da, db, dc))
        identity = (nb * nc + na * nc + na * nb)[..., None] * np.eye(2)
        return 2.0 * identity + 4.0 * (
            da[..., :, None] * (db * nc + dc * nb)[..., None, :]
            + db[..., :, None] * (da * nc + dc * na)[..., None, :]
            + dc[..., :, None] * (da * nb + db * na)[..., None, :]
        )

    def invariant_body(self) -> Polytope:
        """Return the closed triangle with vertices `a`, `b`, `c`."""
        return Polytope(np.stack([self.a, self.b, self.c]))

    def parameters(self) -> Dict[str, Any]:
        """Return the three wells."""
        return {'a': self.a.tolist(), 'b': self.b.tolist(), 'c': self.c.tolist()}


class GPParameters(NamedTuple):
    """End states of a Gross-Pitaevskii domain wall."""

    a: float
    b: float
    segregation: bool


def gp_parameters(g11: float, g22: float, g12: float, mu: float) -> GPParameters:
    """Return the end states `a = √μ/g₁₁^¼`, `b = √μ/g₂₂^¼` and the segregation flag."""
    for name, value in (('g11', g11), ('g22', g22), ('g12', g12), ('mu', mu)):
        if not value > 0:
            raise ValidationError(f'`{name}` must be positive, got {value}')
    return GPParameters(
        a=float(np.sqrt(mu) / g11 ** 0.25),
        b=float(np.sqrt(mu) / g22 ** 0.25),
        segregation=bool(g12 > np.sqrt(g11 * g22)),
    )


class GrossPitaevskii(VectorField):
    """Coupled Gross-Pitaevskii field of two condensate components."""

    def __init__(self, g11: float, g22: float, g12: float, mu: float) -> None:
        super().__init__(2)
        self.g11, self.g22, self.g12, self.mu = float(g11), float(g22), float(g12), float(mu)
        self.a, self.b, self.segregation = gp_parameters(g11, g22, g12, mu)

    def _eval(self, u: np.ndarray) -> np.ndarray:
        u1, u2 = u[..., 0], u[..., 1]
        return np.stack([
            self.g11 * (u1 ** 2 - self.a ** 2) * u1 + self.g12 * u1 * u2 ** 2,
            self.g22 * (u2 ** 2 - self.b ** 2) * u2 + self.g12 * u1 ** 2 * u2,
        ], axis=-1)

    def jacobian(self, u: ArrayLike) -> np.ndarray:
        """Return the exact Jacobian."""
        u = _as_state(u, 2)
        u1, u2 = u[..., 0], u[..., 1]
        coupling = 2.0 * self.g12 * u1 * u2
        return np.stack([
            np.stack([self.g11 * (3 * u1 ** 2 - self.a ** 2) + self.g12 * u2 ** 2, coupling], -1),
            np.stack([coupling, self.g22 * (3 * u2 ** 2 - self.b ** 2) + self.g12 * u1 ** 2], -1),
        ], axis=-2)

    def invariant_body(self) -> Ellipsoid:
        """Return the ellipse `u₁²/a² + u₂²/b² < 1`."""
        return Ellipsoid([self.a, self.b])

    def parameters(self) -> Dict[str, Any]:
        """Return the couplings and the chemical potential."""
        return {'g11': self.g11, 'g22': self.g22, 'g12': self.g12, 'mu': self.mu}


def gp_quadrant_lower_bound(field: GrossPitaevskii, u: ArrayLike) -> np.ndarray:
    """Return `(g₁₂ - √(g₁₁g₂₂))u₁u₂²`.

    For `u` outside the ellipse with `u₁ > 0` the first component of the
    field strictly exceeds this value.
    """
    u = _as_state(u, 2)
    return (field.g12 - np.sqrt(field.g11 * field.g22)) * u[..., 0] * u[..., 1] ** 2


class SymmetricPair(VectorField):
    """Field `(k(u₁ - u₂) + u₁³, k(u₂ - u₁) + u₂³)` with solutions collapsing onto `u₁ = u₂`.

    It satisfies `(u₁ - u₂)(F₁ - F₂) = (u₁ - u₂)²(2k + u₁² + u₁u₂ + u₂²)`.
    """

    def __init__(self, coupling: float = 1.0) -> None:
        super().__init__(2)
        self.coupling = float(coupling)

    def _eval(self, u: np.ndarray) -> np.ndarray:
        u1, u2 = u[..., 0], u[..., 1]
        k = self.coupling
        return np.stack([k * (u1 - u2) + u1 ** 3, k * (u2 - u1) + u2 ** 3], axis=-1)

    def jacobian(self, u: ArrayLike) -> np.ndarray:
        """Return the exact Jacobian."""
        u = _as_state(u, 2)
        k = self.coupling
        off_diagonal = np.full(u.shape[:-1], -k)
        return np.stack([
            np.stack([k + 3 * u[..., 0] ** 2, off_diagonal], -1),
            np.stack([off_diagonal, k + 3 * u[..., 1] ** 2], -1),
        ], axis=-2)

    def parameters(self) -> Dict[str, Any]:
        """Return the linear coupling."""
        return {'coupling': self.coupling}


Term = Tuple[float, Sequence[int]]


class Polynomial(VectorField):
    """Field with one multivariate polynomial per component.

    `components[i]` lists the terms `(coefficient, exponents)` of `Fᵢ`.
    """

    def __init__(self, components: Sequence[Sequence[Term]]) -> None:
        if len(components) == 0:
            raise ValidationError('A polynomial field needs at least one component')
        super().__init__(len(components))
        coefficients: List[float] = []
        exponents: List[Sequence[int]] = []
        owners: List[int] = []
        for index, terms in enumerate(components):
            for coefficient, powers in terms:
                if len(powers) != self.dimension:
                    raise DimensionMismatchError(self.dimension, len(powers), 'exponent vector')
                if any(int(p) != p or p < 0 for p in powers):
                    raise ValidationError('Exponents must be non-negative integers')
                if not np.isfinite(coefficient):
                    raise ValidationError('Polynomial coefficients must be finite')
                coefficients.append(float(coefficient))
                exponents.append([int(p) for p in powers])
                owners.append(index)
        self.components = [
            [(float(c), [int(p) for p in e]) for c, e in terms] for terms in components
        ]
        self.exponents = np.array(exponents, dtype=int).reshape(-1, self.dimension)
        self.coefficients = np.zeros((len(coefficients), self.dimension))
        self.coefficients[np.arange(len(coefficients)), owners] = coefficients

    @classmethod
    def constant(cls, vector: ArrayLike) -> 'Polynomial':
        """Return the constant field `F ≡ vector`."""
        vector = np.asarray(vector, dtype=float).ravel()
        zero = [0] * vector.size
        return cls([[(value, zero)] for value in vector])

    @classmethod
    def linear(cls, matrix: ArrayLike) -> 'Polynomial':
        """Return the linear field `F(u) = Mu`."""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        m = matrix.shape[0]
        return cls([
            [(matrix[i, j], [int(k == j) for k in range(m)]) for j in range(m) if matrix[i, j]]
            for i in range(m)
        ])

    def _monomials(self, u: np.ndarray, exponents: np.ndarray) -> np.ndarray:
        return np.prod(u[..., None, :] ** exponents, axis=-1)

    def _eval(self, u: np.ndarray) -> np.ndarray:
        return self._monomials(u, self.exponents) @ self.coefficients

    def jacobian(self, u: ArrayLike) -> np.ndarray:
        """Return the exact Jacobian by differentiating every monomial."""
        u = _as_state(u, self.dimension)
        columns = []
        for j in range(self.dimension):
            lowered = self.exponents.copy()
            lowered[:, j] = np.maximum(lowered[:, j] - 1, 0)
            derivative = self._monomials(u, lowered) * self.exponents[:, j]
            columns.append(derivative @ self.coefficients)
        return np.stack(columns, axis=-1)

    def parameters(self) -> Dict[str, Any]:
        """Return the per-component terms."""
        return {'components': self.components}


class ScaledField(VectorField):
    """Field `factor · base`; `factor = -1` gives the negative controls."""

    def __init__(self, base: VectorField, factor: float = -1.0) -> None:
        super().__init__(base.dimension)
        self.base = base
        self.factor = float(factor)

    def _eval(self, u: np.ndarray) -> np.ndarray:
        return self.factor * self.base.eval(u)

    def jacobian(self, u: ArrayLike) -> np.ndarray:
        """Return the scaled Jacobian of the base field."""
        return self.factor * self.base.jacobian(u)

    def invariant_body(self) -> Optional[ConvexBody]:
        """Return the body of the base field."""
        return self.base.invariant_body()

    def parameters(self) -> Dict[str, Any]:
        """Return the base field and the factor."""
        return {'base': self.base, 'factor': self.factor}


class TransformedField(VectorField):
    """Field seen in the frame `ũ = Q(u - p)`: `F̃(ũ) = QF(Qᵀũ + p)`.

    If `u` solves `Δu = F(u)` then `ũ` solves `Δũ = F̃(ũ)`.
    """

    def __init__(self, base: VectorField, motion: EuclideanMotion) -> None:
        if motion.shift.size != base.dimension:
            raise DimensionMismatchError(base.dimension, motion.shift.size, 'motion')
        super().__init__(base.dimension)
        self.base = base
        self.motion = motion

    def _eval(self, u: np.ndarray) -> np.ndarray:
        return self.base.eval(self.motion.inverse(u)) @ self.motion.rotation.T

    def jacobian(self, u: ArrayLike) -> np.ndarray:
        """Return `QJ(Qᵀũ + p)Qᵀ`."""
        q = self.motion.rotation
        inner = self.base.jacobian(self.motion.inverse(_as_state(u, self.dimension)))
        return np.einsum('ij,...jk,lk->...il', q, inner, q)

    def parameters(self) -> Dict[str, Any]:
        """Return the base field and the motion."""
        return {'base': self.base, 'motion': self.motion}

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-compatible description of the field."""
        return {
            'kind': self.kind,
            'base': self.base.to_dict(),
            'rotation': self.motion.rotation.tolist(),
            'shift': self.motion.shift.tolist(),
        }
