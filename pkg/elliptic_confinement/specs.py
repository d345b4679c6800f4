"""Construction of bodies, fields and boundary data from descriptions.

Descriptions are dictionaries, as read from scenario files, or flag
strings such as `"ellipse 2 1"`, `"triangle 0,1 0,-1 -1,0"` or
`"gross_pitaevskii g11=1 g22=1 g12=2 mu=1"`: a kind followed by
positional values and `key=value` pairs. Vectors are written with commas
and matrices with semicolons between rows.
"""

from typing import Any, Dict, List, Optional, Union

import numpy as np
from stringcase import snakecase

from .exceptions import ScenarioError
from .fields import AllenCahn3, Polynomial, ScaledField, TransformedField, VectorField
from .geometry import Ball, ConvexBody, Ellipsoid, EuclideanMotion, HalfSpace, Polytope
from .solver import (
    Profile,
    constant_profile,
    diagonal_profile,
    radial_profile,
    three_phase_profile,
)

Spec = Union[str, Dict[str, Any]]

FIELD_ALIASES = {
    'gl': 'ginzburg_landau',
    'kink': 'ginzburg_landau',
    'allen_cahn': 'allen_cahn3',
    'gp': 'gross_pitaevskii',
    'pair': 'symmetric_pair',
    'scaled': 'scaled_field',
    'transformed': 'transformed_field',
}
BODY_ALIASES = {
    'ellipse': 'ellipsoid',
    'triangle': 'polytope',
    'polygon': 'polytope',
    'halfspace': 'half_space',
}
POSITIONAL = {
    'ball': 'radius',
    'ellipsoid': 'semi_axes',
    'polytope': 'vertices',
    'ginzburg_landau': 'A',
    'symmetric_pair': 'coupling',
    'constant': 'value',
    'radial': 'scale',
    'diagonal': 'amplitude',
}


def parse_value(text: str) -> Any:
    """Parse a number, a comma separated vector or a semicolon separated matrix."""
    try:
        if ';' in text:
            return [parse_value(row) for row in text.split(';')]
        if ',' in text:
            return [float(item) for item in text.split(',') if item.strip()]
        return float(text)
    except ValueError as error:
        raise ScenarioError(f'Cannot read a number from `{text}`') from error


def parse_point(text: Union[str, List[float]]) -> np.ndarray:
    """Parse a point written as `"3 0"` or `"3,0"`."""
    if not isinstance(text, str):
        return np.asarray(text, dtype=float)
    try:
        return np.array([float(item) for item in text.replace(',', ' ').split()])
    except ValueError as error:
        raise ScenarioError(f'Cannot read a point from `{text}`') from error


def parse_spec(text: str) -> Dict[str, Any]:
    """Turn a flag string into a description dictionary."""
    tokens = text.split()
    if not tokens:
        raise ScenarioError('Empty description')
    kind = snakecase(tokens[0].replace('-', '_'))
    spec: Dict[str, Any] = {'kind': kind}
    positional = []
    for token in tokens[1:]:
        if '=' in token:
            key, value = token.split('=', 1)
            spec[key] = parse_value(value)
        else:
            positional.append(parse_value(token))
    if positional:
        canonical = BODY_ALIASES.get(kind, FIELD_ALIASES.get(kind, kind))
        if canonical == 'allen_cahn3' and len(positional) == 3:
            spec.update(zip('abc', positional))
        elif canonical in POSITIONAL:
            single = len(positional) == 1 and (
                canonical != 'polytope' or np.ndim(positional[0]) == 2
            )
            spec[POSITIONAL[canonical]] = positional[0] if single else positional
        else:
            raise ScenarioError(f'`{kind}` takes no positional values', key=kind)
    return spec


def _as_spec(spec: Spec) -> Dict[str, Any]:
    if isinstance(spec, str):
        return parse_spec(spec)
    if 'kind' not in spec:
        raise ScenarioError('The description has no `kind`', key='kind')
    return dict(spec)


def _call(cls: type, kind: str, arguments: Dict[str, Any]) -> Any:
    try:
        return cls(**arguments)
    except TypeError as error:
        raise ScenarioError(f'Invalid parameters for `{kind}`: {error}', key=kind) from error


def build_field(spec: Spec) -> VectorField:
    """Return the field described by a dictionary or a flag string.

    A `factor` entry wraps any field in a `ScaledField`.
    """
    spec = _as_spec(spec)
    kind = snakecase(str(spec.pop('kind')))
    if kind == 'kink':
        spec.setdefault('A', [1.0])
    kind = FIELD_ALIASES.get(kind, kind)
    factor = spec.pop('factor', None)
    if kind == 'scaled_field':
        field: VectorField = ScaledField(
            build_field(spec['base']), -1.0 if factor is None else float(factor),
        )
        factor = None
    elif kind == 'transformed_field':
        base = build_field(spec['base'])
        if 'angle' in spec:
            motion = EuclideanMotion.planar_rotation(float(spec['angle']))
        else:
            motion = EuclideanMotion(spec['rotation'], spec.get('shift', np.zeros(base.dimension)))
        field = TransformedField(base, motion)
    elif kind == 'polynomial' and 'constant' in spec:
        field = Polynomial.constant(spec['constant'])
    elif kind == 'polynomial' and 'linear' in spec:
        field = Polynomial.linear(spec['linear'])
    elif kind in VectorField.registry:
        field = _call(VectorField.registry[kind], kind, spec)
    else:
        raise ScenarioError(
            f'Unknown field `{kind}`, expected one of {sorted(VectorField.registry)}', key='kind',
        )
    return field if factor is None else ScaledField(field, float(factor))


def build_body(spec: Spec, field: Optional[VectorField] = None) -> ConvexBody:
    """Return the body described by a dictionary or a flag string.

    The kind `auto` asks the field for its invariant body.
    """
    spec = _as_spec(spec)
    kind = snakecase(str(spec.pop('kind')))
    kind = BODY_ALIASES.get(kind, kind)
    if kind == 'auto':
        body = field.invariant_body() if field is not None else None
        if body is None:
            raise ScenarioError('The field has no invariant body to use with `auto`', key='kind')
        return body
    classes = {'ball': Ball, 'ellipsoid': Ellipsoid, 'polytope': Polytope, 'half_space': HalfSpace}
    if kind not in classes:
        raise ScenarioError(
            f'Unknown body `{kind}`, expected one of {sorted(classes)}', key='kind',
        )
    return _call(classes[kind], kind, spec)


def build_profile(spec: Spec, field: Optional[VectorField] = None) -> Profile:
    """Return boundary data described by a dictionary or a flag string.

    Three-phase data defaults to the wells of an Allen-Cahn field.
    """
    spec = _as_spec(spec)
    kind = snakecase(str(spec.pop('kind')))
    if kind == 'constant':
        return constant_profile(spec['value'])
    if kind == 'radial':
        return radial_profile(spec.get('scale'))
    if kind == 'three_phase':
        if isinstance(field, AllenCahn3):
            spec = {'a': field.a, 'b': field.b, 'c': field.c, **spec}
        return _call(three_phase_profile, kind, spec)
    if kind == 'diagonal':
        return diagonal_profile(float(spec.get('amplitude', 1.0)))
    raise ScenarioError(
        f'Unknown boundary data `{kind}`, expected constant, radial, three_phase or diagonal',
        key='kind',
    )
