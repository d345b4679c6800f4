"""Elliptic-confinement source."""

__version__ = '0.1.0'

from .certifier import (
    Certificate,
    certify_convex_condition,
    certify_halfspace,
    certify_symmetry_condition,
    certify_triangle,
    gl_anisotropic_margin,
)
from .fields import AllenCahn3, GinzburgLandau, GrossPitaevskii, Polynomial, SymmetricPair
from .geometry import Ball, Ellipsoid, HalfSpace, Polytope
from .monitors import (
    component_bound_report,
    confinement_report,
    p_function_report,
    strictness_report,
    symmetry_report,
)
from .solver import SolutionGrid, residual, solve_bvp_1d, solve_relax_2d
