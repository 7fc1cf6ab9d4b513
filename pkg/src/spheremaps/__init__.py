"""Certified polynomial maps between spheres, Clifford/Hopf constructions,
bounds on q(n), harmonic analysis on spheres, the self-dual intertwiner and
Wilson-loop data for flat bundles over Schottky groups."""

__version__ = "0.1.0"

from .poly_core import GaussianRational, MultiPoly, SphereContext, nf_reduce
from .sphere_maps import (
    MatrixPolyMap,
    ProjectorMap,
    SphereMap,
    compose,
    is_constant,
    verify_matrix_map,
    verify_projector_map,
    verify_sphere_map,
)
from .hopf import chain_witness, clifford_hopf_map, clifford_system, radon_hurwitz
from .bounds import m_bound, q_bounds, q_group

__all__ = [
    "GaussianRational",
    "MultiPoly",
    "SphereContext",
    "nf_reduce",
    "SphereMap",
    "MatrixPolyMap",
    "ProjectorMap",
    "compose",
    "is_constant",
    "verify_sphere_map",
    "verify_matrix_map",
    "verify_projector_map",
    "radon_hurwitz",
    "clifford_system",
    "clifford_hopf_map",
    "chain_witness",
    "q_bounds",
    "q_group",
    "m_bound",
]
