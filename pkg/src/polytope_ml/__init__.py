"""Exact invariants of lattice polytopes and learning experiments on their Plücker coordinates."""

from .polytope import (
    LatticePolytope,
    RationalPolytope,
    dual_polytope,
    gorenstein_index,
    hull,
    is_canonical_fano,
    is_fano,
    is_reflexive,
    is_unimodular_equivalent,
    lattice_points,
    normalized_volume,
)
from .pluecker import pluecker
from .hilbert import codimension, hilbert_basis

__version__ = "0.1.0"

__all__ = [
    "LatticePolytope",
    "RationalPolytope",
    "codimension",
    "dual_polytope",
    "gorenstein_index",
    "hilbert_basis",
    "hull",
    "is_canonical_fano",
    "is_fano",
    "is_reflexive",
    "is_unimodular_equivalent",
    "lattice_points",
    "normalized_volume",
    "pluecker",
]
