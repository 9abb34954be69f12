"""Integral affine bases: polytope, triangulations, charts, cell structures and the discriminant."""

from .base import (
    BaseComplex,
    build_base,
    build_discriminant,
    build_quintic_base,
    default_flip_script,
    flip,
    legal_flips,
    load_base,
    save_base,
    validate_base,
)
from .charts import AffineAtlas, ChartKey, ChartKind, TrivialAtlas
from .complexes import (
    Cell,
    CellComplex,
    barycentric_subdivision,
    simplicial_complex,
    stellar_subdivide_edge,
)
from .discriminant import DeltaSign, DiscriminantGraph
from .polytope import LatticePolytope4
from .triangulation import FaceTriangulation, standard_maximal_triangulation

__all__ = [
    "AffineAtlas",
    "BaseComplex",
    "Cell",
    "CellComplex",
    "ChartKey",
    "ChartKind",
    "DeltaSign",
    "DiscriminantGraph",
    "FaceTriangulation",
    "LatticePolytope4",
    "TrivialAtlas",
    "barycentric_subdivision",
    "build_base",
    "build_discriminant",
    "build_quintic_base",
    "default_flip_script",
    "flip",
    "legal_flips",
    "load_base",
    "save_base",
    "simplicial_complex",
    "standard_maximal_triangulation",
    "stellar_subdivide_edge",
    "validate_base",
]
