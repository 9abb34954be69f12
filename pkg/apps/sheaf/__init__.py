from .cech import (
    Cochain,
    StarCover,
    beta_cocycle,
    cech_complex,
    cech_sheaf,
    cup_product,
    mu_dualize,
    star_cover,
    stalk_product,
)
from .cellular import CellularSheaf, cellular_sheaf, pushforward_sheaf, sheaf_cohomology
from .les import LongExactSequence, SquareComparison, assemble_les, build_les, sheaf_map, square_comparison
from .local_system import SHEAF_NAMES, SIDE_LABELS, LocalSystem, LocalSystemLabel, build_local_system

__all__ = [
    "SHEAF_NAMES",
    "SIDE_LABELS",
    "CellularSheaf",
    "Cochain",
    "LocalSystem",
    "LocalSystemLabel",
    "LongExactSequence",
    "SquareComparison",
    "StarCover",
    "assemble_les",
    "beta_cocycle",
    "build_les",
    "build_local_system",
    "cech_complex",
    "cech_sheaf",
    "cellular_sheaf",
    "cup_product",
    "mu_dualize",
    "pushforward_sheaf",
    "sheaf_cohomology",
    "sheaf_map",
    "square_comparison",
    "stalk_product",
    "star_cover",
]
