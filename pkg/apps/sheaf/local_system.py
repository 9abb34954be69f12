"""GF(2) local systems on the smooth locus, given by their transport rule.

A local system turns the integral tangent transition of a path into a mod-2
transport of its fibre. Conventions for a tangent monodromy T:

* R1f  : T                 (tangent lattice)
* R2f  : inverse transpose (second exterior power, cofactors of T mod 2)
* R1fdual : inverse transpose (cotangent lattice)
* R2fdual : T              (second exterior power of the cotangent lattice)
* cover / coverdual : the permutation of the eight 2-torsion labels on side f / fdual
* quotient / quotientdual : functions on the labels modulo <1_{u0}, 1>
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..core.errors import InputError, TransvectionError
from ..core.gf2 import as_gf2, dense_inverse, dense_matmul, quotient_frame
from ..core.schemas import Side
from ..monodromy.torsion import TORSION_POINTS, torsion_action

logger = logging.getLogger(__name__)


class LocalSystemLabel(str, Enum):
    R1F = "R1f"
    R2F = "R2f"
    R1FDUAL = "R1fdual"
    R2FDUAL = "R2fdual"
    COVER = "cover"
    COVERDUAL = "coverdual"
    CONST = "const"
    QUOTIENT = "quotient"
    QUOTIENTDUAL = "quotientdual"

    @property
    def side(self) -> Optional[Side]:
        if self is LocalSystemLabel.CONST:
            return None
        if self.value.endswith("dual"):
            return Side.FDUAL
        return Side.F


# Sheaves a user can ask for by name on the command line.
SHEAF_NAMES = ("R1f", "R2f", "R1fdual", "R2fdual", "cover", "coverdual", "const")

# (R^1, quotient, R^2, cover) for each side of the mirror pair.
SIDE_LABELS: Dict[Side, Tuple[LocalSystemLabel, ...]] = {
    Side.F: (
        LocalSystemLabel.R1F,
        LocalSystemLabel.QUOTIENT,
        LocalSystemLabel.R2F,
        LocalSystemLabel.COVER,
    ),
    Side.FDUAL: (
        LocalSystemLabel.R1FDUAL,
        LocalSystemLabel.QUOTIENTDUAL,
        LocalSystemLabel.R2FDUAL,
        LocalSystemLabel.COVERDUAL,
    ),
}


def fibre_inclusion() -> np.ndarray:
    """8 x 3: a linear functional xi goes to the function u -> <xi, u>."""
    return np.array(TORSION_POINTS, dtype=np.uint8)


def fibre_projection() -> np.ndarray:
    """3 x 8: a function h goes to the sum of h(u) u."""
    return np.array(TORSION_POINTS, dtype=np.uint8).T.copy()


def constant_subspace() -> np.ndarray:
    """8 x 2: indicator of the origin and the constant function."""
    out = np.zeros((len(TORSION_POINTS), 2), dtype=np.uint8)
    out[0, 0] = 1
    out[:, 1] = 1
    return out


QUOTIENT_PROJECTION, QUOTIENT_SECTION = quotient_frame(constant_subspace())


def splitting_projection() -> np.ndarray:
    """2 x 8: g -> (sum of g, sum of g away from the origin)."""
    out = np.ones((2, len(TORSION_POINTS)), dtype=np.uint8)
    out[1, 0] = 0
    return out


def _tangent(matrix: np.ndarray) -> np.ndarray:
    return as_gf2(matrix)


def _cotangent(matrix: np.ndarray) -> np.ndarray:
    reduced = as_gf2(matrix)
    try:
        return dense_inverse(reduced.T)
    except InputError as e:
        raise TransvectionError(f"transport {np.asarray(matrix).tolist()} is singular mod 2: {e}")


def _cover(side: Side) -> Callable[[np.ndarray], np.ndarray]:
    def transport(matrix: np.ndarray) -> np.ndarray:
        return torsion_action(matrix, side).matrix()

    return transport


def _quotient(side: Side) -> Callable[[np.ndarray], np.ndarray]:
    cover = _cover(side)

    def transport(matrix: np.ndarray) -> np.ndarray:
        return dense_matmul(dense_matmul(QUOTIENT_PROJECTION, cover(matrix)), QUOTIENT_SECTION)

    return transport


def _constant(matrix: np.ndarray) -> np.ndarray:
    return np.ones((1, 1), dtype=np.uint8)


_RULES: Dict[LocalSystemLabel, Tuple[int, Callable[[np.ndarray], np.ndarray]]] = {
    LocalSystemLabel.CONST: (1, _constant),
    LocalSystemLabel.R1F: (3, _tangent),
    LocalSystemLabel.R2F: (3, _cotangent),
    LocalSystemLabel.R1FDUAL: (3, _cotangent),
    LocalSystemLabel.R2FDUAL: (3, _tangent),
    LocalSystemLabel.COVER: (8, _cover(Side.F)),
    LocalSystemLabel.COVERDUAL: (8, _cover(Side.FDUAL)),
    LocalSystemLabel.QUOTIENT: (6, _quotient(Side.F)),
    LocalSystemLabel.QUOTIENTDUAL: (6, _quotient(Side.FDUAL)),
}


@dataclass
class LocalSystem:
    """A mod-2 local system: rank and the transport of an integral tangent matrix."""

    label: LocalSystemLabel
    rank: int
    rule: Callable[[np.ndarray], np.ndarray]
    _cache: Dict[bytes, np.ndarray] = field(default_factory=dict, repr=False)

    def transport(self, matrix: np.ndarray) -> np.ndarray:
        arr = np.ascontiguousarray(matrix, dtype=np.int64)
        key = arr.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            hit = as_gf2(self.rule(arr))
            if hit.shape != (self.rank, self.rank):
                raise TransvectionError(f"{self.label.value} transport has shape {hit.shape}")
            hit.setflags(write=False)
            self._cache[key] = hit
        return hit

    def monodromy(self, loop_matrix: np.ndarray) -> np.ndarray:
        """Mod-2 monodromy of a loop with the given tangent monodromy."""
        return self.transport(loop_matrix)

    @property
    def side(self) -> Optional[Side]:
        return self.label.side


def build_local_system(label: "LocalSystemLabel | str", base=None) -> LocalSystem:
    """Local system by label; with a base, its discriminant data is checked first."""
    try:
        label = LocalSystemLabel(label)
    except ValueError:
        raise InputError(f"unknown local system {label!r}; choose from {SHEAF_NAMES}")
    if base is not None:
        graph = base.discriminant
        if not graph.edges:
            raise TransvectionError("base has no discriminant transvection data")
        bad = [e.index for e in graph.edges if e.pairing != 0]
        if bad:
            raise TransvectionError(f"discriminant edges {bad[:5]} violate <n, d> = 0")
    rank, rule = _RULES[label]
    logger.debug(f"Local system {label.value} of rank {rank}")
    return LocalSystem(label=label, rank=rank, rule=rule)
