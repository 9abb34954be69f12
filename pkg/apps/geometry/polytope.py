"""Lattice 4-simplices and the frames of their 2-faces."""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import gcd
from typing import Dict, List, Sequence, Tuple

import numpy as np
import sympy

from ..core.errors import BaseConstructionError

logger = logging.getLogger(__name__)

Vector4 = Tuple[int, int, int, int]
Face = Tuple[int, int, int]
Edge = Tuple[int, int]

QUINTIC_VERTICES: Tuple[Vector4, ...] = (
    (-1, -1, -1, -1),
    (4, -1, -1, -1),
    (-1, 4, -1, -1),
    (-1, -1, 4, -1),
    (-1, -1, -1, 4),
)


def _gcd_all(values: Sequence[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g


@dataclass(frozen=True)
class FaceFrame:
    """Face-intrinsic lattice coordinates (s, t) of a 2-face.

    The point with coordinates (s, t) is ``origin + s * step_s + t * step_t``;
    the face is {s, t >= 0, s + t <= side}.
    """

    face: Face
    side: int
    origin: Vector4
    step_s: Vector4
    step_t: Vector4

    def to_lattice(self, s: int, t: int) -> Vector4:
        return tuple(  # type: ignore[return-value]
            o + s * a + t * b for o, a, b in zip(self.origin, self.step_s, self.step_t)
        )


@dataclass(frozen=True)
class LatticePolytope4:
    """A lattice 4-simplex; facet i is the facet opposite vertex i."""

    vertices: Tuple[Vector4, ...]
    name: str = field(default="custom", compare=False)

    def __post_init__(self) -> None:
        verts = tuple(tuple(int(x) for x in v) for v in self.vertices)
        if len(verts) != 5 or any(len(v) != 4 for v in verts):
            raise BaseConstructionError("a lattice 4-simplex needs five integer 4-vectors")
        object.__setattr__(self, "vertices", verts)
        diffs = sympy.Matrix([[a - b for a, b in zip(v, verts[0])] for v in verts[1:]])
        if diffs.det() == 0:
            raise BaseConstructionError("vertices do not affinely span 4-space")

    @classmethod
    def quintic(cls) -> "LatticePolytope4":
        return cls(QUINTIC_VERTICES, name="quintic")

    @property
    def faces2(self) -> List[Face]:
        return list(combinations(range(5), 3))  # type: ignore[arg-type]

    @property
    def edges(self) -> List[Edge]:
        return list(combinations(range(5), 2))  # type: ignore[arg-type]

    def facet_vertices(self, facet: int) -> Tuple[int, ...]:
        return tuple(i for i in range(5) if i != facet)

    def cell_counts(self) -> Dict[int, int]:
        """Cells of the boundary complex by dimension."""
        return {0: 5, 1: len(self.edges), 2: len(self.faces2), 3: 5}

    @cached_property
    def facet_normals(self) -> Tuple[Vector4, ...]:
        """Integral covectors m_F with <m_F, x> = -1 on facet F."""
        normals = []
        for facet in range(5):
            rows = sympy.Matrix([self.vertices[j] for j in self.facet_vertices(facet)])
            m = rows.solve(sympy.Matrix([-1, -1, -1, -1]))
            if any(not entry.is_integer for entry in m):
                raise BaseConstructionError(
                    f"facet {facet} is not at lattice distance one from the origin"
                )
            normals.append(tuple(int(entry) for entry in m))
        return tuple(normals)  # type: ignore[return-value]

    def facet_normal(self, facet: int) -> np.ndarray:
        return np.array(self.facet_normals[facet], dtype=np.int64)

    def edge_length(self, a: int, b: int) -> int:
        return _gcd_all(x - y for x, y in zip(self.vertices[b], self.vertices[a]))

    def edge_step(self, a: int, b: int) -> Vector4:
        """Primitive lattice step from vertex a towards vertex b."""
        n = self.edge_length(a, b)
        return tuple((y - x) // n for x, y in zip(self.vertices[a], self.vertices[b]))  # type: ignore[return-value]

    def face_frame(self, face: Face) -> FaceFrame:
        """Frame of a 2-face, which must be a standard lattice triangle."""
        a, b, c = sorted(face)
        sides = {self.edge_length(a, b), self.edge_length(a, c), self.edge_length(b, c)}
        if len(sides) != 1:
            raise BaseConstructionError(f"face {face} has edges of unequal lattice length")
        n = sides.pop()
        step_s = self.edge_step(a, b)
        step_t = self.edge_step(a, c)
        minors = [
            step_s[i] * step_t[j] - step_s[j] * step_t[i] for i, j in combinations(range(4), 2)
        ]
        if _gcd_all(minors) != 1:
            raise BaseConstructionError(f"face {face} is not a standard lattice triangle")
        return FaceFrame(
            face=(a, b, c), side=n, origin=self.vertices[a], step_s=step_s, step_t=step_t
        )
