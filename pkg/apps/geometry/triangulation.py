"""Unimodular triangulations of lattice triangles and the flip move.

Points of a side-n face are indexed in the order
``[(s, t) for t in range(n + 1) for s in range(n + 1 - t)]``.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

from ..core.errors import BaseConstructionError, FlipError
from .polytope import Face

logger = logging.getLogger(__name__)

Point2 = Tuple[int, int]
Triangle = Tuple[int, int, int]
EdgeKey = Tuple[int, int]


def face_points(side: int) -> List[Point2]:
    return [(s, t) for t in range(side + 1) for s in range(side + 1 - t)]


def point_index(side: int, s: int, t: int) -> int:
    """Index of (s, t) in ``face_points(side)``."""
    if s < 0 or t < 0 or s + t > side:
        raise BaseConstructionError(f"({s}, {t}) is outside the side-{side} triangle")
    return t * (side + 1) - t * (t - 1) // 2 + s


def orientation(p: Point2, q: Point2, r: Point2) -> int:
    """Twice the signed area of (p, q, r)."""
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _sorted_triangle(tri: Sequence[int]) -> Triangle:
    a, b, c = sorted(int(x) for x in tri)
    return (a, b, c)


@dataclass(frozen=True)
class FaceTriangulation:
    """A triangulation of a side-n lattice triangle by point-index triples."""

    face: Face
    side: int
    triangles: Tuple[Triangle, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "face", tuple(sorted(self.face)))
        object.__setattr__(
            self, "triangles", tuple(sorted(_sorted_triangle(t) for t in self.triangles))
        )

    @cached_property
    def points(self) -> List[Point2]:
        return face_points(self.side)

    def on_side_lines(self, index: int) -> List[int]:
        """Which of the lines s=0 (0), t=0 (1), s+t=n (2) contain the point."""
        s, t = self.points[index]
        lines = []
        if s == 0:
            lines.append(0)
        if t == 0:
            lines.append(1)
        if s + t == self.side:
            lines.append(2)
        return lines

    def is_boundary_pair(self, p: int, q: int) -> bool:
        return bool(set(self.on_side_lines(p)) & set(self.on_side_lines(q)))

    @cached_property
    def edge_triangles(self) -> Dict[EdgeKey, List[int]]:
        """Each edge (sorted point pair) with the indices of its triangles."""
        table: Dict[EdgeKey, List[int]] = defaultdict(list)
        for k, (a, b, c) in enumerate(self.triangles):
            for e in ((a, b), (a, c), (b, c)):
                table[e].append(k)
        return dict(table)

    def interior_edges(self) -> List[EdgeKey]:
        return sorted(e for e in self.edge_triangles if not self.is_boundary_pair(*e))

    def boundary_edges(self) -> List[EdgeKey]:
        return sorted(e for e in self.edge_triangles if self.is_boundary_pair(*e))

    def area2(self, tri: Triangle) -> int:
        a, b, c = (self.points[i] for i in tri)
        return abs(orientation(a, b, c))

    def validate(self) -> None:
        """Check maximality, unimodularity and that the triangles tile the face."""
        n_points = len(self.points)
        for tri in self.triangles:
            if len(set(tri)) != 3 or any(not 0 <= i < n_points for i in tri):
                raise BaseConstructionError(f"face {self.face}: bad triangle {tri}")
            if self.area2(tri) != 1:
                raise BaseConstructionError(f"face {self.face}: triangle {tri} is not unimodular")
        if len(self.triangles) != self.side ** 2:
            raise BaseConstructionError(
                f"face {self.face}: {len(self.triangles)} triangles, expected {self.side ** 2}"
            )
        for edge, tris in self.edge_triangles.items():
            expected = 1 if self.is_boundary_pair(*edge) else 2
            if len(tris) != expected:
                raise BaseConstructionError(
                    f"face {self.face}: edge {edge} lies in {len(tris)} triangles"
                )
        used = {i for tri in self.triangles for i in tri}
        if len(used) != n_points:
            raise BaseConstructionError(
                f"face {self.face}: triangulation is not maximal "
                f"({n_points - len(used)} lattice points unused)"
            )

    def opposite_vertices(self, edge: EdgeKey) -> Tuple[int, int]:
        """The two vertices facing an interior edge."""
        p, q = sorted(edge)
        tris = self.edge_triangles.get((p, q))
        if tris is None:
            raise FlipError(f"face {self.face}: {edge} is not an edge of the triangulation")
        if len(tris) != 2:
            raise FlipError(f"face {self.face}: edge {edge} lies on the boundary of the face")
        r, s = (next(v for v in self.triangles[k] if v not in (p, q)) for k in tris)
        return (r, s)

    def is_flippable(self, edge: EdgeKey) -> bool:
        try:
            self._check_flip(edge)
        except FlipError:
            return False
        return True

    def _check_flip(self, edge: EdgeKey) -> Tuple[int, int, int, int]:
        p, q = sorted(edge)
        if self.is_boundary_pair(p, q):
            raise FlipError(f"face {self.face}: edge {edge} lies on the boundary of the face")
        r, s = self.opposite_vertices((p, q))
        pp, qq, rr, ss = (self.points[i] for i in (p, q, r, s))
        across_pq = orientation(pp, qq, rr) * orientation(pp, qq, ss)
        across_rs = orientation(rr, ss, pp) * orientation(rr, ss, qq)
        if across_pq >= 0 or across_rs >= 0:
            raise FlipError(
                f"face {self.face}: quadrilateral around edge {edge} is not strictly convex"
            )
        return p, q, r, s

    def flip(self, edge: EdgeKey) -> "FaceTriangulation":
        """Replace an interior edge by the other diagonal of its quadrilateral."""
        p, q, r, s = self._check_flip(edge)
        old = {_sorted_triangle((p, q, r)), _sorted_triangle((p, q, s))}
        new = [_sorted_triangle((p, r, s)), _sorted_triangle((q, r, s))]
        for tri in new:
            if self.area2(tri) != 1:
                raise FlipError(f"face {self.face}: flip of {edge} breaks unimodularity")
        kept = [t for t in self.triangles if t not in old]
        logger.debug(f"Flipped {edge} -> {(r, s)} in face {self.face}")
        return FaceTriangulation(face=self.face, side=self.side, triangles=tuple(kept + new))

    def edge_from_coordinates(self, a: Point2, b: Point2) -> EdgeKey:
        p, q = point_index(self.side, *a), point_index(self.side, *b)
        return (min(p, q), max(p, q))


def standard_maximal_triangulation(face: Face, side: int) -> FaceTriangulation:
    """Uniform triangulation into n^2 upward and downward unit triangles."""
    if side < 1:
        raise BaseConstructionError(f"face {face}: side length must be positive")
    triangles: List[Triangle] = []
    for t in range(side):
        for s in range(side - t):
            triangles.append(
                (point_index(side, s, t), point_index(side, s + 1, t), point_index(side, s, t + 1))
            )
            if s + t <= side - 2:
                triangles.append(
                    (
                        point_index(side, s + 1, t),
                        point_index(side, s, t + 1),
                        point_index(side, s + 1, t + 1),
                    )
                )
    triangulation = FaceTriangulation(face=face, side=side, triangles=tuple(triangles))
    triangulation.validate()
    return triangulation

