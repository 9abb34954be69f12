"""The triangulated 2-skeleton of the polytope boundary, glued across faces."""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from ..core.errors import BaseConstructionError
from .polytope import Edge, Face, FaceFrame, LatticePolytope4, Vector4
from .triangulation import FaceTriangulation

logger = logging.getLogger(__name__)

PointPair = Tuple[int, int]


@dataclass(frozen=True)
class UnitTriangle:
    index: int
    face: int
    points: Tuple[int, int, int]


@dataclass
class UnitEdge:
    """A unit segment of some face triangulation (global point ids, sorted)."""

    key: PointPair
    carrier: FrozenSet[int]
    triangles: Dict[int, List[int]] = field(default_factory=dict)

    @property
    def polytope_edge(self) -> Optional[Edge]:
        if len(self.carrier) == 2:
            a, b = sorted(self.carrier)
            return (a, b)
        return None

    @property
    def faces(self) -> List[int]:
        return sorted(self.triangles)


def _local_carrier(face: Face, side: int, s: int, t: int) -> FrozenSet[int]:
    """Polytope vertices with positive barycentric weight at (s, t)."""
    a, b, c = face
    weights = {a: side - s - t, b: s, c: t}
    return frozenset(v for v, w in weights.items() if w > 0)


class Skeleton:
    """Global lattice points, unit triangles and unit edges of all 2-faces."""

    def __init__(
        self, polytope: LatticePolytope4, triangulations: Mapping[Face, FaceTriangulation]
    ):
        self.polytope = polytope
        self.faces: List[Face] = polytope.faces2
        missing = [f for f in self.faces if f not in triangulations]
        if missing:
            raise BaseConstructionError(f"faces without a triangulation: {missing}")
        self.triangulations = [triangulations[f] for f in self.faces]
        self.frames: List[FaceFrame] = [polytope.face_frame(f) for f in self.faces]

        self.points: List[Vector4] = []
        self.point_carrier: List[FrozenSet[int]] = []
        self._point_ids: Dict[Vector4, int] = {}
        self.face_point_ids: List[List[int]] = []
        for frame, tri in zip(self.frames, self.triangulations):
            if tri.side != frame.side:
                raise BaseConstructionError(
                    f"face {frame.face}: triangulation side {tri.side} != face side {frame.side}"
                )
            tri.validate()
            ids = []
            for s, t in tri.points:
                carrier = _local_carrier(frame.face, frame.side, s, t)
                ids.append(self._intern(frame.to_lattice(s, t), carrier))
            self.face_point_ids.append(ids)

        self.triangles: List[UnitTriangle] = []
        self.edges: Dict[PointPair, UnitEdge] = {}
        for f, tri in enumerate(self.triangulations):
            ids = self.face_point_ids[f]
            for local in tri.triangles:
                glob = sorted(ids[i] for i in local)
                unit = UnitTriangle(
                    index=len(self.triangles), face=f, points=(glob[0], glob[1], glob[2])
                )
                self.triangles.append(unit)
                for e in ((glob[0], glob[1]), (glob[0], glob[2]), (glob[1], glob[2])):
                    edge = self.edges.get(e)
                    if edge is None:
                        carrier = self.point_carrier[e[0]] | self.point_carrier[e[1]]
                        edge = UnitEdge(key=e, carrier=frozenset(carrier))
                        self.edges[e] = edge
                    edge.triangles.setdefault(f, []).append(unit.index)

        self._point_edges: Dict[int, List[PointPair]] = {}
        for key in sorted(self.edges):
            for pid in key:
                self._point_edges.setdefault(pid, []).append(key)

        self.vertex_point: List[int] = [self._point_ids[v] for v in polytope.vertices]
        self.polytope_edge_points: Dict[Edge, List[int]] = {}
        for a, b in polytope.edges:
            step = polytope.edge_step(a, b)
            n = polytope.edge_length(a, b)
            start = polytope.vertices[a]
            chain = []
            for k in range(n + 1):
                point = tuple(x + k * d for x, d in zip(start, step))
                chain.append(self._point_ids[point])  # type: ignore[index]
            self.polytope_edge_points[(a, b)] = chain
        self._check_gluing()
        logger.debug(
            f"Skeleton: {len(self.points)} points, {len(self.edges)} unit edges, "
            f"{len(self.triangles)} unit triangles"
        )

    def _intern(self, point: Vector4, carrier: FrozenSet[int]) -> int:
        pid = self._point_ids.get(point)
        if pid is None:
            pid = len(self.points)
            self._point_ids[point] = pid
            self.points.append(point)
            self.point_carrier.append(carrier)
        elif self.point_carrier[pid] != carrier:
            raise BaseConstructionError(f"point {point} has inconsistent carriers across faces")
        return pid

    def _check_gluing(self) -> None:
        for edge in self.edges.values():
            expected_faces = 3 if edge.polytope_edge is not None else 1
            if len(edge.triangles) != expected_faces:
                raise BaseConstructionError(
                    f"unit edge {edge.key} meets {len(edge.triangles)} faces, "
                    f"expected {expected_faces}"
                )

    def point_id(self, point: Vector4) -> int:
        return self._point_ids[point]

    def polytope_vertex_of(self) -> Dict[int, int]:
        return {pid: a for a, pid in enumerate(self.vertex_point)}

    def face_index(self, face: Face) -> int:
        return self.faces.index(tuple(sorted(face)))  # type: ignore[arg-type]

    def interior_edges(self) -> List[UnitEdge]:
        return [e for key, e in sorted(self.edges.items()) if e.polytope_edge is None]

    def boundary_edges(self) -> List[UnitEdge]:
        return [e for key, e in sorted(self.edges.items()) if e.polytope_edge is not None]

    def facets_of_face(self, f: int) -> Tuple[int, int]:
        """The two facets (by omitted vertex) containing face f, in increasing order."""
        others = [i for i in range(5) if i not in self.faces[f]]
        return (others[0], others[1])

    def point_edges_in_face(self, pid: int, f: int) -> List[PointPair]:
        """Unit edges of face f's triangulation with endpoint pid."""
        return [key for key in self._point_edges.get(pid, []) if f in self.edges[key].triangles]

    def triangle_containing(self, edge: PointPair, f: int) -> List[int]:
        return self.edges[edge].triangles[f]
