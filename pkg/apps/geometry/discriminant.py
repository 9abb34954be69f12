"""The discriminant graph and its transvection data.

Inside each 2-face, the discriminant is the union of the segments of the
first barycentric subdivision that avoid lattice points: each unit triangle
contributes its barycenter b, each unit edge e its midpoint m_e, and each pair
(triangle, edge of it) the half-edge [b, m_e]. Around the half-edge dual to
e = [v, w] in face sigma, with sigma inside facets F < F', the loop
v -> F -> w -> F' -> v has monodromy x -> x + <m_F' - m_F, x> (w - v).
"""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from ..core.errors import BaseConstructionError
from .charts import AffineAtlas, ChartKey, ChartKind
from .skeleton import PointPair, Skeleton

logger = logging.getLogger(__name__)

Vector3 = Tuple[int, int, int]


class DeltaSign(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    BIVALENT = "bivalent"


@dataclass(frozen=True)
class DeltaVertex:
    """A vertex of the discriminant: ("neg", triangle), ("pos", edge) or ("biv", edge)."""

    index: int
    key: Tuple
    sign: Optional[DeltaSign]
    carrier: FrozenSet[int]


@dataclass(frozen=True)
class DeltaEdge:
    """Half-edge [barycenter, midpoint] with its transvection in the chart of the
    lower endpoint of the dual unit edge."""

    index: int
    ends: Tuple[int, int]
    face: int
    triangle: int
    unit_edge: PointPair
    chart: ChartKey
    d: Vector3
    n: Vector3
    d4: Tuple[int, ...]
    n4: Tuple[int, ...]

    @property
    def pairing(self) -> int:
        return int(np.dot(self.n, self.d))


class DiscriminantGraph:
    """Trivalent graph with signed vertices and transvection-labelled edges."""

    def __init__(self, vertices: List[DeltaVertex], edges: List[DeltaEdge]):
        self.vertices = vertices
        self.edges = edges
        self._incident: Dict[int, List[int]] = {v.index: [] for v in vertices}
        for e in edges:
            for end in e.ends:
                self._incident[end].append(e.index)
        self._by_key = {v.key: v.index for v in vertices}

    def incident(self, vertex: int) -> List[int]:
        return self._incident[vertex]

    def degree(self, vertex: int) -> int:
        return len(self._incident[vertex])

    def vertex(self, key: Tuple) -> DeltaVertex:
        return self.vertices[self._by_key[key]]

    def sign_counts(self) -> Dict[Optional[DeltaSign], int]:
        return dict(Counter(v.sign for v in self.vertices))

    def count(self, sign: DeltaSign) -> int:
        return sum(1 for v in self.vertices if v.sign is sign)

    def replace_edge(self, index: int, edge: DeltaEdge) -> "DiscriminantGraph":
        """Copy with one edge replaced (used to build perturbed diagnostics)."""
        edges = list(self.edges)
        edges[index] = edge
        return DiscriminantGraph(list(self.vertices), edges)


def _same_up_to_sign(vectors: List[Tuple[int, ...]]) -> bool:
    first = np.array(vectors[0])
    return all(
        np.array_equal(np.array(v), first) or np.array_equal(np.array(v), -first)
        for v in vectors[1:]
    )


def classify_vertex(edges: List[DeltaEdge]) -> DeltaSign:
    """Shared covector n means negative, shared vector d means positive."""
    if len(edges) == 2:
        return DeltaSign.BIVALENT
    if len(edges) != 3:
        raise BaseConstructionError(f"non-trivalent junction of degree {len(edges)}")
    shared_n = _same_up_to_sign([e.n4 for e in edges])
    shared_d = _same_up_to_sign([e.d4 for e in edges])
    if shared_n and not shared_d:
        return DeltaSign.NEGATIVE
    if shared_d and not shared_n:
        return DeltaSign.POSITIVE
    raise BaseConstructionError(
        f"vertex with legs {[e.index for e in edges]} is neither positive nor negative"
    )


def build_discriminant(skeleton: Skeleton, atlas: AffineAtlas) -> DiscriminantGraph:
    """Assemble the discriminant across faces and classify its vertices."""
    polytope = skeleton.polytope
    raw_vertices: Dict[Tuple, FrozenSet[int]] = {}
    for tri in skeleton.triangles:
        raw_vertices[("neg", tri.index)] = frozenset(skeleton.faces[tri.face])
    for key, edge in sorted(skeleton.edges.items()):
        tag = "pos" if edge.polytope_edge is not None else "biv"
        raw_vertices[(tag, key)] = edge.carrier
    keys = list(raw_vertices)
    index_of = {k: i for i, k in enumerate(keys)}

    edges: List[DeltaEdge] = []
    for key, unit_edge in sorted(skeleton.edges.items()):
        mid_tag = "pos" if unit_edge.polytope_edge is not None else "biv"
        v, w = key
        d4 = tuple(int(b - a) for a, b in zip(skeleton.points[v], skeleton.points[w]))
        for f in unit_edge.faces:
            lower, upper = skeleton.facets_of_face(f)
            n4 = tuple(int(x) for x in polytope.facet_normal(upper) - polytope.facet_normal(lower))
            d = tuple(int(x) for x in atlas.tangent_coordinates(v, d4))
            n = tuple(int(x) for x in atlas.covector_coordinates(v, n4))
            for tri in unit_edge.triangles[f]:
                edges.append(
                    DeltaEdge(
                        index=len(edges),
                        ends=(index_of[("neg", tri)], index_of[(mid_tag, key)]),
                        face=f,
                        triangle=tri,
                        unit_edge=key,
                        chart=ChartKey(ChartKind.VERTEX, v),
                        d=d,  # type: ignore[arg-type]
                        n=n,  # type: ignore[arg-type]
                        d4=d4,
                        n4=n4,
                    )
                )

    incident: Dict[int, List[DeltaEdge]] = {i: [] for i in range(len(keys))}
    for e in edges:
        for end in e.ends:
            incident[end].append(e)
    vertices = [
        DeltaVertex(index=i, key=k, sign=classify_vertex(incident[i]), carrier=raw_vertices[k])
        for i, k in enumerate(keys)
    ]
    graph = DiscriminantGraph(vertices, edges)
    logger.info(
        f"Discriminant: {graph.count(DeltaSign.NEGATIVE)} negative, "
        f"{graph.count(DeltaSign.POSITIVE)} positive, "
        f"{graph.count(DeltaSign.BIVALENT)} bivalent vertices; {len(edges)} half-edges"
    )
    return graph
