"""Affine charts of the smooth locus and their integral transition maps.

Two kinds of chart cover B minus the discriminant:

* the open star of a lattice point v of the 2-skeleton, with tangent lattice
  Z^4 / Zv (the fan picture at v),
* the interior of a facet F, with tangent lattice M_F = ker m_F.

The only overlaps used are (v, F) with v in F. The map M_F -> Z^4/Zv is the
projection; its inverse sends x mod v to x + <m_F, x> v. Every chart carries a
fixed lattice basis so transitions are 3 x 3 integer matrices.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import sympy

from ..core.errors import BaseConstructionError
from .polytope import LatticePolytope4, Vector4

logger = logging.getLogger(__name__)

IDENTITY3 = np.eye(3, dtype=np.int64)


class ChartKind(str, Enum):
    VERTEX = "vertex"
    FACET = "facet"


@dataclass(frozen=True, order=True)
class ChartKey:
    """A chart: a lattice point id (VERTEX) or a facet index (FACET)."""

    kind: ChartKind
    index: int

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.index}"


class ChartAtlas:
    """Integral tangent-lattice transitions between charts."""

    def transition(self, src: ChartKey, dst: ChartKey) -> np.ndarray:
        raise NotImplementedError


class TrivialAtlas(ChartAtlas):
    """Every transition is the identity (constant coefficients)."""

    def transition(self, src: ChartKey, dst: ChartKey) -> np.ndarray:
        return IDENTITY3.copy()


def _integer_inverse(matrix: np.ndarray, what: str) -> np.ndarray:
    sym = sympy.Matrix(matrix.tolist())
    det = sym.det()
    if det not in (1, -1):
        raise BaseConstructionError(f"{what}: basis is not unimodular (det {det})")
    return np.array(sym.inv().tolist(), dtype=np.int64)


class AffineAtlas(ChartAtlas):
    """Charts of the boundary of a reflexive lattice 4-simplex."""

    def __init__(
        self,
        polytope: LatticePolytope4,
        points: Sequence[Vector4],
        polytope_vertex_of: Dict[int, int],
    ):
        self.polytope = polytope
        self.points = [np.array(p, dtype=np.int64) for p in points]
        self._normals = [polytope.facet_normal(i) for i in range(5)]
        self._vertex_basis: Dict[int, np.ndarray] = {}
        self._vertex_inverse: Dict[int, np.ndarray] = {}
        self._facet_basis: Dict[int, np.ndarray] = {}
        self._facet_pivot: Dict[int, int] = {}
        self._cache: Dict[Tuple[ChartKey, ChartKey], np.ndarray] = {}
        for pid, point in enumerate(self.points):
            basis = self._point_basis(pid, point, polytope_vertex_of.get(pid))
            full = np.column_stack([basis, point])
            self._vertex_basis[pid] = basis
            self._vertex_inverse[pid] = _integer_inverse(full, f"chart at point {pid}")
        for facet in range(5):
            self._build_facet_chart(facet)

    def _point_basis(self, pid: int, point: np.ndarray, vertex: Optional[int]) -> np.ndarray:
        if vertex is not None:
            # Ray basis: edge directions towards the other vertices, in index order.
            rays = [
                np.array(self.polytope.edge_step(vertex, other), dtype=np.int64)
                for other in range(5)
                if other != vertex
            ]
            return np.column_stack(rays[:3])
        pivots = [a for a in range(4) if abs(int(point[a])) == 1]
        if not pivots:
            raise BaseConstructionError(
                f"lattice point {tuple(point)} has no coordinate equal to +-1"
            )
        pivot = pivots[0]
        return np.column_stack([np.eye(4, dtype=np.int64)[:, a] for a in range(4) if a != pivot])

    def _build_facet_chart(self, facet: int) -> None:
        m = self._normals[facet]
        pivots = [a for a in range(4) if abs(int(m[a])) == 1]
        if not pivots:
            raise BaseConstructionError(f"facet {facet} normal {tuple(m)} has no +-1 entry")
        p = pivots[0]
        columns = []
        for a in range(4):
            if a == p:
                continue
            b = np.eye(4, dtype=np.int64)[:, a].copy()
            b[p] -= int(m[a]) * int(m[p])
            columns.append(b)
        self._facet_basis[facet] = np.column_stack(columns)
        self._facet_pivot[facet] = p

    # Coordinates

    def vertex_basis(self, pid: int) -> np.ndarray:
        """4 x 3 matrix of the chart basis at a lattice point (modulo the point)."""
        return self._vertex_basis[pid]

    def tangent_coordinates(self, pid: int, vector: Sequence[int]) -> np.ndarray:
        """Coordinates of a Z^4 vector modulo the point, in the point's chart."""
        return (self._vertex_inverse[pid] @ np.asarray(vector, dtype=np.int64))[:3]

    def covector_coordinates(self, pid: int, covector: Sequence[int]) -> np.ndarray:
        """A covector vanishing on the point, evaluated on the chart basis."""
        cov = np.asarray(covector, dtype=np.int64)
        if int(cov @ self.points[pid]) != 0:
            raise BaseConstructionError(f"covector {tuple(cov)} does not vanish on point {pid}")
        return cov @ self._vertex_basis[pid]

    def contains(self, facet: int, pid: int) -> bool:
        return int(self._normals[facet] @ self.points[pid]) == -1

    # Transitions

    def _facet_from_vertex(self, pid: int, facet: int) -> np.ndarray:
        if not self.contains(facet, pid):
            raise BaseConstructionError(f"point {pid} does not lie on facet {facet}")
        v = self.points[pid]
        m = self._normals[facet]
        lift = np.eye(4, dtype=np.int64) + np.outer(v, m)
        keep = [a for a in range(4) if a != self._facet_pivot[facet]]
        return (lift @ self._vertex_basis[pid])[keep, :]

    def _vertex_from_facet(self, facet: int, pid: int) -> np.ndarray:
        if not self.contains(facet, pid):
            raise BaseConstructionError(f"point {pid} does not lie on facet {facet}")
        return (self._vertex_inverse[pid] @ self._facet_basis[facet])[:3, :]

    def transition(self, src: ChartKey, dst: ChartKey) -> np.ndarray:
        if src == dst:
            return IDENTITY3.copy()
        cached = self._cache.get((src, dst))
        if cached is not None:
            return cached
        if src.kind is ChartKind.VERTEX and dst.kind is ChartKind.FACET:
            matrix = self._facet_from_vertex(src.index, dst.index)
        elif src.kind is ChartKind.FACET and dst.kind is ChartKind.VERTEX:
            matrix = self._vertex_from_facet(src.index, dst.index)
        else:
            raise BaseConstructionError(f"charts {src} and {dst} do not overlap")
        matrix.setflags(write=False)
        self._cache[(src, dst)] = matrix
        return matrix
