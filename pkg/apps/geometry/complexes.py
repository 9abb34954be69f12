"""Regular cell structures on B with the discriminant as a subcomplex.

Every cell outside the discriminant lies in a single affine chart, recorded on
the cell; discriminant cells carry no chart. Face incidences are mod 2, so no
orientations are stored.
"""

import logging
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from ..core.errors import BaseConstructionError, StalkError
from ..core.gf2 import GF2ChainComplex, GF2Matrix
from .charts import ChartKey, ChartKind
from .skeleton import PointPair, Skeleton

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cell:
    index: int
    dim: int
    kind: str
    key: Hashable
    faces: Tuple[int, ...]
    chart: Optional[ChartKey]
    carrier: FrozenSet[int] = frozenset()
    vertices: Tuple[int, ...] = ()

    @property
    def in_delta(self) -> bool:
        return self.chart is None


class CellComplex:
    """A finite regular cell complex with charts and a discriminant subcomplex."""

    def __init__(self, cells: Sequence[Cell], name: str, simplicial: bool = False):
        for i, cell in enumerate(cells):
            if cell.index != i:
                raise BaseConstructionError(f"cell {cell.key} has index {cell.index}, expected {i}")
            for f in cell.faces:
                if cells[f].dim != cell.dim - 1:
                    raise BaseConstructionError(
                        f"cell {cell.key} has face {cells[f].key} of wrong dimension"
                    )
        self.cells: List[Cell] = list(cells)
        self.name = name
        self.simplicial = simplicial
        self._cofaces: List[List[int]] = [[] for _ in cells]
        self._by_dim: Dict[int, List[int]] = {}
        for cell in cells:
            self._by_dim.setdefault(cell.dim, []).append(cell.index)
            for f in cell.faces:
                self._cofaces[f].append(cell.index)
        self._simplices: Dict[Tuple[int, ...], int] = (
            {c.vertices: c.index for c in cells} if simplicial else {}
        )
        self._keys: Dict[Hashable, int] = {c.key: c.index for c in cells}

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, index: int) -> Cell:
        return self.cells[index]

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells)

    @property
    def dimension(self) -> int:
        return max(self._by_dim) if self._by_dim else -1

    def cells_of_dim(self, k: int) -> List[int]:
        return self._by_dim.get(k, [])

    def counts(self) -> List[int]:
        return [len(self.cells_of_dim(k)) for k in range(self.dimension + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))

    def cofaces(self, index: int) -> List[int]:
        return self._cofaces[index]

    def index_of(self, key: Hashable) -> int:
        return self._keys[key]

    def simplex(self, vertices: Iterable[int]) -> int:
        """Index of the simplex spanned by the given 0-cells."""
        return self._simplices[tuple(sorted(vertices))]

    def has_simplex(self, vertices: Iterable[int]) -> bool:
        return tuple(sorted(vertices)) in self._simplices

    def star(self, index: int) -> List[int]:
        """All cells having ``index`` as a face (including itself), by (dim, index)."""
        seen = {index}
        queue = deque([index])
        while queue:
            current = queue.popleft()
            for up in self._cofaces[current]:
                if up not in seen:
                    seen.add(up)
                    queue.append(up)
        return sorted(seen, key=lambda i: (self.cells[i].dim, i))

    def closure(self, index: int) -> List[int]:
        seen = {index}
        stack = [index]
        while stack:
            for f in self.cells[stack.pop()].faces:
                if f not in seen:
                    seen.add(f)
                    stack.append(f)
        return sorted(seen, key=lambda i: (self.cells[i].dim, i))

    def base_cell(self, index: int) -> int:
        """Smallest cell of the star (by dim, index) outside the discriminant."""
        for i in self.star(index):
            if not self.cells[i].in_delta:
                return i
        raise StalkError(f"star of cell {self.cells[index].key} lies inside the discriminant")

    def hasse_edges(self) -> Iterator[Tuple[int, int]]:
        """Pairs (face, coface) of codimension one."""
        for cell in self.cells:
            for f in cell.faces:
                yield f, cell.index

    def delta_cells(self) -> List[int]:
        return [c.index for c in self.cells if c.in_delta]

    def delta_is_subcomplex(self) -> bool:
        return all(
            self.cells[f].in_delta for c in self.cells if c.in_delta for f in c.faces
        )

    def cochain_complex(self) -> GF2ChainComplex:
        """Cellular cochains with Z2 coefficients (incidence numbers are 1 mod 2)."""
        top = self.dimension
        position = {}
        for k in range(top + 1):
            for j, i in enumerate(self.cells_of_dim(k)):
                position[i] = j
        differentials = []
        for k in range(top):
            rows = [0] * len(self.cells_of_dim(k + 1))
            for r, i in enumerate(self.cells_of_dim(k + 1)):
                for f in self.cells[i].faces:
                    rows[r] ^= 1 << position[f]
            differentials.append(GF2Matrix(len(rows), len(self.cells_of_dim(k)), rows))
        return GF2ChainComplex(self.counts(), differentials)

    def without_cells(self, removed: Iterable[int]) -> "CellComplex":
        """Copy with some cells deleted; the deleted set must be closed under cofaces."""
        gone = set(removed)
        for i in gone:
            if any(up not in gone for up in self._cofaces[i]):
                raise BaseConstructionError(f"cannot delete {self.cells[i].key}: it has cofaces")
        renumber: Dict[int, int] = {}
        cells: List[Cell] = []
        for cell in self.cells:
            if cell.index in gone:
                continue
            renumber[cell.index] = len(cells)
            cells.append(
                Cell(
                    index=len(cells),
                    dim=cell.dim,
                    kind=cell.kind,
                    key=cell.key,
                    faces=tuple(renumber[f] for f in cell.faces),
                    chart=cell.chart,
                    carrier=cell.carrier,
                    vertices=tuple(renumber[v] for v in cell.vertices),
                )
            )
        return CellComplex(cells, f"{self.name}-minus-{len(gone)}", simplicial=self.simplicial)


class _Builder:
    """Accumulates cells keyed by domain keys; faces must be added first."""

    def __init__(self) -> None:
        self.cells: List[Cell] = []
        self.index: Dict[Hashable, int] = {}
        self.simplices: Dict[Tuple[int, ...], int] = {}

    def add(
        self,
        dim: int,
        kind: str,
        key: Hashable,
        faces: Sequence[Hashable],
        chart: Optional[ChartKey],
        carrier: FrozenSet[int],
    ) -> int:
        if key in self.index:
            raise BaseConstructionError(f"duplicate cell {key}")
        idx = len(self.cells)
        face_ids = tuple(self.index[f] for f in faces)
        vertices = (idx,) if dim == 0 else ()
        self.cells.append(Cell(idx, dim, kind, key, face_ids, chart, carrier, vertices))
        self.index[key] = idx
        if dim == 0:
            self.simplices[(idx,)] = idx
        return idx

    def add_simplex(
        self,
        vertex_keys: Sequence[Hashable],
        kind: str,
        chart: Optional[ChartKey],
        carrier: FrozenSet[int],
    ) -> int:
        verts = tuple(sorted(self.index[k] for k in vertex_keys))
        return self.add_simplex_ids(verts, kind, chart, carrier)

    def add_simplex_ids(
        self,
        verts: Tuple[int, ...],
        kind: str,
        chart: Optional[ChartKey],
        carrier: FrozenSet[int],
    ) -> int:
        if verts in self.simplices:
            raise BaseConstructionError(f"duplicate simplex {verts}")
        faces = tuple(self.simplices[sub] for sub in combinations(verts, len(verts) - 1))
        idx = len(self.cells)
        self.cells.append(
            Cell(idx, len(verts) - 1, kind, ("simplex",) + verts, faces, chart, carrier, verts)
        )
        self.index[("simplex",) + verts] = idx
        self.simplices[verts] = idx
        return idx

    def build(self, name: str, simplicial: bool = False) -> CellComplex:
        complex_ = CellComplex(self.cells, name, simplicial=simplicial)
        if not complex_.delta_is_subcomplex():
            raise BaseConstructionError(f"{name}: discriminant is not a subcomplex")
        logger.debug(f"Built {name} complex with cell counts {complex_.counts()}")
        return complex_


def _vertex_chart(pid: int) -> ChartKey:
    return ChartKey(ChartKind.VERTEX, pid)


def _facet_chart(facet: int) -> ChartKey:
    return ChartKey(ChartKind.FACET, facet)


def _edge_key(a: int, b: int) -> PointPair:
    return (a, b) if a < b else (b, a)


def build_dual_complex(skel: Skeleton) -> CellComplex:
    """Regions around lattice points, cut out by the discriminant."""
    b = _Builder()
    for a, pid in enumerate(skel.vertex_point):
        b.add(0, "polytope_vertex", ("P", a), (), _vertex_chart(pid), frozenset({a}))
    for tri in skel.triangles:
        b.add(0, "negative", ("neg", tri.index), (), None, frozenset(skel.faces[tri.face]))
    for edge in skel.boundary_edges():
        b.add(0, "positive", ("pos", edge.key), (), None, edge.carrier)

    for edge in skel.interior_edges():
        (f,) = edge.faces
        t1, t2 = edge.triangles[f]
        b.add(1, "delta_edge", ("dnn", edge.key), [("neg", t1), ("neg", t2)], None, edge.carrier)
    for edge in skel.boundary_edges():
        for f in edge.faces:
            (tri,) = edge.triangles[f]
            b.add(
                1,
                "delta_edge",
                ("dnp", edge.key, f),
                [("neg", tri), ("pos", edge.key)],
                None,
                frozenset(skel.faces[f]),
            )
    for (pa, pb), chain in sorted(skel.polytope_edge_points.items()):
        n = len(chain) - 1
        for j, q in enumerate(chain):
            left = ("P", pa) if j == 0 else ("pos", _edge_key(chain[j - 1], q))
            right = ("P", pb) if j == n else ("pos", _edge_key(q, chain[j + 1]))
            b.add(1, "segment", ("seg", (pa, pb), j), [left, right], _vertex_chart(q), frozenset({pa, pb}))

    for f, face in enumerate(skel.faces):
        face_edges = [(a, c) for a, c in combinations(face, 2)]
        for pid in skel.face_point_ids[f]:
            faces: List[Hashable] = []
            for ekey in skel.point_edges_in_face(pid, f):
                if skel.edges[ekey].polytope_edge is None:
                    faces.append(("dnn", ekey))
                else:
                    faces.append(("dnp", ekey, f))
            for pe in face_edges:
                chain = skel.polytope_edge_points[pe]
                if pid in chain:
                    faces.append(("seg", pe, chain.index(pid)))
            b.add(2, "region", ("reg", pid, f), faces, _vertex_chart(pid), frozenset(face))

    _add_facets(b, skel, lambda key: key[0] == "reg")
    return b.build("dual")


def _add_facets(b: _Builder, skel: Skeleton, is_top_face) -> None:
    for facet in range(5):
        verts = frozenset(i for i in range(5) if i != facet)
        faces = [
            c.key for c in b.cells if c.dim == 2 and is_top_face(c.key) and c.carrier <= verts
        ]
        b.add(3, "facet", ("facet", facet), faces, _facet_chart(facet), verts)


def build_quad_complex(skel: Skeleton) -> CellComplex:
    """Quads of the first barycentric subdivision of the face triangulations."""
    b = _Builder()
    for pid, carrier in enumerate(skel.point_carrier):
        b.add(0, "lattice", ("lat", pid), (), _vertex_chart(pid), carrier)
    for key, edge in sorted(skel.edges.items()):
        b.add(0, "midpoint", ("mid", key), (), None, edge.carrier)
    for tri in skel.triangles:
        b.add(0, "barycenter", ("bar", tri.index), (), None, frozenset(skel.faces[tri.face]))

    for key, edge in sorted(skel.edges.items()):
        for pid in key:
            b.add(1, "half", ("half", pid, key), [("lat", pid), ("mid", key)], _vertex_chart(pid), edge.carrier)
    for tri in skel.triangles:
        p, q, r = tri.points
        for key in ((p, q), (p, r), (q, r)):
            b.add(
                1,
                "dual_segment",
                ("dseg", tri.index, key),
                [("mid", key), ("bar", tri.index)],
                None,
                frozenset(skel.faces[tri.face]),
            )

    for tri in skel.triangles:
        for v in tri.points:
            e1, e2 = (_edge_key(v, w) for w in tri.points if w != v)
            b.add(
                2,
                "quad",
                ("quad", tri.index, v),
                [("half", v, e1), ("half", v, e2), ("dseg", tri.index, e1), ("dseg", tri.index, e2)],
                _vertex_chart(v),
                frozenset(skel.faces[tri.face]),
            )

    _add_facets(b, skel, lambda key: key[0] == "quad")
    return b.build("quad")


def build_simplicial_complex(skel: Skeleton) -> CellComplex:
    """Smallest simplicial structure whose open-star cover misses the
    discriminant on triple intersections: the 2-skeleton pieces around each
    lattice point, coned off inside every facet."""
    b = _Builder()
    for pid, carrier in enumerate(skel.point_carrier):
        b.add(0, "lattice", ("lat", pid), (), _vertex_chart(pid), carrier)
    for edge in skel.boundary_edges():
        b.add(0, "positive", ("pos", edge.key), (), None, edge.carrier)
    for tri in skel.triangles:
        b.add(0, "barycenter", ("bar", tri.index), (), None, frozenset(skel.faces[tri.face]))

    skeleton_simplices: List[Tuple[Tuple[int, ...], FrozenSet[int]]] = []

    def add(keys: Sequence[Hashable], kind: str, chart: Optional[ChartKey], carrier: FrozenSet[int]) -> None:
        idx = b.add_simplex(keys, kind, chart, carrier)
        skeleton_simplices.append((b.cells[idx].vertices, carrier))

    for c in list(b.cells):
        skeleton_simplices.append((c.vertices, c.carrier))

    for edge in skel.interior_edges():
        (f,) = edge.faces
        t1, t2 = edge.triangles[f]
        add([("bar", t1), ("bar", t2)], "delta_edge", None, frozenset(skel.faces[f]))
    for edge in skel.boundary_edges():
        for f in edge.faces:
            (tri,) = edge.triangles[f]
            add([("bar", tri), ("pos", edge.key)], "delta_edge", None, frozenset(skel.faces[f]))
        for q in edge.key:
            add([("lat", q), ("pos", edge.key)], "segment", _vertex_chart(q), edge.carrier)
    for tri in skel.triangles:
        for v in tri.points:
            add([("lat", v), ("bar", tri.index)], "spoke", _vertex_chart(v), frozenset(skel.faces[tri.face]))

    for edge in skel.interior_edges():
        (f,) = edge.faces
        t1, t2 = edge.triangles[f]
        for x in edge.key:
            add(
                [("lat", x), ("bar", t1), ("bar", t2)],
                "triangle",
                _vertex_chart(x),
                frozenset(skel.faces[f]),
            )
    for edge in skel.boundary_edges():
        for f in edge.faces:
            (tri,) = edge.triangles[f]
            for q in edge.key:
                add(
                    [("lat", q), ("pos", edge.key), ("bar", tri)],
                    "triangle",
                    _vertex_chart(q),
                    frozenset(skel.faces[f]),
                )

    for facet in range(5):
        verts = frozenset(i for i in range(5) if i != facet)
        apex = b.add(0, "apex", ("apex", facet), (), _facet_chart(facet), verts)
        for simplex, carrier in skeleton_simplices:
            if carrier <= verts:
                b.add_simplex_ids(tuple(sorted(simplex + (apex,))), "cone", _facet_chart(facet), verts)
    return b.build("simplicial", simplicial=True)


def simplicial_complex(
    top_simplices: Iterable[Sequence[int]],
    name: str = "synthetic",
    chart: Optional[ChartKey] = ChartKey(ChartKind.FACET, 0),
) -> CellComplex:
    """Closure of a list of simplices on integer vertex labels, all in one chart."""
    closure = set()
    for simplex in top_simplices:
        verts = tuple(sorted(set(simplex)))
        for k in range(1, len(verts) + 1):
            closure.update(combinations(verts, k))
    b = _Builder()
    labels = sorted({v for s in closure for v in s})
    for v in labels:
        b.add(0, "vertex", ("v", v), (), chart, frozenset())
    for simplex in sorted((s for s in closure if len(s) > 1), key=lambda s: (len(s), s)):
        b.add_simplex([("v", v) for v in simplex], "simplex", chart, frozenset())
    return b.build(name, simplicial=True)


def barycentric_subdivision(complex_: CellComplex) -> CellComplex:
    """Order complex of the face poset; a chain inherits chart and carrier of its top cell."""
    closures = [set(complex_.closure(c.index)) - {c.index} for c in complex_]
    chains: Dict[int, List[Tuple[int, ...]]] = {}
    for cell in sorted(complex_, key=lambda c: (c.dim, c.index)):
        out = [(cell.index,)]
        for f in sorted(closures[cell.index]):
            out.extend(chain + (cell.index,) for chain in chains[f])
        chains[cell.index] = out
    b = _Builder()
    for cell in complex_:
        b.add(0, f"bsd_{cell.kind}", ("bsd", cell.index), (), cell.chart, cell.carrier)
    all_chains = [ch for cell in complex_ for ch in chains[cell.index] if len(ch) > 1]
    for chain in sorted(all_chains, key=lambda ch: (len(ch), sorted(ch))):
        top = complex_[chain[-1]]
        b.add_simplex([("bsd", c) for c in chain], "bsd", top.chart, top.carrier)
    return b.build(f"{complex_.name}-bsd", simplicial=True)


def stellar_subdivide_edge(complex_: CellComplex, edge: int) -> CellComplex:
    """Insert a vertex in the middle of a 1-simplex of a simplicial complex."""
    if not complex_.simplicial or complex_[edge].dim != 1:
        raise BaseConstructionError("stellar subdivision needs an edge of a simplicial complex")
    a, c = complex_[edge].vertices
    new_vertex = len(complex_)
    # Each new simplex remembers the old simplex whose interior it lies in.
    simplices: Dict[Tuple[int, ...], int] = {}
    for cell in complex_:
        verts = cell.vertices
        if a in verts and c in verts:
            rest = tuple(v for v in verts if v not in (a, c))
            for variant in (rest + (a,), rest + (c,), rest):
                simplices[tuple(sorted(variant + (new_vertex,)))] = cell.index
        else:
            simplices[verts] = cell.index
    b = _Builder()
    order = sorted(simplices, key=lambda s: (len(s), s))
    remap: Dict[int, int] = {}
    for verts in order:
        old = complex_[simplices[verts]]
        if len(verts) == 1:
            idx = b.add(0, old.kind if verts[0] != new_vertex else "stellar", ("stellar", verts[0]), (), old.chart, old.carrier)
            remap[verts[0]] = idx
        else:
            b.add_simplex_ids(tuple(sorted(remap[v] for v in verts)), old.kind, old.chart, old.carrier)
    return b.build(f"{complex_.name}-stellar", simplicial=True)
