"""The affine base B: construction, flips, diagnostics and the base file format."""

import json
import logging
import threading
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
import yaml
from pydantic import ValidationError

from ..core.config import REFINEMENT_KINDS
from ..core.errors import BaseConstructionError, FlipError, InputError
from ..core.gf2 import cohomology_dims, dense_rank
from ..core.schemas import BaseFile, BaseSource, DiagnosticsReport, FaceEntry, FlipTarget
from .charts import AffineAtlas
from .complexes import (
    CellComplex,
    build_dual_complex,
    build_quad_complex,
    build_simplicial_complex,
)
from .discriminant import DeltaSign, DiscriminantGraph, build_discriminant as _assemble_discriminant
from .polytope import Face, LatticePolytope4
from .skeleton import PointPair, Skeleton
from .triangulation import EdgeKey, FaceTriangulation, point_index, standard_maximal_triangulation

logger = logging.getLogger(__name__)

PRESETS = ("quintic",)

_BUILDERS: Dict[str, Callable[[Skeleton], CellComplex]] = {
    "dual": build_dual_complex,
    "quad": build_quad_complex,
    "simplicial": build_simplicial_complex,
}


class BaseComplex:
    """Boundary of a lattice 4-simplex with a maximal triangulation of every 2-face.

    Derived data (skeleton, charts, discriminant, refinements) is computed on
    first use and cached; the object is never mutated afterwards, so a built
    base can be shared between threads.
    """

    def __init__(
        self,
        polytope: LatticePolytope4,
        triangulations: Mapping[Face, FaceTriangulation],
        preset: Optional[str] = None,
    ):
        self.polytope = polytope
        self.triangulations: Dict[Face, FaceTriangulation] = {
            tuple(sorted(f)): t for f, t in triangulations.items()  # type: ignore[misc]
        }
        self.preset = preset
        self._lock = threading.RLock()
        self._refinements: Dict[str, CellComplex] = {}

    @cached_property
    def skeleton(self) -> Skeleton:
        with self._lock:
            return Skeleton(self.polytope, self.triangulations)

    @cached_property
    def atlas(self) -> AffineAtlas:
        with self._lock:
            skel = self.skeleton
            return AffineAtlas(self.polytope, skel.points, skel.polytope_vertex_of())

    @cached_property
    def discriminant(self) -> DiscriminantGraph:
        with self._lock:
            return _assemble_discriminant(self.skeleton, self.atlas)

    def refinement(self, kind: str = "dual") -> CellComplex:
        """Cell structure of the given kind, built once."""
        if kind not in _BUILDERS:
            raise InputError(f"unknown refinement {kind!r}; choose from {REFINEMENT_KINDS}")
        with self._lock:
            complex_ = self._refinements.get(kind)
            if complex_ is None:
                complex_ = _BUILDERS[kind](self.skeleton)
                self._refinements[kind] = complex_
            return complex_

    def triangulation(self, face: Face) -> FaceTriangulation:
        key = tuple(sorted(face))
        if key not in self.triangulations:
            raise BaseConstructionError(f"{face} is not a 2-face of the polytope")
        return self.triangulations[key]  # type: ignore[index]

    def with_triangulation(self, face: Face, triangulation: FaceTriangulation) -> "BaseComplex":
        triangulations = dict(self.triangulations)
        triangulations[tuple(sorted(face))] = triangulation  # type: ignore[index]
        return BaseComplex(self.polytope, triangulations, preset=self.preset)

    def global_edge(self, face: Face, edge: EdgeKey) -> PointPair:
        """Global point ids of a face-local edge."""
        f = self.skeleton.face_index(face)
        ids = self.skeleton.face_point_ids[f]
        a, b = ids[edge[0]], ids[edge[1]]
        return (a, b) if a < b else (b, a)

    def __repr__(self) -> str:
        return f"BaseComplex(polytope={self.polytope.name!r}, preset={self.preset!r})"


def build_quintic_base() -> BaseComplex:
    """B = boundary of the quintic polytope with uniform face triangulations."""
    polytope = LatticePolytope4.quintic()
    triangulations = {
        face: standard_maximal_triangulation(face, polytope.face_frame(face).side)
        for face in polytope.faces2
    }
    logger.info("Built quintic base")
    return BaseComplex(polytope, triangulations, preset="quintic")


def build_discriminant(base: BaseComplex) -> DiscriminantGraph:
    """Discriminant graph of the base with its signed vertices."""
    return base.discriminant


def build_base(source: BaseSource) -> BaseComplex:
    """Base from a preset name or a base file."""
    if source.path is not None:
        return load_base(source.path)
    if source.preset == "quintic":
        return build_quintic_base()
    raise InputError(f"unknown base preset {source.preset!r}; choose from {PRESETS}")


# Flips


def _check_negative_pair(base: BaseComplex, face: Face, edge: EdgeKey) -> None:
    graph = base.discriminant
    key = base.global_edge(face, edge)
    try:
        crossing = graph.vertex(("biv", key))
    except KeyError:
        raise FlipError(f"face {face}: edge {edge} is not crossed by an interior segment of Delta")
    ends = set()
    for e in graph.incident(crossing.index):
        ends.update(v for v in graph.edges[e].ends if v != crossing.index)
    signs = [graph.vertices[v].sign for v in ends]
    if len(ends) != 2 or any(s is not DeltaSign.NEGATIVE for s in signs):
        raise FlipError(
            f"face {face}: Delta crosses edge {edge} between vertices {signs}, "
            "expected two negative vertices"
        )


def flip(base: BaseComplex, face: Face, edge: EdgeKey) -> BaseComplex:
    """Replace an interior edge of a face triangulation by the other diagonal."""
    face = tuple(sorted(face))  # type: ignore[assignment]
    triangulation = base.triangulation(face)
    edge = (min(edge), max(edge))
    if triangulation.is_boundary_pair(*edge):
        raise FlipError(f"face {face}: edge {edge} lies on the boundary of the face")
    if edge not in triangulation.edge_triangles:
        raise FlipError(f"face {face}: {edge} is not an edge of the triangulation")
    _check_negative_pair(base, face, edge)
    flipped = triangulation.flip(edge)
    logger.info(f"Flipped edge {edge} in face {face}")
    return base.with_triangulation(face, flipped)


def legal_flips(base: BaseComplex, face: Face) -> List[EdgeKey]:
    """Interior edges of a face whose quadrilateral is strictly convex."""
    triangulation = base.triangulation(face)
    return [e for e in triangulation.interior_edges() if triangulation.is_flippable(e)]


DEFAULT_FLIP_FACE: Face = (0, 1, 2)
DEFAULT_FLIP_COORDINATES: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...] = (
    ((1, 1), (2, 1)),
    ((3, 1), (3, 2)),
    ((0, 3), (1, 3)),
)


def default_flip_script(side: int = 5) -> List[FlipTarget]:
    """Three flips of pairwise distinct parallelograms in face (0, 1, 2)."""
    return [
        FlipTarget(
            face=list(DEFAULT_FLIP_FACE),
            edge=[point_index(side, *a), point_index(side, *b)],
        )
        for a, b in DEFAULT_FLIP_COORDINATES
    ]


# Diagnostics


def regularity_problems(complex_: CellComplex) -> List[str]:
    """Cells whose boundary is not a sphere of the right dimension."""
    problems: List[str] = []
    for cell in complex_:
        if cell.dim == 1 and len(set(cell.faces)) != 2:
            problems.append(f"1-cell {cell.key} does not have two distinct endpoints")
        elif cell.dim == 2:
            graph = nx.MultiGraph()
            for e in cell.faces:
                a, b = complex_[e].faces
                graph.add_edge(a, b)
            if not nx.is_connected(graph) or any(d != 2 for _, d in graph.degree()):
                problems.append(f"2-cell {cell.key} is not bounded by a simple cycle")
        elif cell.dim == 3:
            edge_use: Dict[int, int] = {}
            vertices = set()
            for f in cell.faces:
                for e in complex_[f].faces:
                    edge_use[e] = edge_use.get(e, 0) + 1
                    vertices.update(complex_[e].faces)
            euler = len(vertices) - len(edge_use) + len(cell.faces)
            if any(n != 2 for n in edge_use.values()) or euler != 2:
                problems.append(f"3-cell {cell.key} is not bounded by a 2-sphere")
    return problems


def validate_base(
    base: BaseComplex,
    refinement: str = "dual",
    complex_: Optional[CellComplex] = None,
    discriminant: Optional[DiscriminantGraph] = None,
) -> DiagnosticsReport:
    """Run the structural checks on a base. ``complex_`` and ``discriminant``
    replace the base's own data, so perturbed copies can be diagnosed."""
    report = DiagnosticsReport()
    complex_ = complex_ if complex_ is not None else base.refinement(refinement)
    graph = discriminant if discriminant is not None else base.discriminant

    counts = base.polytope.cell_counts()
    report.add(
        "cell_counts",
        counts == {0: 5, 1: 10, 2: 10, 3: 5},
        f"polytope cells {counts}; {complex_.name} refinement cells {complex_.counts()}",
    )

    dims = cohomology_dims(complex_.cochain_complex())
    report.add("sphere_cohomology", dims == [1, 0, 0, 1], f"cellular Z2 cohomology {dims}")

    problems = regularity_problems(complex_)
    report.add("regularity", not problems, "; ".join(problems[:5]))

    report.add(
        "delta_subcomplex",
        complex_.delta_is_subcomplex(),
        f"{len(complex_.delta_cells())} discriminant cells",
    )

    bad = [e.index for e in graph.edges if e.pairing != 0]
    report.add("transvection", not bad, f"edges with <n, d> != 0: {bad[:10]}")

    degrees = {graph.degree(v.index) for v in graph.vertices if v.sign is not DeltaSign.BIVALENT}
    report.add("trivalence", degrees <= {3}, f"signed vertex degrees {sorted(degrees)}")

    unsigned = [v.key for v in graph.vertices if v.sign is None]
    report.add("signs", not unsigned, f"unsigned vertices: {unsigned[:5]}")

    if base.preset in PRESETS:
        report.add("simplicity", _simple_vertices(graph), "checked at every signed vertex")
    else:
        logger.warning("Base is not a preset: simplicity of the singularities is unverified")
        report.add("simplicity", True, "unverified simplicity")

    pos, neg = graph.count(DeltaSign.POSITIVE), graph.count(DeltaSign.NEGATIVE)
    detail = f"{pos} positive, {neg} negative, chi = {pos - neg}"
    if base.preset == "quintic":
        report.add("euler", (pos, neg) == (50, 250), detail)
    else:
        report.add("euler", True, detail)

    logger.info(f"Base validation {'passed' if report.passed else 'failed'}: {report.failed()}")
    return report


def _simple_vertices(graph: DiscriminantGraph) -> bool:
    """At every signed vertex the non-shared data of the legs spans a plane mod 2."""
    for v in graph.vertices:
        if v.sign not in (DeltaSign.POSITIVE, DeltaSign.NEGATIVE):
            continue
        legs = [graph.edges[e] for e in graph.incident(v.index)]
        varying = [leg.d4 if v.sign is DeltaSign.NEGATIVE else leg.n4 for leg in legs]
        rank = dense_rank(np.array(varying, dtype=np.int64) % 2)
        if rank != 2:
            return False
    return True


# Base files


def to_base_file(base: BaseComplex) -> BaseFile:
    return BaseFile(
        name=base.polytope.name,
        preset=base.preset,
        vertices=[list(v) for v in base.polytope.vertices],
        faces=[
            FaceEntry(face=list(face), triangles=[list(t) for t in base.triangulation(face).triangles])
            for face in base.polytope.faces2
        ],
    )


def from_base_file(data: BaseFile) -> BaseComplex:
    polytope = LatticePolytope4(tuple(tuple(v) for v in data.vertices), name=data.name)  # type: ignore[arg-type]
    triangulations = {}
    for entry in data.faces:
        face: Face = tuple(entry.face)  # type: ignore[assignment]
        side = polytope.face_frame(face).side
        triangulations[face] = FaceTriangulation(
            face=face, side=side, triangles=tuple(tuple(t) for t in entry.triangles)  # type: ignore[misc]
        )
    base = BaseComplex(polytope, triangulations, preset=data.preset)
    base.skeleton  # validates triangulations and gluing
    return base


def save_base(base: BaseComplex, path: Union[str, Path]) -> Path:
    """Write a base file; the format follows the suffix (.yaml/.yml or JSON)."""
    path = Path(path)
    data = to_base_file(base).model_dump()
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix in (".yaml", ".yml"):
        path.write_text(yaml.safe_dump(data, sort_keys=True))
    else:
        path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
    logger.info(f"Saved base to {path}")
    return path


def load_base(path: Union[str, Path]) -> BaseComplex:
    """Read and validate a base file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"Failed to read base file {path}: {e}")
    try:
        raw = yaml.safe_load(text) if path.suffix in (".yaml", ".yml") else json.loads(text)
        data = BaseFile.model_validate(raw)
    except (ValidationError, ValueError, yaml.YAMLError) as e:
        raise InputError(f"Invalid base file {path}: {e}")
    if data.schema_version != 1:
        raise InputError(f"unsupported base schema version {data.schema_version}")
    logger.info(f"Loaded base {data.name!r} from {path}")
    return from_base_file(data)
