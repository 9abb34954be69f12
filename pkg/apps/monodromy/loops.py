"""Monodromy of loops in the smooth locus.

Loops are walks in the incidence graph of the cells of a refinement that lie
outside the discriminant. Walking from cell a to an adjacent cell b moves a
tangent vector by the chart transition from a's chart to b's chart.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

import networkx as nx
import numpy as np

from ..core.errors import AuditError, InputError
from ..core.schemas import Side
from ..geometry.base import BaseComplex
from ..geometry.charts import ChartAtlas
from ..geometry.complexes import CellComplex
from .torsion import PermRep, torsion_action
from .transvection import primitive

logger = logging.getLogger(__name__)


def smooth_incidence_graph(complex_: CellComplex) -> nx.Graph:
    """Cells outside the discriminant, joined when one is a facet of the other."""
    graph = nx.Graph()
    graph.add_nodes_from(c.index for c in complex_ if not c.in_delta)
    graph.add_edges_from(
        (a, b)
        for a, b in complex_.hasse_edges()
        if not complex_[a].in_delta and not complex_[b].in_delta
    )
    return graph


def step_matrix(complex_: CellComplex, atlas: ChartAtlas, a: int, b: int) -> np.ndarray:
    return atlas.transition(complex_[a].chart, complex_[b].chart)  # type: ignore[arg-type]


def path_monodromy(complex_: CellComplex, atlas: ChartAtlas, path: Sequence[int]) -> np.ndarray:
    """Ordered product of chart transitions along a closed walk of cells."""
    if len(path) < 2 or path[0] != path[-1]:
        raise InputError("a loop must start and end at the same cell")
    touching = [i for i in path if complex_[i].in_delta]
    if touching:
        raise InputError(f"loop touches the discriminant at cells {touching}")
    result = np.eye(3, dtype=np.int64)
    for a, b in zip(path, path[1:]):
        if a != b and b not in complex_[a].faces and a not in complex_[b].faces:
            raise InputError(f"cells {a} and {b} are not incident")
        result = step_matrix(complex_, atlas, a, b) @ result
    return result


def loop_monodromy(base: BaseComplex, loop: Sequence[int], refinement: str = "dual") -> np.ndarray:
    """Tangent monodromy of a loop given by cell indices of a refinement of the base."""
    return path_monodromy(base.refinement(refinement), base.atlas, loop)


def spanning_transports(
    complex_: CellComplex, atlas: ChartAtlas, graph: nx.Graph, root: int
) -> Tuple[Dict[int, np.ndarray], List[Tuple[int, int]]]:
    """Transports from ``root`` along a BFS tree, and the edges left out of the tree."""
    transports = {root: np.eye(3, dtype=np.int64)}
    tree = set()
    for a, b in nx.bfs_edges(graph, root, sort_neighbors=sorted):
        transports[b] = step_matrix(complex_, atlas, a, b) @ transports[a]
        tree.add((min(a, b), max(a, b)))
    if len(transports) != graph.number_of_nodes():
        raise InputError("incidence graph is not connected")
    extra = sorted((min(a, b), max(a, b)) for a, b in graph.edges() if (min(a, b), max(a, b)) not in tree)
    return transports, extra


def fundamental_loops(complex_: CellComplex, atlas: ChartAtlas) -> List[Tuple[Tuple[int, int], np.ndarray]]:
    """Monodromy at the root of every loop closed by a non-tree edge."""
    graph = smooth_incidence_graph(complex_)
    root = min(graph.nodes)
    transports, extra = spanning_transports(complex_, atlas, graph, root)
    back = _inverse_transports(complex_, atlas, graph, root)
    loops = []
    for a, b in extra:
        matrix = back[b] @ step_matrix(complex_, atlas, a, b) @ transports[a]
        loops.append(((a, b), matrix))
    return loops


def _inverse_transports(
    complex_: CellComplex, atlas: ChartAtlas, graph: nx.Graph, root: int
) -> Dict[int, np.ndarray]:
    back = {root: np.eye(3, dtype=np.int64)}
    for a, b in nx.bfs_edges(graph, root, sort_neighbors=sorted):
        back[b] = back[a] @ step_matrix(complex_, atlas, b, a)
    return back


def global_permutation_rep(base: BaseComplex, side: Side, refinement: str = "dual") -> PermRep:
    """Torsion permutations of loops generating the fundamental group of the smooth locus."""
    complex_ = base.refinement(refinement)
    loops = fundamental_loops(complex_, base.atlas)
    generators = [torsion_action(matrix, side) for _, matrix in loops]
    labels = [f"loop{a}-{b}" for (a, b), _ in loops]
    logger.info(f"{len(loops)} fundamental loops in the {refinement} refinement")
    return PermRep(generators=generators, labels=labels, side=side, require_involutions=False)


@dataclass(frozen=True)
class VertexLoop:
    """A loop gamma_{ij,k} at a polytope vertex."""

    label: str
    i: int
    j: int
    k: int
    face: Tuple[int, int, int]
    path: Tuple[int, ...]
    d: Tuple[int, int, int]
    n: Tuple[int, int, int]
    matrix: np.ndarray


def _ray_targets(vertex: int) -> List[int]:
    return [b for b in range(5) if b != vertex]


def vertex_generators(base: BaseComplex, vertex: int = 0) -> List[VertexLoop]:
    """The twelve loops around the discriminant segments meeting the rays at a vertex.

    Rays are numbered 1..4 towards the other polytope vertices in index order;
    loop (ij, k) goes around the segment in face sigma_ij next to ray k and is
    oriented so that its monodromy is x -> x + <n_ij, x> d_k with n_ij the
    primitive covector along d_i x d_j.
    """
    skel = base.skeleton
    atlas = base.atlas
    complex_ = base.refinement("dual")
    v = skel.vertex_point[vertex]
    targets = _ray_targets(vertex)
    rays = {
        i + 1: np.array(atlas.tangent_coordinates(v, base.polytope.edge_step(vertex, b)), dtype=np.int64)
        for i, b in enumerate(targets)
    }
    loops = []
    for i, j in combinations(range(1, 5), 2):
        face = tuple(sorted((vertex, targets[i - 1], targets[j - 1])))
        f = skel.face_index(face)  # type: ignore[arg-type]
        lower, upper = skel.facets_of_face(f)
        n_ij = np.array(primitive(np.cross(rays[i], rays[j])), dtype=np.int64)
        for k in (i, j):
            b = targets[k - 1]
            chain = skel.polytope_edge_points[(min(vertex, b), max(vertex, b))]
            w = chain[1] if vertex < b else chain[-2]
            path = [
                complex_.index_of(("reg", v, f)),
                complex_.index_of(("facet", lower)),
                complex_.index_of(("reg", w, f)),
                complex_.index_of(("facet", upper)),
            ]
            path.append(path[0])
            matrix = path_monodromy(complex_, atlas, path)
            expected = np.eye(3, dtype=np.int64) + np.outer(rays[k], n_ij)
            if not np.array_equal(matrix, expected):
                path = path[::-1]
                matrix = path_monodromy(complex_, atlas, path)
            if not np.array_equal(matrix, expected):
                raise AuditError(
                    f"loop ({i}{j},{k}) has monodromy {matrix.tolist()}, "
                    f"expected {expected.tolist()}"
                )
            loops.append(
                VertexLoop(
                    label=f"{i}{j},{k}",
                    i=i,
                    j=j,
                    k=k,
                    face=face,  # type: ignore[arg-type]
                    path=tuple(path),
                    d=tuple(int(x) for x in rays[k]),  # type: ignore[arg-type]
                    n=tuple(int(x) for x in n_ij),  # type: ignore[arg-type]
                    matrix=matrix,
                )
            )
    return loops


def vertex_permutation_rep(base: BaseComplex, vertex: int = 0, side: Side = Side.F) -> PermRep:
    loops = vertex_generators(base, vertex)
    return PermRep(
        generators=[torsion_action(loop.matrix, side) for loop in loops],
        labels=[loop.label for loop in loops],
        side=side,
    )
