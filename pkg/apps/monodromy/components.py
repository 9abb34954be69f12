"""Orbits of torsion labels, local pieces of the real locus, Euler characteristics."""

import logging
from typing import Dict, List, Tuple

import networkx as nx

from ..core.errors import InputError
from ..core.schemas import ComponentReport, OrbitInfo, Side
from ..geometry.base import BaseComplex
from ..geometry.discriminant import DeltaEdge, DeltaSign, DiscriminantGraph
from ..geometry.polytope import Face
from ..geometry.skeleton import PointPair
from ..geometry.triangulation import EdgeKey
from .torsion import PermRep, torsion_action
from .transvection import Transvection

logger = logging.getLogger(__name__)


def _orbits(rep: PermRep) -> List[List[int]]:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(rep.points)))
    for g in rep.generators:
        graph.add_edges_from((i, g(i)) for i in range(len(g)) if g(i) != i)
    return sorted(sorted(c) for c in nx.connected_components(graph))


def component_orbits(rep: PermRep) -> ComponentReport:
    """Orbit partition of the labels: one orbit per connected component of the real locus."""
    orbits = []
    for orbit in _orbits(rep):
        branch = [
            label for label, g in zip(rep.labels, rep.generators) if any(g(i) != i for i in orbit)
        ]
        orbits.append(OrbitInfo(points=orbit, degree=len(orbit), branch_points=branch))
    return ComponentReport(side=rep.side, orbits=orbits)


def boundary_euler(orbit: List[int], rep: PermRep) -> Tuple[int, int]:
    """Riemann-Hurwitz over a 2-sphere with one branch point per generator.

    Returns (ramification, Euler characteristic of the covering surface).
    """
    ramification = sum(g.ramification_within(orbit) for g in rep.generators)
    return ramification, 2 * len(orbit) - ramification


def local_vertex_analysis(rep: PermRep) -> ComponentReport:
    """Orbits over a ball around a Delta vertex with boundary Euler characteristics."""
    report = component_orbits(rep)
    for info in report.orbits:
        info.ramification, info.boundary_euler = boundary_euler(info.points, rep)
    return report


def local_negative_edge_analysis(rep: PermRep) -> ComponentReport:
    """Pieces of the real locus over a ball around a segment joining two negative vertices.

    The ball boundary meets Delta in four points. Exactly one piece has torus
    boundary (a solid torus); all others have sphere boundary.
    """
    if len(rep) != 4:
        raise InputError(f"negative edge model needs four boundary branch points, got {len(rep)}")
    report = local_vertex_analysis(rep)
    eulers = [info.boundary_euler for info in report.orbits]
    tori = eulers.count(0)
    if tori != 1 or any(e not in (0, 2) for e in eulers):
        raise InputError(
            f"monodromy {[str(g) for g in rep.generators]} does not match the negative edge model "
            f"(boundary Euler characteristics {eulers})"
        )
    report.torus_components = tori
    return report


def euler_characteristic(graph: DiscriminantGraph) -> int:
    """Sum of singular-fibre Euler characteristics: +1 per positive, -1 per negative vertex."""
    unsigned = [v.key for v in graph.vertices if v.sign is None and graph.degree(v.index) == 3]
    if unsigned:
        raise InputError(f"unsigned trivalent vertices: {unsigned[:5]}")
    return graph.count(DeltaSign.POSITIVE) - graph.count(DeltaSign.NEGATIVE)


# Local representations read off the discriminant


def _legs_rep(
    base: BaseComplex, legs: List[DeltaEdge], point: int, side: Side, labels: List[str]
) -> PermRep:
    atlas = base.atlas
    generators = []
    for leg in legs:
        t = Transvection(
            d=tuple(int(x) for x in atlas.tangent_coordinates(point, leg.d4)),  # type: ignore[arg-type]
            n=tuple(int(x) for x in atlas.covector_coordinates(point, leg.n4)),  # type: ignore[arg-type]
        )
        generators.append(torsion_action(t.matrix, side))
    return PermRep(generators=generators, labels=labels, side=side)


def _incident_legs(graph: DiscriminantGraph, key: Tuple) -> List[DeltaEdge]:
    vertex = graph.vertex(key)
    return [graph.edges[e] for e in graph.incident(vertex.index)]


def negative_edge_rep(base: BaseComplex, face: Face, edge: EdgeKey, side: Side) -> PermRep:
    """Monodromy around the four legs leaving the segment dual to an interior edge."""
    graph = base.discriminant
    skel = base.skeleton
    key = base.global_edge(face, edge)
    f = skel.face_index(face)
    triangles = skel.triangle_containing(key, f)
    if len(triangles) != 2:
        raise InputError(f"edge {edge} of face {face} is not an interior edge")
    p, q = key
    legs_by_edge: Dict[PointPair, DeltaEdge] = {}
    for tri in triangles:
        if graph.vertex(("neg", tri)).sign is not DeltaSign.NEGATIVE:
            raise InputError(f"triangle {tri} does not carry a negative vertex")
        for leg in _incident_legs(graph, ("neg", tri)):
            if leg.unit_edge != key:
                legs_by_edge[leg.unit_edge] = leg
    r, s = (next(x for x in skel.triangles[t].points if x not in key) for t in triangles)

    def pair(a: int, b: int) -> PointPair:
        return (a, b) if a < b else (b, a)

    order = [pair(p, r), pair(q, r), pair(q, s), pair(p, s)]
    legs = [legs_by_edge[e] for e in order]
    return _legs_rep(base, legs, p, side, [f"y{i}" for i in range(1, 5)])


def positive_vertex_rep(base: BaseComplex, unit_edge: PointPair, side: Side) -> PermRep:
    """Monodromy around the three legs at the positive vertex on a boundary unit edge."""
    key = (min(unit_edge), max(unit_edge))
    try:
        legs = _incident_legs(base.discriminant, ("pos", key))
    except KeyError:
        raise InputError(f"{unit_edge} is not a unit edge on a polytope edge")
    legs.sort(key=lambda leg: leg.face)
    return _legs_rep(base, legs, key[0], side, [f"face{leg.face}" for leg in legs])


def negative_vertex_rep(base: BaseComplex, triangle: int, side: Side) -> PermRep:
    """Monodromy around the three legs at the negative vertex of a unit triangle."""
    try:
        legs = _incident_legs(base.discriminant, ("neg", triangle))
    except KeyError:
        raise InputError(f"no unit triangle with index {triangle}")
    legs.sort(key=lambda leg: leg.unit_edge)
    point = base.skeleton.triangles[triangle].points[0]
    return _legs_rep(base, legs, point, side, [f"edge{leg.unit_edge}" for leg in legs])


def summarize_components(report: ComponentReport) -> Dict[str, int]:
    eulers = [info.boundary_euler for info in report.orbits if info.boundary_euler is not None]
    return {
        "components": report.count,
        "torus_boundaries": eulers.count(0),
        "sphere_boundaries": eulers.count(2),
    }

