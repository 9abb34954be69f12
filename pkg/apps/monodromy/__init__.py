"""Monodromy of the affine structure and its action on fibre 2-torsion."""

from .components import (
    component_orbits,
    euler_characteristic,
    local_negative_edge_analysis,
    local_vertex_analysis,
    negative_edge_rep,
    negative_vertex_rep,
    positive_vertex_rep,
)
from .loops import global_permutation_rep, loop_monodromy, vertex_generators, vertex_permutation_rep
from .torsion import TORSION_POINTS, Permutation, PermRep, torsion_action
from .transvection import Transvection, dual_rep, exterior_square, transvection
