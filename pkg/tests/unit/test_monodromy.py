"""Unit tests for transvections, torsion permutations and orbit analysis."""

import numpy as np
import pytest

from apps.core.errors import InputError, TransvectionError
from apps.core.schemas import Side
from apps.monodromy.components import (
    boundary_euler,
    component_orbits,
    local_negative_edge_analysis,
    local_vertex_analysis,
)
from apps.monodromy.torsion import Permutation, PermRep, torsion_action
from apps.monodromy.transvection import (
    Transvection,
    dual_rep,
    exterior_square,
    is_unimodular,
    primitive,
    transvection,
)

pytestmark = pytest.mark.unit

# Rays at a vertex of the quintic polytope in its ray basis
RAYS = {1: (1, 0, 0), 2: (0, 1, 0), 3: (0, 0, 1), 4: (-1, -1, -1)}

GOLDEN = {
    (1, 2, 1): "(23)(47)",
    (1, 2, 2): "(47)(56)",
    (1, 3, 1): "(27)(34)",
    (1, 3, 3): "(16)(27)",
    (1, 4, 1): "(24)(37)",
    (1, 4, 4): "(15)(37)",
    (2, 3, 2): "(45)(67)",
    (2, 3, 3): "(12)(67)",
    (2, 4, 2): "(46)(57)",
    (2, 4, 4): "(13)(57)",
    (3, 4, 3): "(17)(26)",
    (3, 4, 4): "(17)(35)",
}


def ray_transvection(i: int, j: int, k: int) -> np.ndarray:
    n = primitive(np.cross(RAYS[i], RAYS[j]))
    return transvection(n, RAYS[k]).matrix


T12_1 = np.array([[1, 0, 1], [0, 1, 0], [0, 0, 1]])


class TestTransvection:
    def test_matrix_of_t12_1(self):
        assert np.array_equal(ray_transvection(1, 2, 1), T12_1)

    def test_pairing_must_vanish(self):
        with pytest.raises(TransvectionError):
            Transvection(d=(1, 0, 0), n=(1, 0, 0))

    def test_apply_and_inverse(self):
        t = transvection((0, 0, 1), (1, 0, 0))
        assert t.apply((0, 0, 1)).tolist() == [1, 0, 1]
        assert np.array_equal(t.matrix @ t.inverse().matrix, np.eye(3, dtype=np.int64))

    def test_dual_rep(self):
        assert dual_rep(T12_1).tolist() == [[1, 0, 0], [0, 1, 0], [-1, 0, 1]]
        assert np.array_equal(dual_rep(dual_rep(T12_1)), T12_1)
        assert np.array_equal(dual_rep(np.eye(3, dtype=np.int64)), np.eye(3))

    def test_dual_rep_needs_unimodular(self):
        with pytest.raises(TransvectionError):
            dual_rep(np.diag([2, 1, 1]))
        assert not is_unimodular(np.diag([2, 1, 1]))

    def test_exterior_square_is_cofactor(self):
        for key in GOLDEN:
            t = ray_transvection(*key)
            assert np.array_equal(exterior_square(t), dual_rep(t))

    def test_primitive(self):
        assert primitive((2, -4, 6)) == (1, -2, 3)
        with pytest.raises(TransvectionError):
            primitive((0, 0, 0))


class TestPermutation:
    def test_parse_and_print(self):
        p = Permutation.parse("(23)(47)")
        assert str(p) == "(23)(47)"
        assert p.is_involution()
        assert p.parity() == 0
        assert str(Permutation.identity()) == "()"

    def test_compose_applies_right_first(self):
        a = Permutation.parse("(12)")
        b = Permutation.parse("(23)")
        assert (a * b)(2) == 3
        assert (a * b)(3) == 1
        assert (a * a.inverse()) == Permutation.identity()

    def test_rejects_non_permutation(self):
        with pytest.raises(InputError):
            Permutation((0, 0, 1))

    def test_matrix_moves_basis_vectors(self):
        m = Permutation.parse("(01)", n=3).matrix()
        assert m.tolist() == [[0, 1, 0], [1, 0, 0], [0, 0, 1]]


class TestTorsionAction:
    @pytest.mark.parametrize("key, expected", sorted(GOLDEN.items()))
    def test_golden_table(self, key, expected):
        action = torsion_action(ray_transvection(*key), Side.F)
        assert action == Permutation.parse(expected)

    def test_identity(self):
        assert torsion_action(np.eye(3, dtype=np.int64), Side.F) == Permutation.identity()

    def test_every_action_fixes_origin_and_is_involution(self):
        for key in GOLDEN:
            for side in Side:
                action = torsion_action(ray_transvection(*key), side)
                assert action(0) == 0
                assert action.is_involution()

    def test_homomorphism(self):
        a = ray_transvection(1, 2, 1)
        b = ray_transvection(2, 3, 3)
        for side in Side:
            assert torsion_action(a @ b, side) == torsion_action(a, side) * torsion_action(b, side)

    def test_sides_differ(self):
        assert torsion_action(T12_1, Side.FDUAL) != torsion_action(T12_1, Side.F)


class TestOrbits:
    def test_quintic_generators_give_two_components(self):
        rep = PermRep([Permutation.parse(p) for p in GOLDEN.values()], side=Side.F)
        report = component_orbits(rep)
        assert report.partition() == [[0], [1, 2, 3, 4, 5, 6, 7]]
        assert report.count == 2

    def test_no_generators(self):
        report = component_orbits(PermRep([]))
        assert report.partition() == [[i] for i in range(8)]

    def test_negative_edge_model(self):
        gens = [Permutation.parse(p) for p in ("(56)(47)", "(45)(67)", "(56)(47)", "(45)(67)")]
        report = local_negative_edge_analysis(PermRep(gens))
        assert report.partition() == [[0], [1], [2], [3], [4, 5, 6, 7]]
        assert report.torus_components == 1
        eulers = {tuple(o.points): o.boundary_euler for o in report.orbits}
        assert eulers[(4, 5, 6, 7)] == 0
        assert all(v == 2 for k, v in eulers.items() if len(k) == 1)

    def test_negative_edge_needs_four_branch_points(self):
        gens = [Permutation.parse("(56)(47)"), Permutation.parse("(45)(67)")]
        with pytest.raises(InputError):
            local_negative_edge_analysis(PermRep(gens))

    def test_negative_edge_rejects_wrong_pattern(self):
        # two torus-boundary pieces
        gens = [Permutation.parse("(12)(34)")] * 4
        with pytest.raises(InputError):
            local_negative_edge_analysis(PermRep(gens))

    def test_positive_vertex_pattern(self):
        gens = [Permutation.parse(GOLDEN[k]) for k in ((1, 2, 1), (1, 3, 1), (1, 4, 1))]
        report = local_vertex_analysis(PermRep(gens))
        assert report.partition() == [[0], [1], [2, 3, 4, 7], [5], [6]]
        assert all(o.boundary_euler == 2 for o in report.orbits)

    def test_riemann_hurwitz(self):
        gens = [Permutation.parse("(56)(47)"), Permutation.parse("(45)(67)")] * 2
        rep = PermRep(gens)
        assert boundary_euler([4, 5, 6, 7], rep) == (8, 0)
        assert boundary_euler([1], rep) == (0, 2)

    def test_perm_rep_rejects_moving_origin(self):
        with pytest.raises(InputError):
            PermRep([Permutation.parse("(01)")])
