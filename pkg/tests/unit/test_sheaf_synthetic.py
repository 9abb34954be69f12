"""Cellular and Čech sheaves, cup products and beta on small simplicial complexes."""

import numpy as np
import pytest

from apps.core.errors import CoverError, InputError
from apps.core.gf2 import CohomologyBasis, vector_to_int
from apps.geometry.charts import ChartKey, ChartKind, TrivialAtlas
from apps.geometry.complexes import Cell, CellComplex, barycentric_subdivision, stellar_subdivide_edge
from apps.sheaf.cech import Cochain, beta_cocycle, cech_sheaf, cup_product, mu_dualize, stalk_product, star_cover
from apps.sheaf.cellular import sheaf_cohomology
from apps.sheaf.local_system import LocalSystemLabel as L
from apps.sheaf.local_system import build_local_system
from tests.fixtures.complexes import edge, random_cocycles, sheaf_on, sphere_complex, torus_complex

pytestmark = pytest.mark.unit

CHART = ChartKey(ChartKind.FACET, 0)


def cw_circle() -> CellComplex:
    """One vertex pair joined by two edges: regular, not simplicial."""
    cells = [
        Cell(0, 0, "vertex", ("v", 0), (), CHART),
        Cell(1, 0, "vertex", ("v", 1), (), CHART),
        Cell(2, 1, "edge", ("e", 0), (0, 1), CHART),
        Cell(3, 1, "edge", ("e", 1), (0, 1), CHART),
    ]
    return CellComplex(cells, "circle")


def refined(shape: str) -> CellComplex:
    """Complexes with constant coefficients for the randomized beta checks."""
    torus = torus_complex()
    if shape == "stellar":
        return stellar_subdivide_edge(torus, edge(torus, 0, 1))
    if shape == "barycentric":
        return barycentric_subdivision(torus)
    if shape == "sphere":
        return sphere_complex(2)
    return torus


class TestConstantCoefficients:
    def test_spheres(self, sphere3):
        assert sheaf_cohomology(sheaf_on(sphere3, L.CONST)) == [1, 0, 0, 1]
        assert sheaf_cohomology(sheaf_on(sphere_complex(2), L.CONST)) == [1, 0, 1]

    def test_torus(self, torus):
        assert sheaf_cohomology(sheaf_on(torus, L.CONST)) == [1, 2, 1]
        assert sheaf_cohomology(sheaf_on(torus, L.R1F)) == [3, 6, 3]
        assert sheaf_cohomology(sheaf_on(torus, L.COVER)) == [8, 16, 8]

    def test_regular_cw_complex(self):
        assert sheaf_cohomology(sheaf_on(cw_circle(), L.CONST)) == [1, 1]

    def test_subdivision_invariance(self, torus):
        fine = barycentric_subdivision(torus)
        assert fine.counts() == [42, 126, 84]
        assert sheaf_cohomology(sheaf_on(fine, L.CONST)) == [1, 2, 1]
        stellar = stellar_subdivide_edge(torus, edge(torus, 0, 1))
        assert stellar.counts() == [8, 24, 16]
        assert sheaf_cohomology(sheaf_on(stellar, L.R2F)) == [3, 6, 3]

    def test_threads_do_not_change_dims(self, torus):
        sheaf = sheaf_on(torus, L.R1F)
        assert sheaf.cohomology(threads=2) == sheaf.cohomology()

    def test_emit_matrices(self, torus, tmp_path):
        paths = sheaf_on(torus, L.CONST).emit_matrices(tmp_path)
        assert [p.name for p in paths] == ["const_torus7_d0.txt", "const_torus7_d1.txt"]
        assert paths[0].read_text().splitlines()[0] == "21 7"


class TestStarCover:
    def test_nerve_is_the_complex(self, torus):
        cover = star_cover(torus)
        assert len(cover.open_sets) == 7
        assert cover.nerve_counts == [7, 21, 14]

    def test_rejects_non_simplicial(self):
        with pytest.raises(CoverError):
            star_cover(cw_circle())

    def test_cech_sheaf_matches_cellular(self, torus):
        for label in (L.CONST, L.R1F, L.COVER):
            cech = cech_sheaf(build_local_system(label), torus, TrivialAtlas())
            assert cech.rule == "cech"
            assert sheaf_cohomology(cech) == sheaf_cohomology(sheaf_on(torus, label))

    def test_cech_sheaf_matches_cellular_under_stellar_moves(self, torus):
        rng = np.random.default_rng(20)
        complex_ = torus
        for _ in range(20):
            edges = complex_.cells_of_dim(1)
            complex_ = stellar_subdivide_edge(complex_, int(edges[rng.integers(len(edges))]))
            for label in (L.CONST, L.R1F):
                cech = cech_sheaf(build_local_system(label), complex_, TrivialAtlas())
                cellular = sheaf_on(complex_, label)
                assert sheaf_cohomology(cech) == sheaf_cohomology(cellular)
        assert complex_.counts()[0] == 27
        assert sheaf_cohomology(sheaf_on(complex_, L.R1F)) == [3, 6, 3]


class TestCochains:
    def test_unit_is_a_cocycle(self, torus):
        unit = Cochain.unit(sheaf_on(torus, L.CONST))
        assert unit.is_cocycle()
        assert unit.support == list(range(7))

    def test_unit_only_in_constant_sheaf(self, torus):
        with pytest.raises(InputError):
            Cochain.unit(sheaf_on(torus, L.R1F))

    def test_addition_needs_matching_sheaves(self, torus):
        a = Cochain.zero(sheaf_on(torus, L.CONST), 1)
        with pytest.raises(InputError):
            a + Cochain.zero(sheaf_on(torus, L.CONST), 1)
        with pytest.raises(InputError):
            a + Cochain.zero(a.sheaf, 0)

    def test_coboundary_of_vertex_indicator(self, triangle):
        sheaf = sheaf_on(triangle, L.CONST)
        c = Cochain.from_fibre_values(sheaf, 0, {0: [1]})
        assert c.coboundary().support == [edge(triangle, 0, 1), edge(triangle, 0, 2)]


class TestCupProduct:
    def test_stalk_products(self):
        assert stalk_product(L.R1F, L.R1F)[0] is L.R2F
        assert stalk_product(L.R1FDUAL, L.R2FDUAL)[0] is L.CONST
        assert stalk_product(L.CONST, L.COVER)[0] is L.COVER
        with pytest.raises(InputError):
            stalk_product(L.COVER, L.R1F)

    def test_unit_law(self, torus):
        const = sheaf_on(torus, L.CONST)
        unit = Cochain.unit(const)
        for a in random_cocycles(const, 1, 5, seed=3):
            assert cup_product(unit, a, const) == a
            assert cup_product(a, unit, const) == a

    def test_wedge_of_basis_vectors(self, triangle):
        r1, r2 = sheaf_on(triangle, L.R1F), sheaf_on(triangle, L.R2F)
        a = Cochain.from_fibre_values(r1, 1, {edge(triangle, 0, 1): [1, 0, 0]})
        b = Cochain.from_fibre_values(r1, 1, {edge(triangle, 1, 2): [0, 1, 0]})
        product = cup_product(a, b, r2)
        assert product.fibre_value(triangle.simplex((0, 1, 2))).tolist() == [0, 0, 1]
        assert cup_product(b, a, r2).is_zero()

    def test_torus_pairing(self, torus):
        const = sheaf_on(torus, L.CONST)
        complex_ = const.cochain_complex
        h1, h2 = CohomologyBasis(complex_, 1), CohomologyBasis(complex_, 2)
        a, b = (Cochain(const, 1, z) for z in h1.representatives)
        assert not h2.is_coboundary(cup_product(a, b, const).vector)
        assert h2.is_coboundary(cup_product(a, a, const).vector)

    def test_cyclic_rule_agrees_on_squares(self, torus):
        r1, r2 = sheaf_on(torus, L.R1F), sheaf_on(torus, L.R2F)
        for a in random_cocycles(r1, 1, 10, seed=11):
            assert cup_product(a, a, r2, cyclic=True) == cup_product(a, a, r2)

    def test_cyclic_rule_needs_degree_one(self, torus):
        const = sheaf_on(torus, L.CONST)
        unit = Cochain.unit(const)
        with pytest.raises(InputError):
            cup_product(unit, unit, const, cyclic=True)

    def test_target_must_match(self, torus):
        r1, const = sheaf_on(torus, L.R1F), sheaf_on(torus, L.CONST)
        a = Cochain.zero(r1, 1)
        with pytest.raises(InputError):
            cup_product(a, a, const)

    @pytest.mark.parametrize("label, square_label", [(L.CONST, L.CONST), (L.R1F, L.R2F)])
    def test_square_class_is_additive(self, label, square_label):
        complex_ = barycentric_subdivision(torus_complex())
        source, target = sheaf_on(complex_, label), sheaf_on(complex_, square_label)
        h2 = CohomologyBasis(target.cochain_complex, 2)

        def square_class(c):
            return h2.coordinates(cup_product(c, c, target).vector)

        cocycles = list(random_cocycles(source, 1, 12, seed=7))
        for a, b in zip(cocycles[::2], cocycles[1::2]):
            assert square_class(a + b) == square_class(a) ^ square_class(b)


class TestBeta:
    def test_annihilator_on_a_triangle(self, triangle):
        r2, r1 = sheaf_on(triangle, L.R2F), sheaf_on(triangle, L.R1F)
        alpha = Cochain.from_fibre_values(
            r2,
            1,
            {
                edge(triangle, 0, 1): [1, 0, 0],
                edge(triangle, 1, 2): [0, 1, 0],
                edge(triangle, 0, 2): [1, 1, 0],
            },
        )
        assert alpha.is_cocycle()
        assert beta_cocycle(alpha, r1).fibre_value(triangle.simplex((0, 1, 2))).tolist() == [0, 0, 1]

    def test_repeated_values_give_zero(self, triangle):
        r2, r1 = sheaf_on(triangle, L.R2F), sheaf_on(triangle, L.R1F)
        alpha = Cochain.from_fibre_values(
            r2, 1, {edge(triangle, 0, 1): [1, 0, 0], edge(triangle, 0, 2): [1, 0, 0]}
        )
        assert beta_cocycle(alpha, r1).is_zero()

    @pytest.mark.parametrize("shape", ["torus", "stellar", "barycentric", "sphere"])
    @pytest.mark.parametrize("seed", range(4))
    def test_beta_is_mirror_cup_square(self, shape, seed):
        complex_ = refined(shape)
        atlas = TrivialAtlas()
        r2, r1, r1dual, r2dual = (
            cech_sheaf(build_local_system(label), complex_, atlas)
            for label in (L.R2F, L.R1F, L.R1FDUAL, L.R2FDUAL)
        )
        for alpha in random_cocycles(r2, 1, 25, seed=seed):
            mirror = mu_dualize(alpha, 2, r1dual)
            square = mu_dualize(cup_product(mirror, mirror, r2dual), 2, r1)
            assert beta_cocycle(alpha, r1) == square

    @pytest.mark.parametrize("shape", ["torus", "stellar", "barycentric"])
    def test_beta_class_ignores_the_representative(self, shape):
        complex_ = refined(shape)
        atlas = TrivialAtlas()
        r2, r1 = (cech_sheaf(build_local_system(label), complex_, atlas) for label in (L.R2F, L.R1F))
        h2 = CohomologyBasis(r1.cochain_complex, 2)
        rng = np.random.default_rng(13)
        for alpha in random_cocycles(r2, 1, 10, seed=17):
            shift = Cochain(r2, 0, vector_to_int(rng.integers(0, 2, size=r2.cochain_dims[0])))
            moved = alpha + shift.coboundary()
            assert moved.is_cocycle()
            assert h2.coordinates(beta_cocycle(moved, r1).vector) == h2.coordinates(
                beta_cocycle(alpha, r1).vector
            )

    def test_beta_preconditions(self, triangle):
        r2, r1, r1dual = (sheaf_on(triangle, label) for label in (L.R2F, L.R1F, L.R1FDUAL))
        closed = Cochain.zero(r2, 1)
        with pytest.raises(InputError):
            beta_cocycle(closed, r1dual)
        with pytest.raises(InputError):
            beta_cocycle(Cochain.zero(r2, 0), r1)
        open_ = Cochain.from_fibre_values(r2, 1, {edge(triangle, 0, 1): [1, 0, 0]})
        with pytest.raises(InputError):
            beta_cocycle(open_, r1)


class TestMu:
    def test_coordinates_are_kept(self, torus):
        r1dual, r2 = sheaf_on(torus, L.R1FDUAL), sheaf_on(torus, L.R2F)
        for c in random_cocycles(r1dual, 1, 3, seed=5):
            moved = mu_dualize(c, 1, r2)
            assert moved.vector == c.vector and moved.sheaf is r2
            assert mu_dualize(moved, 2, r1dual) == c

    def test_errors(self, torus):
        r1, r2dual, const = (sheaf_on(torus, label) for label in (L.R1F, L.R2FDUAL, L.CONST))
        c = Cochain.zero(r1, 1)
        with pytest.raises(InputError):
            mu_dualize(c, 3, r2dual)
        with pytest.raises(InputError):
            mu_dualize(c, 2, r2dual)
        with pytest.raises(InputError):
            mu_dualize(c, 1, const)
        with pytest.raises(InputError):
            mu_dualize(c, 1, sheaf_on(sphere_complex(2), L.R2FDUAL))
        assert mu_dualize(c, 1, r2dual).is_zero()
