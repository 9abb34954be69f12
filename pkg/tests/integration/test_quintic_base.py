"""Integration tests on the quintic base: combinatorics, monodromy and flips."""

import dataclasses

import pytest

from apps.core.errors import FlipError, InputError
from apps.core.schemas import Side
from apps.geometry.base import (
    flip,
    legal_flips,
    load_base,
    save_base,
    to_base_file,
    validate_base,
)
from apps.geometry.discriminant import DeltaSign
from apps.monodromy.components import (
    component_orbits,
    euler_characteristic,
    local_negative_edge_analysis,
    local_vertex_analysis,
    negative_edge_rep,
    negative_vertex_rep,
)
from apps.monodromy.loops import global_permutation_rep, vertex_generators
from apps.monodromy.torsion import torsion_action

pytestmark = pytest.mark.integration

GOLDEN = {
    "12,1": "(23)(47)",
    "12,2": "(47)(56)",
    "13,1": "(27)(34)",
    "13,3": "(16)(27)",
    "14,1": "(24)(37)",
    "14,4": "(15)(37)",
    "23,2": "(45)(67)",
    "23,3": "(12)(67)",
    "24,2": "(46)(57)",
    "24,4": "(13)(57)",
    "34,3": "(17)(26)",
    "34,4": "(17)(35)",
}


class TestCombinatorics:
    def test_polytope_and_discriminant(self, quintic_base):
        assert quintic_base.polytope.cell_counts() == {0: 5, 1: 10, 2: 10, 3: 5}
        graph = quintic_base.discriminant
        assert graph.count(DeltaSign.NEGATIVE) == 250
        assert graph.count(DeltaSign.POSITIVE) == 50
        assert graph.count(DeltaSign.BIVALENT) == 300
        assert euler_characteristic(graph) == -200

    def test_refinement_counts(self, quintic_base, dual_complex):
        assert dual_complex.counts() == [305, 510, 210, 5]
        assert quintic_base.refinement("simplicial").counts() == [410, 2210, 3600, 1800]
        assert dual_complex.euler_characteristic() == 0
        with pytest.raises(InputError):
            quintic_base.refinement("cubical")

    def test_validation_passes(self, quintic_base):
        report = validate_base(quintic_base)
        assert report.passed, report.failed()
        assert {c.name for c in report.checks} >= {"cell_counts", "sphere_cohomology", "euler"}

    def test_simplicity_at_signed_vertices(self, quintic_base):
        report = validate_base(quintic_base)
        simplicity = next(c for c in report.checks if c.name == "simplicity")
        assert simplicity.passed

    def test_deleted_top_cell_is_not_a_sphere(self, quintic_base, dual_complex):
        top = dual_complex.cells_of_dim(3)[0]
        punctured = dual_complex.without_cells([top])
        report = validate_base(quintic_base, complex_=punctured)
        assert not report.passed
        assert "sphere_cohomology" in report.failed()

    def test_perturbed_transvection_is_rejected(self, quintic_base):
        graph = quintic_base.discriminant
        edge = graph.edges[0]
        k = next(i for i, x in enumerate(edge.n) if x != 0)
        bad_d = tuple(1 if i == k else 0 for i in range(3))
        perturbed = graph.replace_edge(0, dataclasses.replace(edge, d=bad_d))
        assert perturbed.edges[0].pairing != 0
        report = validate_base(quintic_base, discriminant=perturbed)
        assert report.failed() == ["transvection"]


class TestMonodromy:
    def test_vertex_generators_match_table(self, quintic_base):
        loops = vertex_generators(quintic_base, 0)
        assert [loop.label for loop in loops] == list(GOLDEN)
        for loop in loops:
            assert str(torsion_action(loop.matrix, Side.F)) == GOLDEN[loop.label]

    @pytest.mark.parametrize("side", list(Side))
    def test_two_global_components(self, quintic_base, side):
        report = component_orbits(global_permutation_rep(quintic_base, side))
        assert report.partition() == [[0], [1, 2, 3, 4, 5, 6, 7]]

    @pytest.mark.parametrize("side", list(Side))
    def test_negative_edge_has_one_solid_torus(self, quintic_base, side):
        rep = negative_edge_rep(quintic_base, (0, 1, 2), (7, 8), side)
        report = local_negative_edge_analysis(rep)
        assert report.count == 5
        assert report.torus_components == 1

    def test_negative_vertex(self, quintic_base):
        report = local_vertex_analysis(negative_vertex_rep(quintic_base, 0, Side.FDUAL))
        assert sorted(o.degree for o in report.orbits) == [1, 1, 1, 1, 4]
        assert all(o.boundary_euler == 2 for o in report.orbits)

    def test_boundary_edge_is_not_a_negative_edge(self, quintic_base):
        with pytest.raises(InputError):
            negative_edge_rep(quintic_base, (0, 1, 2), (0, 1), Side.F)


class TestFlips:
    def test_flip_keeps_the_base_valid(self, quintic_base):
        assert (7, 8) in legal_flips(quintic_base, (0, 1, 2))
        flipped = flip(quintic_base, (2, 1, 0), (8, 7))
        assert flipped.triangulation((0, 1, 2)) != quintic_base.triangulation((0, 1, 2))
        assert euler_characteristic(flipped.discriminant) == -200
        assert validate_base(flipped).passed

    def test_boundary_flip(self, quintic_base):
        with pytest.raises(FlipError):
            flip(quintic_base, (0, 1, 2), (0, 1))

    def test_round_trip_through_file(self, quintic_base, tmp_path):
        for name in ("base.json", "base.yaml"):
            path = save_base(quintic_base, tmp_path / name)
            loaded = load_base(path)
            assert to_base_file(loaded) == to_base_file(quintic_base)

    def test_bad_base_file(self, tmp_path):
        path = tmp_path / "base.json"
        path.write_text('{"vertices": [[1, 0, 0, 0]], "faces": []}')
        with pytest.raises(InputError):
            load_base(path)
