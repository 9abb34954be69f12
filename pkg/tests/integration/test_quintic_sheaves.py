"""Sheaf cohomology, the long exact sequence and the mirror square on the quintic base."""

from pathlib import Path

import pytest

from apps.core.errors import CoverError
from apps.core.schemas import Side
from apps.mirror.square import load_intersection_form, square_report
from apps.sheaf.cech import cech_sheaf, star_cover
from apps.sheaf.cellular import pushforward_sheaf, sheaf_cohomology
from apps.sheaf.les import assemble_les, build_les, square_comparison
from apps.sheaf.local_system import LocalSystemLabel as L
from apps.sheaf.local_system import build_local_system

pytestmark = pytest.mark.integration


def cohomology(base, label, refinement="dual"):
    return sheaf_cohomology(pushforward_sheaf(build_local_system(label, base), base, refinement))


class TestPushforwards:
    def test_constant_sheaf_is_a_sphere(self, quintic_base):
        assert cohomology(quintic_base, L.CONST) == [1, 0, 0, 1]

    @pytest.mark.parametrize(
        "label, expected",
        [(L.COVER, [2, 29, 29, 2]), (L.COVERDUAL, [2, 101, 101, 2])],
    )
    def test_branched_cover(self, quintic_base, label, expected):
        assert cohomology(quintic_base, label) == expected

    def test_first_cohomology_of_r1(self, quintic_base):
        assert cohomology(quintic_base, L.R1F)[1] == 1
        assert cohomology(quintic_base, L.R1FDUAL)[1] == 101

    @pytest.mark.parametrize("label", [L.COVER, L.COVERDUAL, L.R1F, L.R1FDUAL])
    def test_refinement_does_not_change_cohomology(self, quintic_base, label):
        assert cohomology(quintic_base, label, "quad") == cohomology(quintic_base, label, "dual")

    def test_star_cover_needs_simplicial(self, dual_complex):
        with pytest.raises(CoverError):
            star_cover(dual_complex)

    @pytest.mark.slow
    def test_cech_agrees_with_cellular(self, quintic_base):
        complex_ = quintic_base.refinement("simplicial")
        for label in (L.CONST, L.R1F):
            cech = cech_sheaf(build_local_system(label), complex_, quintic_base.atlas)
            assert sheaf_cohomology(cech) == cohomology(quintic_base, label, "simplicial")


class TestLongExactSequence:
    def test_side_f(self, quintic_base):
        report = assemble_les(quintic_base, Side.F)
        assert report.exact and report.alternating_sum == 0
        assert report.beta_rank == 73 and report.beta_kernel == 28
        assert report.betti == [2, 29, 29, 2]
        assert report.splitting_holds
        assert report.representative_checks == 4

    def test_representative_checks_follow_the_seed(self, quintic_base):
        les = build_les(quintic_base, Side.F)
        for seed in (0, 1, 2):
            assert les.check_representatives(1, 3, seed=seed) == 3
        assert les.check_representatives(3, 3) == 0

    def test_side_fdual(self, quintic_base):
        report = assemble_les(quintic_base, Side.FDUAL, check_splitting=False)
        assert report.beta_kernel == 0
        assert report.betti == [2, 101, 101, 2]
        assert report.splitting_holds is None

    @pytest.mark.slow
    def test_beta_is_the_mirror_square(self, quintic_base):
        comparison = square_comparison(quintic_base, Side.F)
        assert comparison.equal
        assert (comparison.rank, comparison.kernel) == (73, 28)


MIRROR_QUINTIC_FORM = Path(__file__).resolve().parents[1] / "fixtures" / "forms" / "mirror_quintic.yaml"


def test_external_mirror_form_matches_beta(quintic_base):
    if not MIRROR_QUINTIC_FORM.exists():
        pytest.skip(f"no intersection form at {MIRROR_QUINTIC_FORM}")
    report = square_report(load_intersection_form(MIRROR_QUINTIC_FORM))
    les = assemble_les(quintic_base, Side.F, check_splitting=False)
    assert report.dim == 101
    assert (report.rank, report.kernel) == (les.beta_rank, les.beta_kernel)
