"""Unit tests for intersection forms and the squaring map."""

from itertools import combinations_with_replacement, permutations, product

import numpy as np
import pytest

from apps.core.errors import DimensionMismatchError, FormError, HypothesisError
from apps.core.schemas import FormFile, HypothesisFlags, Route, Side
from apps.mirror.square import (
    IntersectionForm,
    betti_via_square,
    delta_criterion,
    form_from_file,
    load_form,
    load_intersection_form,
    square_kernel,
    square_matrix,
    square_report,
)

pytestmark = pytest.mark.unit

BOTH = HypothesisFlags(mirror_simply_connected=True, rank_one_torsion_free=True)


def two_class_form():
    return form_from_file(FormFile(dim=2, entries=[[1, 1, 1, 1], [1, 1, 2, 1]]), name="two")


def random_form(r: int, rng: np.random.Generator) -> IntersectionForm:
    t = np.zeros((r, r, r), dtype=np.int64)
    for i, j, k in combinations_with_replacement(range(r), 3):
        value = int(rng.integers(-6, 7))
        for a, b, c in set(permutations((i, j, k))):
            t[a, b, c] = value
    return IntersectionForm(tensor=t, name=f"random{r}")


def random_unimodular(r: int, rng: np.random.Generator, moves: int = 12) -> np.ndarray:
    """A product of elementary column operations and sign changes."""
    u = np.eye(r, dtype=np.int64)
    for _ in range(moves):
        i, j = rng.integers(r, size=2)
        if i == j:
            u[:, i] *= -1
        else:
            u[:, i] += int(rng.choice([-1, 1])) * u[:, j]
    return u


class TestPresets:
    def test_quintic(self):
        form = load_form("quintic")
        assert form.dim == 1 and form.basis == ("H",)
        assert form.dbar_cube == 5
        report = square_report(form)
        assert (report.rank, report.kernel, report.delta) == (1, 0, 0)

    def test_even_cube(self):
        report = square_report(load_form("cube4"))
        assert (report.rank, report.kernel, report.delta) == (0, 1, 1)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormError):
            load_form(str(tmp_path / "absent.yaml"))

    def test_json_file(self, tmp_path):
        path = tmp_path / "line.json"
        path.write_text('{"dim": 1, "entries": [[1, 1, 1, 3]]}')
        form = load_intersection_form(path)
        assert form.name == "line" and form.cube([1]) == 3

    def test_unparseable_file(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("dim: 1\nentries: [[1, 1]]\n")
        with pytest.raises(FormError):
            load_intersection_form(path)


class TestForms:
    def test_symmetric_closure(self):
        form = two_class_form()
        assert form((1, 0), (0, 1), (1, 0)) == 1
        assert form((0, 1), (0, 1), (0, 1)) == 0

    def test_conflicting_entries(self):
        with pytest.raises(FormError):
            form_from_file(FormFile(dim=2, entries=[[1, 1, 2, 1], [2, 1, 1, 3]]))

    def test_entry_out_of_range(self):
        with pytest.raises(FormError):
            form_from_file(FormFile(dim=1, entries=[[1, 1, 2, 1]]))

    def test_asymmetric_tensor(self):
        t = np.zeros((2, 2, 2), dtype=np.int64)
        t[0, 0, 1] = 1
        with pytest.raises(FormError):
            IntersectionForm(tensor=t)

    def test_dbar_cube_is_checked(self):
        with pytest.raises(FormError):
            form_from_file(FormFile(dim=1, entries=[[1, 1, 1, 5]], Dbar=[1], Dbar_cube=4))

    def test_change_of_basis(self):
        flipped = load_form("quintic").change_basis(np.array([[-1]]))
        assert flipped.cube([1]) == -5
        assert flipped.dbar == (-1,) and flipped.dbar_cube == 5
        with pytest.raises(FormError):
            load_form("quintic").change_basis(np.array([[2]]))


class TestSquare:
    def test_square_matrix_of_two_class_form(self):
        form = two_class_form()
        assert square_matrix(form).to_dense().tolist() == [[1, 0], [1, 0]]
        assert square_kernel(form) == 1

    @pytest.mark.parametrize("r", [1, 2, 3, 5, 8, 10])
    def test_squaring_is_linear_mod_two(self, r):
        form = random_form(r, np.random.default_rng(r))
        m = square_matrix(form).to_dense().astype(np.int64)
        vectors = np.array(list(product((0, 1), repeat=r)), dtype=np.int64)
        squares = np.einsum("ijk,ni,nj->nk", form.tensor, vectors, vectors) % 2
        assert np.array_equal(squares, (vectors @ m.T) % 2)

    @pytest.mark.parametrize("seed", range(6))
    def test_rank_survives_unimodular_change_of_basis(self, seed):
        rng = np.random.default_rng(seed)
        r = int(rng.integers(2, 7))
        form = random_form(r, rng)
        u = random_unimodular(r, rng)
        rebased = form.change_basis(u)
        assert rebased.cube(np.ones(r, dtype=np.int64)) == form.cube(u @ np.ones(r, dtype=np.int64))
        assert square_report(rebased).rank == square_report(form).rank
        assert square_kernel(rebased) == square_kernel(form)

    def test_delta(self):
        assert delta_criterion(4) == 1
        assert delta_criterion(5) == 0
        assert delta_criterion(-2) == 1

    def test_rank_one_route(self):
        report = betti_via_square(101, load_form("quintic"), BOTH, Side.FDUAL, expected_dim=1)
        assert report.route is Route.SQUARE
        assert report.betti == [2, 101, 101, 2]
        assert report.delta == 0

    def test_kernel_route(self):
        flags = HypothesisFlags(mirror_simply_connected=True)
        report = betti_via_square(29, two_class_form(), flags, Side.F)
        assert report.betti == [2, 30, 30, 2]
        assert report.kernel_square == 1 and report.delta is None

    def test_needs_simply_connected_mirror(self):
        with pytest.raises(HypothesisError):
            betti_via_square(101, load_form("quintic"))
        with pytest.raises(HypothesisError):
            betti_via_square(101, load_form("quintic"), HypothesisFlags(rank_one_torsion_free=True))

    def test_rank_one_flag_needs_rank_one(self):
        with pytest.raises(HypothesisError):
            betti_via_square(29, two_class_form(), BOTH)

    def test_expected_dimension(self):
        with pytest.raises(DimensionMismatchError):
            betti_via_square(101, load_form("quintic"), BOTH, Side.FDUAL, expected_dim=2)
