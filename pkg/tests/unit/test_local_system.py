"""Unit tests for mod-2 local systems and their fibre maps."""

import numpy as np
import pytest

from apps.core.errors import InputError
from apps.core.gf2 import as_gf2, dense_matmul, dense_rank
from apps.core.schemas import Side
from apps.monodromy.torsion import Permutation, torsion_action
from apps.monodromy.transvection import dual_rep
from apps.sheaf.local_system import (
    QUOTIENT_PROJECTION,
    QUOTIENT_SECTION,
    SIDE_LABELS,
    LocalSystemLabel,
    build_local_system,
    constant_subspace,
    fibre_inclusion,
    fibre_projection,
    splitting_projection,
)

pytestmark = pytest.mark.unit

T12_1 = np.array([[1, 0, 1], [0, 1, 0], [0, 0, 1]])
T34_4 = np.eye(3, dtype=np.int64) + np.outer((-1, -1, -1), (1, -1, 0))


def test_tangent_and_cotangent_transport():
    assert np.array_equal(build_local_system("R1f").transport(T12_1), as_gf2(T12_1))
    assert np.array_equal(build_local_system("R1fdual").transport(T12_1), as_gf2(dual_rep(T12_1)))
    assert np.array_equal(build_local_system("R2f").transport(T12_1), as_gf2(dual_rep(T12_1)))
    assert np.array_equal(build_local_system("R2fdual").transport(T12_1), as_gf2(T12_1))


def test_cover_loop_is_permutation_matrix():
    cover = build_local_system(LocalSystemLabel.COVER)
    assert np.array_equal(cover.transport(T12_1), Permutation.parse("(23)(47)").matrix())
    coverdual = build_local_system(LocalSystemLabel.COVERDUAL)
    assert np.array_equal(coverdual.transport(T12_1), torsion_action(T12_1, Side.FDUAL).matrix())


def test_const_and_quotient():
    assert build_local_system("const").transport(T12_1).tolist() == [[1]]
    quotient = build_local_system("quotient")
    assert quotient.rank == 6
    cover = build_local_system("cover").transport(T34_4)
    expected = dense_matmul(dense_matmul(QUOTIENT_PROJECTION, cover), QUOTIENT_SECTION)
    assert np.array_equal(quotient.transport(T34_4), expected)


def test_unknown_label():
    with pytest.raises(InputError):
        build_local_system("R3f")


def test_transport_is_cached_and_read_only():
    system = build_local_system("R1f")
    first = system.transport(T12_1)
    assert system.transport(T12_1.copy()) is first
    with pytest.raises(ValueError):
        first[0, 0] = 0


def test_label_sides():
    assert LocalSystemLabel.CONST.side is None
    assert LocalSystemLabel.R2FDUAL.side is Side.FDUAL
    assert LocalSystemLabel.QUOTIENT.side is Side.F


@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("matrix", [T12_1, T34_4])
def test_fibre_maps_are_equivariant(side, matrix):
    r1_label, _, r2_label, cover_label = SIDE_LABELS[side]
    cover = build_local_system(cover_label).transport(matrix)
    r1 = build_local_system(r1_label).transport(matrix)
    r2 = build_local_system(r2_label).transport(matrix)
    inclusion, projection = fibre_inclusion(), fibre_projection()
    assert np.array_equal(dense_matmul(cover, inclusion), dense_matmul(inclusion, r1))
    assert np.array_equal(dense_matmul(projection, cover), dense_matmul(r2, projection))


def test_short_exact_fibre_sequence():
    iota = dense_matmul(QUOTIENT_PROJECTION, fibre_inclusion())
    phi = dense_matmul(fibre_projection(), QUOTIENT_SECTION)
    assert iota.shape == (6, 3) and phi.shape == (3, 6)
    assert not dense_matmul(phi, iota).any()
    assert dense_rank(iota) == 3
    # the splitting projection is invertible on <1_{u0}, 1>
    assert dense_matmul(splitting_projection(), constant_subspace()).tolist() == [[1, 0], [0, 1]]
