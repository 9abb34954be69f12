"""Unit tests for GF(2) linear algebra and cochain complexes."""

import numpy as np
import pytest

from apps.core.errors import ComplexError, DimensionMismatchError, InputError
from apps.core.gf2 import (
    CohomologyBasis,
    GF2ChainComplex,
    GF2Matrix,
    cohomology_dims,
    dense_inverse,
    dense_matmul,
    dense_nullspace,
    dense_rank,
    dense_solve,
    image_vectors,
    int_to_vector,
    kernel_vectors,
    left_inverse,
    quotient_frame,
    rank,
    solve,
    vector_to_int,
)

pytestmark = pytest.mark.unit


def _oracle_rank(a: np.ndarray) -> int:
    """Gaussian elimination on plain Python lists."""
    rows = [list(map(int, r)) for r in a]
    n_cols = a.shape[1] if a.ndim == 2 else 0
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [x ^ y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def test_pack_unpack():
    assert vector_to_int([1, 0, 1, 1]) == 0b1101
    assert int_to_vector(0b1101, 4).tolist() == [1, 0, 1, 1]
    with pytest.raises(DimensionMismatchError):
        int_to_vector(0b10000, 4)


def test_rank_agrees_with_oracle_on_random_matrices():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n_rows, n_cols = rng.integers(0, 12, size=2)
        a = rng.integers(0, 2, size=(n_rows, n_cols)).astype(np.uint8)
        expected = _oracle_rank(a)
        m = GF2Matrix.from_dense(a)
        assert rank(m) == expected
        assert dense_rank(a) == expected
        kernel = kernel_vectors(m)
        assert len(kernel) == n_cols - expected
        assert all(m.matvec(z) == 0 for z in kernel)


def test_matmul_matches_dense():
    rng = np.random.default_rng(7)
    a = rng.integers(0, 2, size=(5, 7)).astype(np.uint8)
    b = rng.integers(0, 2, size=(7, 4)).astype(np.uint8)
    product = GF2Matrix.from_dense(a) @ GF2Matrix.from_dense(b)
    assert np.array_equal(product.to_dense(), dense_matmul(a, b))


def test_transpose_and_stacking():
    m = GF2Matrix.from_dense([[1, 0, 1], [0, 1, 1]])
    assert m.T.to_dense().tolist() == [[1, 0], [0, 1], [1, 1]]
    assert m.vstack(GF2Matrix.identity(3)).shape == (5, 3)
    assert m.hstack(GF2Matrix.zeros(2, 2)).shape == (2, 5)
    with pytest.raises(DimensionMismatchError):
        m.vstack(GF2Matrix.identity(2))


def test_text_format(tmp_path):
    m = GF2Matrix.from_dense([[1, 0, 1], [0, 0, 1]])
    assert m.to_text() == "2 3\n101\n001\n"
    path = tmp_path / "d0.txt"
    m.dump(path)
    assert GF2Matrix.load(path).to_dense().tolist() == m.to_dense().tolist()
    with pytest.raises(InputError):
        GF2Matrix.from_text("2 3\n101\n")
    with pytest.raises(InputError):
        GF2Matrix.from_text("1 2\n12\n")


def test_solve_and_image():
    m = GF2Matrix.from_dense([[1, 1, 0], [0, 1, 1]])
    x = solve(m, 0b11)
    assert x is not None and m.matvec(x) == 0b11
    singular = GF2Matrix.from_dense([[1, 1], [1, 1]])
    assert solve(singular, 0b01) is None
    assert len(image_vectors(singular)) == 1


def test_dense_helpers():
    a = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    null = dense_nullspace(a)
    assert null.shape == (3, 1)
    assert not dense_matmul(a, null).any()
    x = dense_solve(a, np.array([1, 0]))
    assert x is not None and dense_matmul(a, x.reshape(-1, 1)).reshape(-1).tolist() == [1, 0]
    t = np.array([[1, 0, 1], [0, 1, 0], [0, 0, 1]], dtype=np.uint8)
    assert np.array_equal(dense_matmul(t, dense_inverse(t)), np.eye(3, dtype=np.uint8))
    with pytest.raises(DimensionMismatchError):
        dense_inverse(np.ones((2, 2), dtype=np.uint8))


def test_left_inverse_and_quotient_frame():
    basis = np.array([[1, 0], [1, 1], [0, 1]], dtype=np.uint8)
    assert np.array_equal(dense_matmul(left_inverse(basis), basis), np.eye(2, dtype=np.uint8))
    projection, section = quotient_frame(basis)
    assert projection.shape == (1, 3) and section.shape == (3, 1)
    assert not dense_matmul(projection, basis).any()
    assert dense_matmul(projection, section).tolist() == [[1]]


def test_chain_complex_rejects_nonzero_square():
    d0 = GF2Matrix.from_dense([[1], [1]])
    d1 = GF2Matrix.from_dense([[1, 0]])
    with pytest.raises(ComplexError):
        GF2ChainComplex([1, 2, 1], [d0, d1])


def test_chain_complex_shapes():
    with pytest.raises(DimensionMismatchError):
        GF2ChainComplex([1, 2], [GF2Matrix.zeros(3, 1)])


def test_circle_cohomology_with_threads():
    # two vertices, two edges
    d0 = GF2Matrix.from_dense([[1, 1], [1, 1]])
    complex_ = GF2ChainComplex([2, 2], [d0])
    assert cohomology_dims(complex_) == [1, 1]
    assert cohomology_dims(complex_, threads=2) == [1, 1]


def test_cohomology_basis_coordinates():
    d0 = GF2Matrix.from_dense([[1, 1], [1, 1]])
    complex_ = GF2ChainComplex([2, 2], [d0])
    basis = CohomologyBasis(complex_, 1)
    assert basis.dim == 1
    assert basis.is_coboundary(0b11)
    assert basis.coordinates(0b01) == basis.coordinates(0b10) == 1
