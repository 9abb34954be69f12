"""Exact linear algebra over GF(2) and cochain-complex cohomology.

Large sparse matrices store each row as a Python ``int`` whose bit ``j`` is the
entry in column ``j``; elimination is XOR on those ints with pivots keyed by
the lowest set bit. Small dense matrices (stalk frames, transports) use numpy
``uint8`` arrays and the ``dense_*`` helpers at the bottom of this module.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ComplexError, DimensionMismatchError, InputError

logger = logging.getLogger(__name__)


def iter_bits(x: int) -> Iterator[int]:
    """Yield the indices of set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def vector_to_int(vec: Iterable[int]) -> int:
    """Pack a 0/1 sequence into an int (entry j becomes bit j)."""
    out = 0
    for j, bit in enumerate(vec):
        if int(bit) & 1:
            out |= 1 << j
    return out


def int_to_vector(x: int, length: int) -> np.ndarray:
    """Unpack an int into a uint8 vector of the given length."""
    vec = np.zeros(length, dtype=np.uint8)
    for j in iter_bits(x):
        if j >= length:
            raise DimensionMismatchError(f"bit {j} outside vector of length {length}")
        vec[j] = 1
    return vec


def parity(x: int) -> int:
    """Parity of the number of set bits."""
    return bin(x).count("1") & 1


class GF2Matrix:
    """Immutable matrix over GF(2) with rows packed into ints."""

    __slots__ = ("n_rows", "n_cols", "_rows")

    def __init__(self, n_rows: int, n_cols: int, rows: Optional[Sequence[int]] = None):
        if n_rows < 0 or n_cols < 0:
            raise DimensionMismatchError("matrix dimensions must be non-negative")
        if rows is None:
            rows = [0] * n_rows
        if len(rows) != n_rows:
            raise DimensionMismatchError(f"expected {n_rows} rows, got {len(rows)}")
        limit = 1 << n_cols
        for r in rows:
            if r < 0 or r >= limit:
                raise DimensionMismatchError(f"row {r:#x} does not fit in {n_cols} columns")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self._rows: Tuple[int, ...] = tuple(rows)

    # Construction

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "GF2Matrix":
        return cls(n_rows, n_cols)

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_dense(cls, array: Union[np.ndarray, Sequence[Sequence[int]]]) -> "GF2Matrix":
        arr = np.asarray(array, dtype=np.int64) & 1
        if arr.ndim != 2:
            raise DimensionMismatchError("dense input must be two-dimensional")
        return cls(arr.shape[0], arr.shape[1], [vector_to_int(row) for row in arr])

    @classmethod
    def from_columns(cls, columns: Sequence[int], n_rows: int) -> "GF2Matrix":
        """Build a matrix whose column j is the bit vector ``columns[j]``."""
        rows = [0] * n_rows
        for j, col in enumerate(columns):
            for i in iter_bits(col):
                if i >= n_rows:
                    raise DimensionMismatchError(f"column {j} has bit {i} >= {n_rows}")
                rows[i] |= 1 << j
        return cls(n_rows, len(columns), rows)

    # Access

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def rows(self) -> Tuple[int, ...]:
        return self._rows

    def row(self, i: int) -> int:
        return self._rows[i]

    def columns(self) -> List[int]:
        """Columns as packed ints over the row index."""
        cols = [0] * self.n_cols
        for i, r in enumerate(self._rows):
            bit = 1 << i
            for j in iter_bits(r):
                cols[j] |= bit
        return cols

    def __getitem__(self, key: Tuple[int, int]) -> int:
        i, j = key
        return (self._rows[i] >> j) & 1

    def nnz(self) -> int:
        return sum(bin(r).count("1") for r in self._rows)

    def is_zero(self) -> bool:
        return not any(self._rows)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, r in enumerate(self._rows):
            for j in iter_bits(r):
                out[i, j] = 1
        return out

    # Arithmetic

    def transpose(self) -> "GF2Matrix":
        return GF2Matrix(self.n_cols, self.n_rows, self.columns())

    @property
    def T(self) -> "GF2Matrix":
        return self.transpose()

    def matvec(self, x: int) -> int:
        """Multiply by a column vector packed as an int."""
        out = 0
        for i, r in enumerate(self._rows):
            if parity(r & x):
                out |= 1 << i
        return out

    def matmul(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.n_cols != other.n_rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        other_rows = other.rows
        rows = []
        for r in self._rows:
            acc = 0
            for j in iter_bits(r):
                acc ^= other_rows[j]
            rows.append(acc)
        return GF2Matrix(self.n_rows, other.n_cols, rows)

    def __matmul__(self, other: "GF2Matrix") -> "GF2Matrix":
        return self.matmul(other)

    def __add__(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(f"cannot add {self.shape} and {other.shape}")
        return GF2Matrix(
            self.n_rows, self.n_cols, [a ^ b for a, b in zip(self._rows, other.rows)]
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GF2Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n_rows, self.n_cols, self._rows))

    def __repr__(self) -> str:
        return f"GF2Matrix({self.n_rows}x{self.n_cols}, nnz={self.nnz()})"

    def hstack(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.n_rows != other.n_rows:
            raise DimensionMismatchError("hstack needs equal row counts")
        shift = self.n_cols
        return GF2Matrix(
            self.n_rows,
            self.n_cols + other.n_cols,
            [a | (b << shift) for a, b in zip(self._rows, other.rows)],
        )

    def vstack(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.n_cols != other.n_cols:
            raise DimensionMismatchError("vstack needs equal column counts")
        return GF2Matrix(self.n_rows + other.n_rows, self.n_cols, self._rows + other.rows)

    # Text format

    def to_text(self) -> str:
        lines = [f"{self.n_rows} {self.n_cols}"]
        for r in self._rows:
            lines.append("".join("1" if (r >> j) & 1 else "0" for j in range(self.n_cols)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GF2Matrix":
        lines = [line.strip() for line in text.strip().splitlines()]
        if not lines:
            raise InputError("empty matrix text")
        try:
            n_rows, n_cols = (int(tok) for tok in lines[0].split())
        except ValueError as e:
            raise InputError(f"bad matrix header {lines[0]!r}: {e}")
        body = lines[1:]
        if n_cols == 0:
            body = [""] * n_rows
        if len(body) != n_rows:
            raise InputError(f"header says {n_rows} rows, found {len(body)}")
        rows = []
        for line in body:
            if len(line) != n_cols or set(line) - {"0", "1"}:
                raise InputError(f"bad matrix row {line!r}")
            rows.append(int(line[::-1], 2) if line else 0)
        return cls(n_rows, n_cols, rows)

    def dump(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GF2Matrix":
        return cls.from_text(Path(path).read_text())


class ColumnReducer:
    """Incremental column elimination with tags.

    Each stored pivot is a reduced vector together with the tag recording
    which inserted vectors were combined to produce it.
    """

    def __init__(self) -> None:
        self._pivots: Dict[int, Tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, vector: int, tag: int = 0) -> Tuple[int, int]:
        """Reduce ``vector`` against the pivots; return (residual, tag)."""
        pivots = self._pivots
        while vector:
            low = vector & -vector
            hit = pivots.get(low)
            if hit is None:
                break
            vector ^= hit[0]
            tag ^= hit[1]
        return vector, tag

    def add(self, vector: int, tag: int = 0) -> Tuple[int, int]:
        """Insert a vector; return (residual, tag). A zero residual means dependent."""
        residual, tag = self.reduce(vector, tag)
        if residual:
            self._pivots[residual & -residual] = (residual, tag)
        return residual, tag


def rank(matrix: GF2Matrix) -> int:
    """GF(2) rank by row elimination."""
    pivots: Dict[int, int] = {}
    for r in matrix.rows:
        while r:
            low = r & -r
            p = pivots.get(low)
            if p is None:
                pivots[low] = r
                break
            r ^= p
    return len(pivots)


def kernel_vectors(matrix: GF2Matrix) -> List[int]:
    """Basis of ker(M) as packed ints over the column index."""
    reducer = ColumnReducer()
    basis = []
    for j, col in enumerate(matrix.columns()):
        residual, tag = reducer.add(col, 1 << j)
        if not residual:
            basis.append(tag)
    return basis


def kernel_basis(matrix: GF2Matrix) -> GF2Matrix:
    """Matrix whose columns form a basis of ker(M)."""
    return GF2Matrix.from_columns(kernel_vectors(matrix), matrix.n_cols)


def image_vectors(matrix: GF2Matrix) -> List[int]:
    """Independent columns of M (in column order) spanning its image."""
    reducer = ColumnReducer()
    basis = []
    for col in matrix.columns():
        residual, _ = reducer.add(col)
        if residual:
            basis.append(col)
    return basis


def solve(matrix: GF2Matrix, b: int) -> Optional[int]:
    """Return x with Mx = b, or None when the system is inconsistent."""
    if b >> matrix.n_rows:
        raise DimensionMismatchError(
            f"right-hand side has bits beyond {matrix.n_rows} rows"
        )
    reducer = ColumnReducer()
    for j, col in enumerate(matrix.columns()):
        reducer.add(col, 1 << j)
    residual, x = reducer.reduce(b)
    if residual:
        return None
    return x


class GF2ChainComplex:
    """Cochain complex C^0 -> C^1 -> ... with differentials d_k: C^k -> C^{k+1}."""

    def __init__(
        self,
        dims: Sequence[int],
        differentials: Sequence[GF2Matrix],
        labels: Optional[Sequence[Sequence[Hashable]]] = None,
        verify: bool = True,
    ):
        if len(differentials) != max(len(dims) - 1, 0):
            raise DimensionMismatchError(
                f"{len(dims)} degrees need {len(dims) - 1} differentials, got {len(differentials)}"
            )
        for k, d in enumerate(differentials):
            if d.shape != (dims[k + 1], dims[k]):
                raise DimensionMismatchError(
                    f"d_{k} has shape {d.shape}, expected {(dims[k + 1], dims[k])}"
                )
        if labels is not None:
            if len(labels) != len(dims):
                raise DimensionMismatchError("one label list per degree is required")
            for k, degree_labels in enumerate(labels):
                if len(degree_labels) != dims[k]:
                    raise DimensionMismatchError(f"degree {k} has wrong label count")
                if len(set(degree_labels)) != len(degree_labels):
                    raise ComplexError(f"basis labels in degree {k} are not distinct")
        self.dims: Tuple[int, ...] = tuple(dims)
        self.differentials: Tuple[GF2Matrix, ...] = tuple(differentials)
        self.labels = [list(lbl) for lbl in labels] if labels is not None else None
        if verify:
            self.verify()

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    def differential(self, k: int) -> GF2Matrix:
        """d_k, with zero maps outside the stored range."""
        if 0 <= k < len(self.differentials):
            return self.differentials[k]
        rows = self.dims[k + 1] if 0 <= k + 1 < len(self.dims) else 0
        cols = self.dims[k] if 0 <= k < len(self.dims) else 0
        return GF2Matrix.zeros(rows, cols)

    def verify(self) -> None:
        """Check d_{k+1} o d_k = 0 in every degree."""
        for k in range(len(self.differentials) - 1):
            product = self.differentials[k + 1] @ self.differentials[k]
            if not product.is_zero():
                raise ComplexError(f"d_{k + 1} o d_{k} != 0")


def cohomology_dims(complex_: GF2ChainComplex, threads: int = 1) -> List[int]:
    """dim H^k = dim C^k - rank d_k - rank d_{k-1} for every degree."""
    mats = list(complex_.differentials)
    if threads > 1 and len(mats) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ranks = list(pool.map(rank, mats))
    else:
        ranks = [rank(m) for m in mats]
    logger.debug(f"Differential ranks {ranks} for dims {complex_.dims}")
    dims = []
    for k, size in enumerate(complex_.dims):
        out_rank = ranks[k] if k < len(ranks) else 0
        in_rank = ranks[k - 1] if k >= 1 else 0
        dims.append(size - out_rank - in_rank)
    return dims


class CohomologyBasis:
    """Chosen representatives of H^k and coordinates of cocycles in them."""

    def __init__(self, complex_: GF2ChainComplex, degree: int):
        self.degree = degree
        self.size = complex_.dims[degree]
        self._d_out = complex_.differential(degree)
        self._reducer = ColumnReducer()
        for col in complex_.differential(degree - 1).columns():
            self._reducer.add(col)
        self.representatives: List[int] = []
        for z in kernel_vectors(self._d_out):
            residual, _ = self._reducer.reduce(z)
            if residual:
                self._reducer.add(z, 1 << len(self.representatives))
                self.representatives.append(z)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def is_cocycle(self, cochain: int) -> bool:
        return self._d_out.matvec(cochain) == 0

    def coordinates(self, cocycle: int) -> int:
        """Coordinates (packed) of the class of ``cocycle`` in the representative basis."""
        if not self.is_cocycle(cocycle):
            raise ComplexError(f"cochain in degree {self.degree} is not a cocycle")
        residual, tag = self._reducer.reduce(cocycle)
        if residual:
            raise ComplexError("cocycle not spanned by boundaries and representatives")
        return tag

    def is_coboundary(self, cocycle: int) -> bool:
        return self.coordinates(cocycle) == 0


# Dense helpers for small matrices


def as_gf2(array: Union[np.ndarray, Sequence[Sequence[int]]]) -> np.ndarray:
    """Reduce an integer array mod 2 into uint8."""
    return (np.asarray(array, dtype=np.int64) % 2).astype(np.uint8)


def dense_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return ((a.astype(np.int64) @ b.astype(np.int64)) % 2).astype(np.uint8)


def _rref(a: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    m = as_gf2(a).copy()
    n_rows, n_cols = m.shape
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        hits = np.nonzero(m[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        mask = m[:, c].astype(bool)
        mask[r] = False
        m[mask] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def dense_rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return len(_rref(a)[1])


def dense_nullspace(a: np.ndarray) -> np.ndarray:
    """Columns spanning {x : a x = 0}; shape (cols, k)."""
    a = np.asarray(a)
    n_cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n_cols, dtype=np.uint8)
    m, pivots = _rref(a)
    free = [c for c in range(n_cols) if c not in set(pivots)]
    basis = np.zeros((n_cols, len(free)), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, p in enumerate(pivots):
            basis[p, k] = m[i, f]
    return basis


def dense_solve(a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    """Some x with a x = b over GF(2), or None."""
    a = as_gf2(a)
    b = as_gf2(b).reshape(-1)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(f"system {a.shape} with right-hand side {b.shape}")
    n_cols = a.shape[1]
    if a.shape[0] == 0:
        return np.zeros(n_cols, dtype=np.uint8)
    m, pivots = _rref(np.hstack([a, b[:, None]]))
    if n_cols in pivots:
        return None
    x = np.zeros(n_cols, dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = m[i, n_cols]
    return x


def dense_inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionMismatchError(f"inverse of non-square {a.shape}")
    m, pivots = _rref(np.hstack([as_gf2(a), np.eye(n, dtype=np.uint8)]))
    if pivots[:n] != list(range(n)):
        raise DimensionMismatchError("matrix is singular over GF(2)")
    return m[:, n:].copy()


def left_inverse(basis: np.ndarray) -> np.ndarray:
    """L with L @ basis = I for a full-column-rank basis (n x s)."""
    basis = as_gf2(basis)
    n, s = basis.shape
    if s == 0:
        return np.zeros((0, n), dtype=np.uint8)
    _, rows = _rref(basis.T)
    if len(rows) != s:
        raise DimensionMismatchError("basis columns are linearly dependent")
    inv = dense_inverse(basis[rows, :])
    out = np.zeros((s, n), dtype=np.uint8)
    out[:, rows] = inv
    return out


def quotient_frame(subspace: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Projection Q and section S for the quotient by span(subspace).

    ``subspace`` is n x k with independent columns. Returns Q of shape
    (n-k, n) with ker Q = span(subspace) and S of shape (n, n-k) with Q S = I;
    the complement is spanned by the standard vectors that are not pivots.
    """
    subspace = as_gf2(subspace)
    n, k = subspace.shape
    _, pivots = _rref(subspace.T)
    if len(pivots) != k:
        raise DimensionMismatchError("subspace columns are linearly dependent")
    complement = [i for i in range(n) if i not in set(pivots)]
    section = np.zeros((n, n - k), dtype=np.uint8)
    for c, i in enumerate(complement):
        section[i, c] = 1
    full = np.hstack([section, subspace])
    projection = dense_inverse(full)[: n - k, :]
    return projection, section
