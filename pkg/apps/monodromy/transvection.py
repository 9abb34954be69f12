"""Integral transvections and the dual and exterior-square representations."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import sympy

from ..core.errors import TransvectionError

Vector3 = Tuple[int, int, int]


def _vec3(values: Sequence[int], what: str) -> Vector3:
    out = tuple(int(x) for x in values)
    if len(out) != 3:
        raise TransvectionError(f"{what} must have three entries, got {len(out)}")
    return out  # type: ignore[return-value]


@dataclass(frozen=True)
class Transvection:
    """v -> v + <n, v> d with <n, d> = 0."""

    d: Vector3
    n: Vector3

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", _vec3(self.d, "d"))
        object.__setattr__(self, "n", _vec3(self.n, "n"))
        if int(np.dot(self.n, self.d)) != 0:
            raise TransvectionError(f"<n, d> = {int(np.dot(self.n, self.d))} for n={self.n}, d={self.d}")

    @property
    def matrix(self) -> np.ndarray:
        return np.eye(3, dtype=np.int64) + np.outer(self.d, self.n)

    @property
    def inverse_matrix(self) -> np.ndarray:
        return np.eye(3, dtype=np.int64) - np.outer(self.d, self.n)

    def inverse(self) -> "Transvection":
        return Transvection(d=tuple(-x for x in self.d), n=self.n)  # type: ignore[arg-type]

    def apply(self, v: Sequence[int]) -> np.ndarray:
        vec = np.asarray(v, dtype=np.int64)
        return vec + int(np.dot(self.n, vec)) * np.asarray(self.d, dtype=np.int64)


def transvection(n: Sequence[int], d: Sequence[int]) -> Transvection:
    return Transvection(d=_vec3(d, "d"), n=_vec3(n, "n"))


def _as_sympy(matrix: np.ndarray) -> sympy.Matrix:
    arr = np.asarray(matrix, dtype=np.int64)
    if arr.shape != (3, 3):
        raise TransvectionError(f"expected a 3 x 3 matrix, got shape {arr.shape}")
    return sympy.Matrix(arr.tolist())


def is_unimodular(matrix: np.ndarray) -> bool:
    return _as_sympy(matrix).det() in (1, -1)


def dual_rep(matrix: np.ndarray) -> np.ndarray:
    """Inverse transpose, the action on the dual lattice."""
    sym = _as_sympy(matrix)
    if sym.det() not in (1, -1):
        raise TransvectionError(f"matrix {np.asarray(matrix).tolist()} is not unimodular")
    return np.array(sym.T.inv().tolist(), dtype=np.int64)


def exterior_square(matrix: np.ndarray) -> np.ndarray:
    """Action on the second exterior power in the basis (e2^e3, e3^e1, e1^e2).

    In this basis the exterior square is the cofactor matrix.
    """
    return np.array(_as_sympy(matrix).cofactor_matrix().tolist(), dtype=np.int64)


def primitive(vector: Sequence[int]) -> Vector3:
    """Divide an integer vector by the gcd of its entries."""
    values = [int(x) for x in vector]
    g = 0
    for x in values:
        g = int(np.gcd(g, x))
    if g == 0:
        raise TransvectionError("zero vector has no primitive direction")
    return tuple(x // g for x in values)  # type: ignore[return-value]
