"""Čech cochains on the open-star cover of a simplicial refinement.

The open stars of the vertices of a simplicial complex cover B; the nerve of
that cover is the complex itself and the open set of a simplex is its open
star. Sections over a star are computed here as compatible families over the
smooth cells of the star, independently of the loop rule used by
``cellular_sheaf``, so the two routes check each other.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from ..core.errors import AuditError, CoverError, InputError, StalkError
from ..core.gf2 import GF2ChainComplex, GF2Matrix, as_gf2, dense_nullspace, dense_rank, kernel_vectors
from ..geometry.charts import ChartAtlas
from ..geometry.complexes import CellComplex
from ..monodromy.loops import step_matrix
from .cellular import CellularSheaf, restrictions_from_values, smooth_star
from .local_system import LocalSystem, LocalSystemLabel

logger = logging.getLogger(__name__)

L = LocalSystemLabel


@dataclass(frozen=True)
class StarCover:
    """Open stars of the vertices of a simplicial complex."""

    complex_: CellComplex

    @property
    def open_sets(self) -> List[int]:
        return self.complex_.cells_of_dim(0)

    @property
    def nerve_counts(self) -> List[int]:
        return self.complex_.counts()


def star_cover(complex_: CellComplex) -> StarCover:
    """The vertex-star cover, after checking it is a Leray cover for pushforward sheaves.

    Checks: the complex is simplicial, the discriminant is a subcomplex of
    dimension at most one (so no triple intersection meets it), and every
    open star has a connected smooth part.
    """
    if not complex_.simplicial:
        raise CoverError(f"{complex_.name} is not simplicial; refine before using the star cover")
    if not complex_.delta_is_subcomplex():
        raise CoverError("discriminant is not a subcomplex")
    high = [complex_[i].key for i in complex_.delta_cells() if complex_[i].dim > 1]
    if high:
        raise CoverError(f"triple intersections meet the discriminant at {high[:3]}")
    for cell in complex_:
        try:
            smooth_star(complex_, cell.index)
        except StalkError as e:
            raise CoverError(f"open star of {cell.key} is not acyclic for the cover: {e}")
    return StarCover(complex_)


def _star_limit(
    system: LocalSystem, complex_: CellComplex, atlas: ChartAtlas, index: int
) -> Tuple[List[int], Dict[int, np.ndarray]]:
    """Compatible families over the smooth cells of a star; values per cell as columns."""
    members, graph = smooth_star(complex_, index)
    rank = system.rank
    position = {m: k for k, m in enumerate(members)}
    rows: List[int] = []
    for a, b in sorted(graph.edges()):
        move = system.transport(step_matrix(complex_, atlas, a, b))
        for r in range(rank):
            row = 1 << (position[b] * rank + r)
            for c in np.nonzero(move[r])[0]:
                row ^= 1 << (position[a] * rank + int(c))
            rows.append(row)
    constraints = GF2Matrix(len(rows), len(members) * rank, rows)
    families = kernel_vectors(constraints)
    values = {}
    for m in members:
        block = np.zeros((rank, len(families)), dtype=np.uint8)
        shift = position[m] * rank
        for k, z in enumerate(families):
            for r in range(rank):
                block[r, k] = (z >> (shift + r)) & 1
        values[m] = block
    return members, values


def cech_sheaf(system: LocalSystem, complex_: CellComplex, atlas: ChartAtlas) -> CellularSheaf:
    """Sections over open stars as limits; restrictions read off the families."""
    star_cover(complex_)
    frames: List[np.ndarray] = []
    sections: List[Dict[int, np.ndarray]] = []
    for cell in complex_:
        members, values = _star_limit(system, complex_, atlas, cell.index)
        frame = values[members[0]]
        if dense_rank(frame) != frame.shape[1]:
            raise StalkError(f"sections over the star of {cell.key} are not determined at its base")
        frames.append(frame)
        sections.append(values)
    values = {}
    for sigma, tau in complex_.hasse_edges():
        values[(sigma, tau)] = sections[sigma][complex_.base_cell(tau)]
    restrictions = restrictions_from_values(complex_, frames, values)
    return CellularSheaf(complex_, system, frames, restrictions, rule="cech")


def cech_complex(
    base, source: Union[CellularSheaf, LocalSystem], refinement: str = "simplicial"
) -> GF2ChainComplex:
    """Čech complex of the star cover of a simplicial refinement of the base."""
    if isinstance(source, CellularSheaf):
        if source.rule == "cech":
            star_cover(source.complex_)
            return source.cochain_complex
        source = source.system
    return cech_sheaf(source, base.refinement(refinement), base.atlas).cochain_complex


@dataclass(frozen=True)
class Cochain:
    """A cochain of a cellular sheaf, packed as an int over the stalk coordinates."""

    sheaf: CellularSheaf
    degree: int
    vector: int = 0

    @classmethod
    def zero(cls, sheaf: CellularSheaf, degree: int) -> "Cochain":
        return cls(sheaf, degree, 0)

    @classmethod
    def from_values(cls, sheaf: CellularSheaf, degree: int, values: Dict[int, np.ndarray]) -> "Cochain":
        return cls(sheaf, degree, sheaf.pack(degree, values))

    @classmethod
    def from_fibre_values(
        cls, sheaf: CellularSheaf, degree: int, values: Dict[int, Iterable[int]]
    ) -> "Cochain":
        """Cochain from values in the fibre at each cell's base cell."""
        coords = {i: sheaf.from_fibre(i, np.asarray(list(v))) for i, v in values.items()}
        return cls.from_values(sheaf, degree, coords)

    @classmethod
    def unit(cls, sheaf: CellularSheaf) -> "Cochain":
        """The 0-cochain equal to 1 everywhere (constant sheaf only)."""
        if sheaf.system.label is not L.CONST:
            raise InputError(f"the unit cochain lives in the constant sheaf, not {sheaf.name}")
        return cls.from_fibre_values(sheaf, 0, {i: [1] for i in sheaf.complex_.cells_of_dim(0)})

    def values(self) -> Dict[int, np.ndarray]:
        return self.sheaf.unpack(self.degree, self.vector)

    def value(self, cell: int) -> np.ndarray:
        hit = self.values().get(cell)
        if hit is None:
            return np.zeros(self.sheaf.stalk_dim(cell), dtype=np.uint8)
        return hit

    def fibre_value(self, cell: int, at: Optional[int] = None) -> np.ndarray:
        """Value on ``cell`` restricted to the coface ``at``, in the fibre at base(at)."""
        at = cell if at is None else at
        chunk = self._chunk(cell)
        moved = as_gf2(self.sheaf.restriction_between(cell, at).astype(np.int64) @ chunk)
        return self.sheaf.to_fibre(at, moved)

    def _chunk(self, cell: int) -> np.ndarray:
        s = self.sheaf.stalk_dim(cell)
        bits = (self.vector >> self.sheaf.offsets[cell]) & ((1 << s) - 1) if s else 0
        return np.array([(bits >> r) & 1 for r in range(s)], dtype=np.int64)

    @property
    def support(self) -> List[int]:
        return sorted(self.values())

    def is_zero(self) -> bool:
        return self.vector == 0

    def coboundary(self) -> "Cochain":
        d = self.sheaf.cochain_complex.differential(self.degree)
        return Cochain(self.sheaf, self.degree + 1, d.matvec(self.vector))

    def is_cocycle(self) -> bool:
        return self.coboundary().is_zero()

    def __add__(self, other: "Cochain") -> "Cochain":
        if other.sheaf is not self.sheaf or other.degree != self.degree:
            raise InputError("cochains of different sheaves or degrees cannot be added")
        return Cochain(self.sheaf, self.degree, self.vector ^ other.vector)


# Stalkwise products in the exterior algebra of the fibre torus, mod 2


def _scalar_left(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return as_gf2(int(x[0]) * y)


def _scalar_right(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return as_gf2(x * int(y[0]))


def _wedge(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # (e2^e3, e3^e1, e1^e2) coordinates of x ^ y
    return as_gf2(np.cross(x.astype(np.int64), y.astype(np.int64)))


def _pairing(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return as_gf2([int(np.dot(x.astype(np.int64), y.astype(np.int64)))])


Product = Callable[[np.ndarray, np.ndarray], np.ndarray]

_PRODUCTS: Dict[Tuple[LocalSystemLabel, LocalSystemLabel], Tuple[LocalSystemLabel, Product]] = {
    (L.R1F, L.R1F): (L.R2F, _wedge),
    (L.R1FDUAL, L.R1FDUAL): (L.R2FDUAL, _wedge),
    (L.R1F, L.R2F): (L.CONST, _pairing),
    (L.R2F, L.R1F): (L.CONST, _pairing),
    (L.R1FDUAL, L.R2FDUAL): (L.CONST, _pairing),
    (L.R2FDUAL, L.R1FDUAL): (L.CONST, _pairing),
}


def stalk_product(left: LocalSystemLabel, right: LocalSystemLabel) -> Tuple[LocalSystemLabel, Product]:
    if left is L.CONST:
        return right, _scalar_left
    if right is L.CONST:
        return left, _scalar_right
    try:
        return _PRODUCTS[(left, right)]
    except KeyError:
        raise InputError(f"no stalk product defined for {left.value} x {right.value}")


def cup_product(a: Cochain, b: Cochain, target: CellularSheaf, cyclic: bool = False) -> Cochain:
    """a ⌣ b on every (p+q)-simplex, values multiplied in the fibre of the simplex.

    The default is the front-face/back-face rule. ``cyclic`` reads the indices
    of a product of two 1-cochains cyclically: on (i, j, k) it sums
    a(ij)b(jk) + a(jk)b(ki) + a(ki)b(ij).
    """
    complex_ = target.complex_
    if a.sheaf.complex_ is not complex_ or b.sheaf.complex_ is not complex_:
        raise InputError("cup product needs cochains on the same complex")
    if not complex_.simplicial:
        raise InputError(f"cup product needs a simplicial complex, not {complex_.name}")
    label, product = stalk_product(a.sheaf.system.label, b.sheaf.system.label)
    if target.system.label is not label:
        raise InputError(f"product lands in {label.value}, target is {target.name}")
    p, q = a.degree, b.degree
    if cyclic and (p, q) != (1, 1):
        raise InputError("the cyclic rule is defined for two 1-cochains")
    a_support = set(a.support)
    b_support = set(b.support)
    out: Dict[int, np.ndarray] = {}
    for s in complex_.cells_of_dim(p + q):
        if target.stalk_dim(s) == 0:
            continue
        verts = complex_[s].vertices
        if cyclic:
            i, j, k = verts
            pairs = [((i, j), (j, k)), ((j, k), (k, i)), ((k, i), (i, j))]
            terms = [(complex_.simplex(x), complex_.simplex(y)) for x, y in pairs]
        else:
            terms = [(complex_.simplex(verts[: p + 1]), complex_.simplex(verts[p:]))]
        total = np.zeros(target.system.rank, dtype=np.uint8)
        for front, back in terms:
            if front not in a_support or back not in b_support:
                continue
            total ^= product(a.fibre_value(front, s), b.fibre_value(back, s))
        if total.any():
            out[s] = target.from_fibre(s, total)
    return Cochain.from_values(target, p + q, out)


_ANNIHILATOR_TARGET = {L.R2F: L.R1F, L.R2FDUAL: L.R1FDUAL}


def beta_cocycle(alpha: Cochain, target: CellularSheaf) -> Cochain:
    """Connecting-map representative from a 1-cocycle of R^2 into R^1.

    On (i, j, k) the value is the nonzero covector annihilating
    <alpha_ij, alpha_jk, alpha_ik> when the three values are pairwise
    distinct, and zero otherwise.
    """
    expected = _ANNIHILATOR_TARGET.get(alpha.sheaf.system.label)
    if expected is None or target.system.label is not expected:
        raise InputError(
            f"beta maps R^2 into R^1 of the same side, got {alpha.sheaf.name} -> {target.name}"
        )
    if alpha.degree != 1:
        raise InputError(f"beta is defined on 1-cocycles, got degree {alpha.degree}")
    if not alpha.is_cocycle():
        raise InputError("beta needs a cocycle")
    complex_ = target.complex_
    support = set(alpha.support)
    out: Dict[int, np.ndarray] = {}
    for s in complex_.cells_of_dim(2):
        i, j, k = complex_[s].vertices
        edges = [complex_.simplex((i, j)), complex_.simplex((j, k)), complex_.simplex((i, k))]
        if not support.intersection(edges):
            continue
        x, y, z = (alpha.fibre_value(e, s) for e in edges)
        distinct = not (
            np.array_equal(x, y) or np.array_equal(y, z) or np.array_equal(x, z)
        )
        if not distinct:
            continue
        annihilator = dense_nullspace(np.vstack([x, y, z]))
        if annihilator.shape[1] != 1:
            raise AuditError(f"values on {complex_[s].key} do not span a plane")
        out[s] = target.from_fibre(s, annihilator[:, 0])
    return Cochain.from_values(target, 2, out)


# mu: R^a of one fibration is R^(3-a) of the other, via e_i <-> complementary wedge
_MU = {L.R1FDUAL: L.R2F, L.R2FDUAL: L.R1F, L.R2F: L.R1FDUAL, L.R1F: L.R2FDUAL}
_EXTERIOR_DEGREE = {L.R1F: 1, L.R1FDUAL: 1, L.R2F: 2, L.R2FDUAL: 2}


def mu_dualize(c: Cochain, degree: int, target: CellularSheaf) -> Cochain:
    """Carry a cochain of R^a across the duality; coordinates are unchanged."""
    if degree not in (1, 2):
        raise InputError(f"mu is defined for R^1 and R^2, got degree {degree}")
    label = c.sheaf.system.label
    if _EXTERIOR_DEGREE.get(label) != degree:
        raise InputError(f"{c.sheaf.name} is not an R^{degree} sheaf")
    if target.system.label is not _MU[label]:
        raise InputError(f"mu sends {label.value} to {_MU[label].value}, not {target.name}")
    if target.complex_ is not c.sheaf.complex_:
        raise InputError("mu needs both sheaves on the same complex")
    for i in c.sheaf.complex_.cells_of_dim(c.degree):
        if not np.array_equal(c.sheaf.frames[i], target.frames[i]):
            raise AuditError(f"stalk frames of {c.sheaf.name} and {target.name} differ at cell {i}")
    return Cochain(target, c.degree, c.vector)
