"""The long exact sequence of 0 -> R^1 -> F -> R^2 -> 0 and its connecting map.

F is the pushforward of functions on the fibre 2-torsion modulo the constant
subsheaf spanned by the indicator of the origin and the constant function.
The injection sends a covector to the function it defines; the surjection
sends a function h to the sum of h(u) u.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import AuditError
from ..core.gf2 import (
    CohomologyBasis,
    GF2Matrix,
    cohomology_dims,
    dense_matmul,
    dense_rank,
    dense_solve,
    int_to_vector,
    rank,
    vector_to_int,
)
from ..core.schemas import ExactnessNode, LESReport, Side
from .cech import Cochain, beta_cocycle, cup_product, mu_dualize
from .cellular import CellularSheaf, pushforward_sheaf
from .local_system import (
    QUOTIENT_PROJECTION,
    QUOTIENT_SECTION,
    SIDE_LABELS,
    LocalSystemLabel,
    build_local_system,
    fibre_inclusion,
    fibre_projection,
)

logger = logging.getLogger(__name__)


@dataclass
class SheafMap:
    """A morphism of cellular sheaves induced by one fibre map."""

    source: CellularSheaf
    target: CellularSheaf
    fibre: np.ndarray
    blocks: List[np.ndarray]

    def matrix(self, degree: int) -> GF2Matrix:
        cells = self.source.complex_.cells_of_dim(degree)
        rows = [0] * self.target.cochain_dims[degree]
        for i in cells:
            block = self.blocks[i]
            src, dst = self.source.offsets[i], self.target.offsets[i]
            for r in range(block.shape[0]):
                rows[dst + r] = vector_to_int(block[r]) << src
        return GF2Matrix(len(rows), self.source.cochain_dims[degree], rows)

    def apply(self, degree: int, vector: int) -> int:
        return self.matrix(degree).matvec(vector)

    def check_chain_map(self) -> None:
        top = self.source.complex_.dimension
        for k in range(top):
            left = self.target.cochain_complex.differential(k) @ self.matrix(k)
            right = self.matrix(k + 1) @ self.source.cochain_complex.differential(k)
            if left != right:
                raise AuditError(
                    f"{self.source.name} -> {self.target.name} does not commute with d_{k}"
                )


def sheaf_map(source: CellularSheaf, target: CellularSheaf, fibre: np.ndarray) -> SheafMap:
    if source.complex_ is not target.complex_:
        raise AuditError("sheaf maps need both sheaves on one complex")
    blocks = []
    for cell in source.complex_:
        image = dense_matmul(fibre, source.frames[cell.index])
        block = dense_matmul(target.left(cell.index), image)
        if not np.array_equal(dense_matmul(target.frames[cell.index], block), image):
            raise AuditError(
                f"{source.name} -> {target.name} leaves the stalk at {cell.key}"
            )
        blocks.append(block)
    return SheafMap(source, target, fibre, blocks)


@dataclass
class LongExactSequence:
    r1: CellularSheaf
    quotient: CellularSheaf
    r2: CellularSheaf
    iota: SheafMap
    phi: SheafMap
    threads: int = 1
    _bases: Dict[Tuple[str, int], CohomologyBasis] = field(default_factory=dict, repr=False)
    _dims: Dict[str, List[int]] = field(default_factory=dict, repr=False)
    _betas: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def dims(self, sheaf: CellularSheaf) -> List[int]:
        hit = self._dims.get(sheaf.name)
        if hit is None:
            hit = cohomology_dims(sheaf.cochain_complex, threads=self.threads)
            self._dims[sheaf.name] = hit
        return hit

    def basis(self, sheaf: CellularSheaf, degree: int) -> CohomologyBasis:
        key = (sheaf.name, degree)
        hit = self._bases.get(key)
        if hit is None:
            hit = CohomologyBasis(sheaf.cochain_complex, degree)
            self._bases[key] = hit
        return hit

    def lift(self, degree: int, vector: int) -> int:
        """A cochain of F mapping onto the given cochain of R^2, cell by cell."""
        values = {}
        for i, coords in self.r2.unpack(degree, vector).items():
            x = dense_solve(self.phi.blocks[i], coords)
            if x is None:
                raise AuditError(f"surjection is not onto at {self.r2.complex_[i].key}")
            values[i] = x
        return self.quotient.pack(degree, values)

    def connecting(self, degree: int, vector: int) -> int:
        """Snake map on a cocycle of R^2 in the given degree: a cocycle of R^1 one degree up."""
        boundary = self.quotient.cochain_complex.differential(degree).matvec(self.lift(degree, vector))
        values = {}
        for i, coords in self.quotient.unpack(degree + 1, boundary).items():
            y = dense_solve(self.iota.blocks[i], coords)
            if y is None:
                raise AuditError(f"coboundary of the lift leaves R^1 at {self.r1.complex_[i].key}")
            values[i] = y
        out = self.r1.pack(degree + 1, values)
        if self.r1.cochain_complex.differential(degree + 1).matvec(out):
            raise AuditError(f"connecting map in degree {degree} did not give a cocycle")
        return out

    def beta_matrix(self, degree: int) -> np.ndarray:
        """Matrix of beta_degree in the chosen cohomology representatives."""
        hit = self._betas.get(degree)
        if hit is not None:
            return hit
        top = self.r1.complex_.dimension
        source = self.basis(self.r2, degree)
        if degree + 1 > top:
            return np.zeros((0, source.dim), dtype=np.uint8)
        target = self.basis(self.r1, degree + 1)
        out = np.zeros((target.dim, source.dim), dtype=np.uint8)
        for k, rep in enumerate(source.representatives):
            out[:, k] = int_to_vector(target.coordinates(self.connecting(degree, rep)), target.dim)
        self._betas[degree] = out
        return out

    def check_representatives(self, degree: int, samples: int, seed: int = 0) -> int:
        """beta on random classes shifted by random coboundaries must match beta_matrix.

        Returns the number of checks made; raises AuditError on the first mismatch.
        """
        top = self.r1.complex_.dimension
        source = self.basis(self.r2, degree)
        if degree + 1 > top or source.dim == 0:
            return 0
        target = self.basis(self.r1, degree + 1)
        beta = self.beta_matrix(degree)
        d_in = self.r2.cochain_complex.differential(degree - 1)
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            x = rng.integers(0, 2, size=source.dim).astype(np.uint8)
            cocycle = 0
            for k in np.flatnonzero(x):
                cocycle ^= source.representatives[k]
            shift = vector_to_int(rng.integers(0, 2, size=d_in.shape[1]))
            cocycle ^= d_in.matvec(shift)
            expected = vector_to_int(dense_matmul(beta, x.reshape(-1, 1)).reshape(-1))
            if target.coordinates(self.connecting(degree, cocycle)) != expected:
                raise AuditError(f"beta_{degree} depends on the chosen representative")
        return samples

    def induced_rank(self, sheaf_map: SheafMap, degree: int) -> int:
        source = self.basis(sheaf_map.source, degree)
        target = self.basis(sheaf_map.target, degree)
        matrix = sheaf_map.matrix(degree)
        columns = [target.coordinates(matrix.matvec(rep)) for rep in source.representatives]
        return rank(GF2Matrix.from_columns(columns, target.dim))

    def audit(self) -> Tuple[List[ExactnessNode], List[int]]:
        """Exactness at all twelve terms; returns the nodes and the ranks of beta."""
        self.iota.check_chain_map()
        self.phi.check_chain_map()
        top = self.r1.complex_.dimension
        beta = [dense_rank(self.beta_matrix(j)) for j in range(top + 1)]
        nodes = []
        for j in range(top + 1):
            iota_rank = self.induced_rank(self.iota, j)
            phi_rank = self.induced_rank(self.phi, j)
            nodes.append(
                ExactnessNode(
                    name=f"H{j}({self.r1.name})",
                    dim=self.dims(self.r1)[j],
                    rank_in=beta[j - 1] if j else 0,
                    rank_out=iota_rank,
                )
            )
            nodes.append(
                ExactnessNode(
                    name=f"H{j}({self.quotient.name})",
                    dim=self.dims(self.quotient)[j],
                    rank_in=iota_rank,
                    rank_out=phi_rank,
                )
            )
            nodes.append(
                ExactnessNode(
                    name=f"H{j}({self.r2.name})",
                    dim=self.dims(self.r2)[j],
                    rank_in=phi_rank,
                    rank_out=beta[j],
                )
            )
        return nodes, beta


def build_les(base, side: Side = Side.F, refinement: str = "dual", threads: int = 1) -> LongExactSequence:
    r1_label, quotient_label, r2_label, _ = SIDE_LABELS[side]
    r1 = pushforward_sheaf(build_local_system(r1_label, base), base, refinement)
    quotient = pushforward_sheaf(build_local_system(quotient_label, base), base, refinement)
    r2 = pushforward_sheaf(build_local_system(r2_label, base), base, refinement)
    iota_fibre = dense_matmul(QUOTIENT_PROJECTION, fibre_inclusion())
    phi_fibre = dense_matmul(fibre_projection(), QUOTIENT_SECTION)
    return LongExactSequence(
        r1=r1,
        quotient=quotient,
        r2=r2,
        iota=sheaf_map(r1, quotient, iota_fibre),
        phi=sheaf_map(quotient, r2, phi_fibre),
        threads=threads,
    )


def assemble_les(
    base,
    side: Side = Side.F,
    refinement: str = "dual",
    threads: int = 1,
    check_splitting: bool = True,
    seed: int = 0,
    samples: int = 4,
) -> LESReport:
    """Run the sequence for one side and derive h^j of the real Lagrangian from it.

    ``samples`` random classes, seeded by ``seed``, are pushed through beta_1 with
    random coboundaries added to check that beta does not see the representative.
    """
    les = build_les(base, side, refinement, threads)
    nodes, beta = les.audit()
    checks = les.check_representatives(1, samples, seed)
    const = pushforward_sheaf(build_local_system(LocalSystemLabel.CONST), base, refinement)
    const_dims = les.dims(const)
    r1_dims, r2_dims = les.dims(les.r1), les.dims(les.r2)
    top = len(r1_dims) - 1
    quotient_dims = [
        r1_dims[j] - (beta[j - 1] if j else 0) + r2_dims[j] - beta[j] for j in range(top + 1)
    ]
    betti = [quotient_dims[j] + 2 * const_dims[j] for j in range(top + 1)]
    dims = {
        les.r1.name: r1_dims,
        les.quotient.name: les.dims(les.quotient),
        les.r2.name: r2_dims,
        const.name: const_dims,
    }
    splitting: Optional[bool] = None
    if check_splitting:
        cover_label = SIDE_LABELS[side][3]
        cover = pushforward_sheaf(build_local_system(cover_label), base, refinement)
        dims[cover.name] = les.dims(cover)
        splitting = dims[cover.name] == betti
    beta_1 = les.beta_matrix(1)
    alternating = sum((-1) ** n * node.dim for n, node in enumerate(nodes))
    exact = all(node.exact for node in nodes) and alternating == 0
    if not exact:
        bad = [node.name for node in nodes if not node.exact]
        logger.warning(f"Sequence for side {side.value} fails exactness at {bad}")
    logger.info(f"Side {side.value}: beta ranks {beta}, h*(L) = {betti}")
    return LESReport(
        side=side,
        refinement=refinement,
        dims=dims,
        beta_ranks=beta[:top],
        beta_shape=list(beta_1.shape),
        beta_matrix=["".join(str(int(x)) for x in row) for row in beta_1],
        beta_rank=beta[1],
        beta_kernel=beta_1.shape[1] - beta[1],
        nodes=nodes,
        alternating_sum=alternating,
        exact=exact,
        splitting_holds=splitting,
        representative_checks=checks,
        betti=betti,
    )


# The mirror side's R^1 and R^2, and the sheaves the square lands in.
_MIRROR = {
    Side.F: (LocalSystemLabel.R1FDUAL, LocalSystemLabel.R2FDUAL),
    Side.FDUAL: (LocalSystemLabel.R1F, LocalSystemLabel.R2F),
}


@dataclass
class SquareComparison:
    side: Side
    beta: np.ndarray
    square: np.ndarray
    annihilator: np.ndarray

    @property
    def equal(self) -> bool:
        return np.array_equal(self.beta, self.square) and np.array_equal(self.beta, self.annihilator)

    @property
    def rank(self) -> int:
        return dense_rank(self.square)

    @property
    def kernel(self) -> int:
        return self.square.shape[1] - self.rank


def square_comparison(base, side: Side = Side.F, refinement: str = "simplicial") -> SquareComparison:
    """beta_1 against the square of the mirror classes, in shared bases.

    Each representative alpha of H^1(R^2) is carried to a class of the mirror
    R^1, squared there with the cup product and carried back to R^1. The
    explicit annihilator cocycle of ``beta_cocycle`` is compared as well.
    """
    les = build_les(base, side, refinement)
    mirror_r1_label, mirror_r2_label = _MIRROR[side]
    mirror_r1 = pushforward_sheaf(build_local_system(mirror_r1_label), base, refinement)
    mirror_r2 = pushforward_sheaf(build_local_system(mirror_r2_label), base, refinement)
    source = les.basis(les.r2, 1)
    target = les.basis(les.r1, 2)
    beta = les.beta_matrix(1)
    square = np.zeros_like(beta)
    annihilator = np.zeros_like(beta)
    for k, rep in enumerate(source.representatives):
        alpha = Cochain(les.r2, 1, rep)
        mirror = mu_dualize(alpha, 2, mirror_r1)
        squared = mu_dualize(cup_product(mirror, mirror, mirror_r2), 2, les.r1)
        square[:, k] = int_to_vector(target.coordinates(squared.vector), target.dim)
        xi = beta_cocycle(alpha, les.r1)
        annihilator[:, k] = int_to_vector(target.coordinates(xi.vector), target.dim)
    comparison = SquareComparison(side=side, beta=beta, square=square, annihilator=annihilator)
    logger.info(
        f"Square comparison on {refinement}, side {side.value}: rank {comparison.rank}, "
        f"equal {comparison.equal}"
    )
    return comparison
