"""Cellular sheaves on a refinement of B and their cohomology.

The stalk of a pushforward sheaf at a cell is the space of sections of the
local system over the part of the cell's star lying outside the
discriminant. Sections are recorded by their value at the base cell of the
star (the first cell outside the discriminant), expressed in that cell's
chart; ``frames[i]`` holds a basis of those values as columns.
"""

import logging
import weakref
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from ..core.errors import StalkError, SyzError
from ..core.gf2 import (
    GF2ChainComplex,
    GF2Matrix,
    as_gf2,
    cohomology_dims,
    dense_matmul,
    dense_nullspace,
    int_to_vector,
    left_inverse,
    vector_to_int,
)
from ..geometry.charts import ChartAtlas
from ..geometry.complexes import CellComplex
from ..monodromy.loops import spanning_transports, step_matrix
from .local_system import LocalSystem

logger = logging.getLogger(__name__)


@dataclass
class StarData:
    """Transports over the smooth part of one open star."""

    base: int
    transports: Dict[int, np.ndarray]
    loops: List[np.ndarray]


_STAR_CACHE: "weakref.WeakKeyDictionary[CellComplex, Dict[int, List[StarData]]]" = (
    weakref.WeakKeyDictionary()
)


def _smooth_star_graph(complex_: CellComplex, index: int) -> Tuple[List[int], nx.Graph]:
    members = [i for i in complex_.star(index) if not complex_[i].in_delta]
    graph = nx.Graph()
    graph.add_nodes_from(members)
    inside = set(members)
    for i in members:
        graph.add_edges_from((f, i) for f in complex_[i].faces if f in inside)
    return members, graph


def _dedupe(matrices: Sequence[np.ndarray]) -> List[np.ndarray]:
    seen: Dict[bytes, np.ndarray] = {}
    identity = np.eye(3, dtype=np.int64)
    for m in matrices:
        if not np.array_equal(m, identity):
            seen.setdefault(np.ascontiguousarray(m, dtype=np.int64).tobytes(), m)
    return list(seen.values())


def smooth_star(complex_: CellComplex, index: int) -> Tuple[List[int], nx.Graph]:
    """Cells of star(index) outside the discriminant, with their incidence graph.

    The list is ordered by (dim, index), so its first entry is the base cell.
    """
    members, graph = _smooth_star_graph(complex_, index)
    if not members:
        raise StalkError(f"star of cell {complex_[index].key} lies inside the discriminant")
    if not nx.is_connected(graph):
        raise StalkError(f"smooth part of the star of {complex_[index].key} is disconnected")
    return members, graph


def star_data(
    complex_: CellComplex, atlas: ChartAtlas, index: int, bases: Optional[Sequence[int]] = None
) -> StarData:
    """Transports from the base cell of star(index) and the monodromy of its loops."""
    members, graph = smooth_star(complex_, index)
    base = members[0]
    transports, extra = spanning_transports(complex_, atlas, graph, base)
    back = {base: np.eye(3, dtype=np.int64)}
    for a, b in nx.bfs_edges(graph, base, sort_neighbors=sorted):
        back[b] = back[a] @ step_matrix(complex_, atlas, b, a)
    loops = [back[b] @ step_matrix(complex_, atlas, a, b) @ transports[a] for a, b in extra]
    if bases is None:
        needed = {complex_.base_cell(up) for up in complex_.cofaces(index)}
    else:
        needed = {bases[up] for up in complex_.cofaces(index)}
    return StarData(
        base=base,
        transports={i: transports[i] for i in needed},
        loops=_dedupe(loops),
    )


def star_transports(complex_: CellComplex, atlas: ChartAtlas) -> List[StarData]:
    """StarData of every cell, cached per complex and atlas."""
    per_atlas = _STAR_CACHE.setdefault(complex_, {})
    hit = per_atlas.get(id(atlas))
    if hit is None:
        bases = [complex_.base_cell(c.index) for c in complex_]
        hit = [star_data(complex_, atlas, c.index, bases) for c in complex_]
        per_atlas[id(atlas)] = hit
        logger.debug(f"Star transports for {len(hit)} cells of {complex_.name}")
    return hit


@dataclass(eq=False)
class CellularSheaf:
    """Stalk frames and codimension-one restriction maps on a cell complex."""

    complex_: CellComplex
    system: LocalSystem
    frames: List[np.ndarray]
    restrictions: Dict[Tuple[int, int], np.ndarray]
    rule: str = "star"
    _lefts: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _between: Dict[Tuple[int, int], np.ndarray] = field(default_factory=dict, repr=False)
    _closures: Dict[int, FrozenSet[int]] = field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        return self.system.label.value

    def stalk_dim(self, index: int) -> int:
        return int(self.frames[index].shape[1])

    def base_cell(self, index: int) -> int:
        return self.complex_.base_cell(index)

    def left(self, index: int) -> np.ndarray:
        hit = self._lefts.get(index)
        if hit is None:
            hit = left_inverse(self.frames[index])
            self._lefts[index] = hit
        return hit

    def restriction(self, face: int, coface: int) -> np.ndarray:
        return self.restrictions[(face, coface)]

    def _closure(self, index: int) -> FrozenSet[int]:
        hit = self._closures.get(index)
        if hit is None:
            hit = frozenset(self.complex_.closure(index))
            self._closures[index] = hit
        return hit

    def restriction_between(self, face: int, cell: int) -> np.ndarray:
        """Restriction from the stalk at ``face`` to the stalk at any coface ``cell``."""
        if face == cell:
            return np.eye(self.stalk_dim(face), dtype=np.uint8)
        key = (face, cell)
        hit = self._between.get(key)
        if hit is not None:
            return hit
        for f in self.complex_[cell].faces:
            if face in self._closure(f):
                hit = dense_matmul(self.restriction(f, cell), self.restriction_between(face, f))
                break
        else:
            raise StalkError(
                f"{self.complex_[face].key} is not a face of {self.complex_[cell].key}"
            )
        self._between[key] = hit
        return hit

    # Stalk coordinates <-> fibre values at the base cell

    def to_fibre(self, index: int, coords: np.ndarray) -> np.ndarray:
        return dense_matmul(self.frames[index], as_gf2(coords).reshape(-1, 1)).reshape(-1)

    def from_fibre(self, index: int, value: np.ndarray) -> np.ndarray:
        value = as_gf2(value).reshape(-1)
        coords = dense_matmul(self.left(index), value.reshape(-1, 1)).reshape(-1)
        if not np.array_equal(self.to_fibre(index, coords), value):
            raise StalkError(f"value {value.tolist()} is not a section at {self.complex_[index].key}")
        return coords

    # Cochains

    @cached_property
    def offsets(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for k in range(self.complex_.dimension + 1):
            position = 0
            for i in self.complex_.cells_of_dim(k):
                out[i] = position
                position += self.stalk_dim(i)
        return out

    @cached_property
    def cochain_dims(self) -> List[int]:
        return [
            sum(self.stalk_dim(i) for i in self.complex_.cells_of_dim(k))
            for k in range(self.complex_.dimension + 1)
        ]

    def unpack(self, degree: int, vector: int) -> Dict[int, np.ndarray]:
        """Stalk coordinates of a packed cochain on its support."""
        values = {}
        for i in self.complex_.cells_of_dim(degree):
            s = self.stalk_dim(i)
            if s == 0:
                continue
            chunk = (vector >> self.offsets[i]) & ((1 << s) - 1)
            if chunk:
                values[i] = int_to_vector(chunk, s)
        return values

    def pack(self, degree: int, values: Dict[int, np.ndarray]) -> int:
        out = 0
        for i, coords in values.items():
            if self.complex_[i].dim != degree:
                raise StalkError(f"cell {self.complex_[i].key} is not of dimension {degree}")
            out ^= vector_to_int(as_gf2(coords).reshape(-1)) << self.offsets[i]
        return out

    @cached_property
    def cochain_complex(self) -> GF2ChainComplex:
        dims = self.cochain_dims
        differentials = []
        for k in range(self.complex_.dimension):
            rows: List[int] = []
            for tau in self.complex_.cells_of_dim(k + 1):
                block = [0] * self.stalk_dim(tau)
                for sigma in self.complex_[tau].faces:
                    rho = self.restriction(sigma, tau)
                    shift = self.offsets[sigma]
                    for r in range(rho.shape[0]):
                        block[r] ^= vector_to_int(rho[r]) << shift
                rows.extend(block)
            differentials.append(GF2Matrix(dims[k + 1], dims[k], rows))
        labels = [
            [(i, j) for i in self.complex_.cells_of_dim(k) for j in range(self.stalk_dim(i))]
            for k in range(len(dims))
        ]
        return GF2ChainComplex(dims, differentials, labels=labels)

    def cohomology(self, threads: int = 1) -> List[int]:
        dims = cohomology_dims(self.cochain_complex, threads=threads)
        logger.info(f"H*(B, {self.name}) on {self.complex_.name}: {dims}")
        return dims

    def emit_matrices(self, directory: Union[str, Path], prefix: Optional[str] = None) -> List[Path]:
        out_dir = Path(directory)
        out_dir.mkdir(parents=True, exist_ok=True)
        prefix = prefix or f"{self.name}_{self.complex_.name}"
        paths = []
        for k, d in enumerate(self.cochain_complex.differentials):
            path = out_dir / f"{prefix}_d{k}.txt"
            d.dump(path)
            paths.append(path)
        return paths


def restrictions_from_values(
    complex_: CellComplex, frames: List[np.ndarray], values: Dict[Tuple[int, int], np.ndarray]
) -> Dict[Tuple[int, int], np.ndarray]:
    """rho = L_tau applied to the face's sections evaluated at base(tau); checked."""
    out = {}
    lefts = [left_inverse(f) for f in frames]
    for (sigma, tau), vals in values.items():
        rho = dense_matmul(lefts[tau], vals)
        if not np.array_equal(dense_matmul(frames[tau], rho), vals):
            raise StalkError(
                f"sections at {complex_[sigma].key} do not restrict into the stalk at {complex_[tau].key}"
            )
        out[(sigma, tau)] = rho
    return out


def cellular_sheaf(system: LocalSystem, complex_: CellComplex, atlas: ChartAtlas) -> CellularSheaf:
    """Pushforward of a local system: stalks are the invariants of the star loops."""
    stars = star_transports(complex_, atlas)
    frames = []
    for data in stars:
        if data.loops:
            stack = np.vstack(
                [system.transport(m) ^ np.eye(system.rank, dtype=np.uint8) for m in data.loops]
            )
            frames.append(dense_nullspace(stack))
        else:
            frames.append(np.eye(system.rank, dtype=np.uint8))
    values = {}
    for sigma, tau in complex_.hasse_edges():
        moved = system.transport(stars[sigma].transports[stars[tau].base])
        values[(sigma, tau)] = dense_matmul(moved, frames[sigma])
    restrictions = restrictions_from_values(complex_, frames, values)
    sheaf = CellularSheaf(complex_, system, frames, restrictions, rule="star")
    logger.debug(
        f"Pushforward {system.label.value} on {complex_.name}: cochain dims {sheaf.cochain_dims}"
    )
    return sheaf


def pushforward_sheaf(system: LocalSystem, base, refinement: str = "dual") -> CellularSheaf:
    return cellular_sheaf(system, base.refinement(refinement), base.atlas)


def sheaf_cohomology(sheaf: CellularSheaf, threads: int = 1) -> List[int]:
    """h^0..h^3 of a cellular sheaf; d o d = 0 is checked when its complex is assembled."""
    try:
        return sheaf.cohomology(threads=threads)
    except SyzError as e:
        logger.error(f"Failed to compute cohomology of {sheaf.name}: {e}")
        raise
