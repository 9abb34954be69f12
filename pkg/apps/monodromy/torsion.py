"""Two-torsion points of a fibre torus and the permutations monodromy induces on them."""

import re
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import InputError, TransvectionError
from ..core.gf2 import as_gf2, dense_inverse
from ..core.schemas import Side

# Labels u0..u7 of the half-integral points (1/2 Z^3) / Z^3, doubled.
TORSION_POINTS: Tuple[Tuple[int, int, int], ...] = (
    (0, 0, 0),
    (0, 0, 1),
    (1, 0, 1),
    (1, 0, 0),
    (1, 1, 0),
    (0, 1, 0),
    (0, 1, 1),
    (1, 1, 1),
)
_LABEL_OF = {p: i for i, p in enumerate(TORSION_POINTS)}


@dataclass(frozen=True)
class Permutation:
    """A permutation of {0, ..., n-1}; ``images[i]`` is the image of i."""

    images: Tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise InputError(f"{images} is not a permutation")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int = 8) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int = 8) -> "Permutation":
        images = list(range(n))
        for cycle in cycles:
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a] = b
        return cls(tuple(images))

    @classmethod
    def parse(cls, text: str, n: int = 8) -> "Permutation":
        """Parse cycle notation such as ``(23)(47)``; ``()`` is the identity."""
        cycles = []
        for body in re.findall(r"\(([^()]*)\)", text):
            body = body.strip()
            if not body:
                continue
            tokens = body.split(",") if "," in body else list(body.replace(" ", ""))
            cycles.append([int(t) for t in tokens])
        return cls.from_cycles(cycles, n)

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """self o other (apply ``other`` first)."""
        return Permutation(tuple(self.images[j] for j in other.images))

    __mul__ = compose

    def inverse(self) -> "Permutation":
        out = [0] * len(self.images)
        for i, j in enumerate(self.images):
            out[j] = i
        return Permutation(tuple(out))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Non-trivial cycles, each starting at its smallest element."""
        seen = set()
        out = []
        for start in range(len(self.images)):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cycle.append(j)
                seen.add(j)
                j = self.images[j]
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def cycle_notation(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        sep = "" if len(self.images) <= 10 else ","
        return "".join("(" + sep.join(str(i) for i in c) + ")" for c in cycles)

    def __str__(self) -> str:
        return self.cycle_notation()

    def is_involution(self) -> bool:
        return all(self.images[j] == i for i, j in enumerate(self.images))

    def parity(self) -> int:
        return sum(len(c) - 1 for c in self.cycles()) % 2

    def ramification_within(self, orbit: Iterable[int]) -> int:
        """Sum of (length - 1) over the cycles contained in ``orbit``."""
        points = set(orbit)
        return sum(len(c) - 1 for c in self.cycles() if set(c) <= points)

    def matrix(self) -> np.ndarray:
        """Permutation matrix sending basis vector i to basis vector images[i]."""
        n = len(self.images)
        out = np.zeros((n, n), dtype=np.uint8)
        out[list(self.images), list(range(n))] = 1
        return out


def side_matrix_mod2(matrix: np.ndarray, side: Side) -> np.ndarray:
    """Mod-2 action on the fibre 2-torsion: inverse transpose for f, T itself for fdual."""
    reduced = as_gf2(matrix)
    if side is Side.F:
        return dense_inverse(reduced.T)
    return reduced


def torsion_permutation(action: np.ndarray) -> Permutation:
    """Permutation of u0..u7 under a mod-2 matrix acting on column vectors."""
    action = as_gf2(action)
    if action.shape != (3, 3):
        raise TransvectionError(f"torsion action needs a 3 x 3 matrix, got {action.shape}")
    images = []
    for point in TORSION_POINTS:
        image = tuple(int(x) for x in (action.astype(np.int64) @ np.array(point)) % 2)
        images.append(_LABEL_OF[image])  # type: ignore[index]
    return Permutation(tuple(images))


def torsion_action(matrix: np.ndarray, side: Side = Side.F) -> Permutation:
    """Permutation of u0..u7 induced by the tangent monodromy ``matrix`` on the given side."""
    return torsion_permutation(side_matrix_mod2(matrix, side))


@dataclass
class PermRep:
    """Permutation representation on the eight torsion labels."""

    generators: List[Permutation]
    labels: List[str] = field(default_factory=list)
    side: Optional[Side] = None
    require_involutions: bool = True
    points: Tuple[Tuple[int, int, int], ...] = TORSION_POINTS

    def __post_init__(self) -> None:
        if not self.labels:
            self.labels = [f"g{i}" for i in range(len(self.generators))]
        if len(self.labels) != len(self.generators):
            raise InputError("one label per generator is required")
        for label, g in zip(self.labels, self.generators):
            if len(g) != len(self.points):
                raise InputError(f"generator {label} acts on {len(g)} points")
            if g(0) != 0:
                raise InputError(f"generator {label} moves the origin")
            if self.require_involutions and not g.is_involution():
                raise InputError(f"generator {label} = {g} is not an involution")

    def __len__(self) -> int:
        return len(self.generators)

    def matrices(self) -> List[np.ndarray]:
        return [g.matrix() for g in self.generators]
