"""Triple intersection forms of the mirror and the mod-2 squaring map D -> D^2."""

import json
import logging
from dataclasses import dataclass
from itertools import permutations
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
import yaml
from pydantic import ValidationError

from ..core.errors import DimensionMismatchError, FormError, HypothesisError
from ..core.gf2 import GF2Matrix, kernel_vectors, rank
from ..core.schemas import BettiReport, FormFile, HypothesisFlags, Route, Side, SquareReport

logger = logging.getLogger(__name__)

FORMS_DIR = Path(__file__).parent / "forms"

FORM_PRESETS: Dict[str, str] = {
    "quintic": "quintic_hyperplane.yaml",
    "cube4": "cube_four.yaml",
}


@dataclass(frozen=True)
class IntersectionForm:
    """Symmetric trilinear form t on a lattice of rank ``dim`` (0-based indices)."""

    tensor: np.ndarray
    basis: Tuple[str, ...] = ()
    dbar: Optional[Tuple[int, ...]] = None
    dbar_cube: Optional[int] = None
    name: str = "form"
    provenance: Optional[str] = None

    def __post_init__(self) -> None:
        t = np.asarray(self.tensor, dtype=np.int64)
        r = t.shape[0] if t.ndim == 3 else -1
        if t.shape != (r, r, r):
            raise DimensionMismatchError(f"intersection tensor must be r x r x r, got {t.shape}")
        for axes in ((1, 0, 2), (0, 2, 1), (2, 1, 0)):
            if not np.array_equal(t, t.transpose(axes)):
                raise FormError(f"intersection tensor of {self.name} is not symmetric")
        object.__setattr__(self, "tensor", t)
        basis = tuple(self.basis) or tuple(f"D{i + 1}" for i in range(r))
        if len(basis) != r:
            raise DimensionMismatchError(f"{len(basis)} basis labels for a form of rank {r}")
        object.__setattr__(self, "basis", basis)
        if self.dbar is not None:
            if len(self.dbar) != r:
                raise DimensionMismatchError(f"Dbar has {len(self.dbar)} entries, rank is {r}")
            cube = self.cube(self.dbar)
            if self.dbar_cube is not None and self.dbar_cube != cube:
                raise FormError(f"Dbar^3 is {cube}, file says {self.dbar_cube}")
            object.__setattr__(self, "dbar_cube", cube)

    @property
    def dim(self) -> int:
        return int(self.tensor.shape[0])

    def __call__(self, u: Sequence[int], v: Sequence[int], w: Sequence[int]) -> int:
        return int(np.einsum("ijk,i,j,k->", self.tensor, np.asarray(u), np.asarray(v), np.asarray(w)))

    def cube(self, v: Sequence[int]) -> int:
        return self(v, v, v)

    def change_basis(self, matrix: np.ndarray) -> "IntersectionForm":
        """The form in the basis given by the columns of a unimodular integer matrix."""
        u = np.asarray(matrix, dtype=np.int64)
        if u.shape != (self.dim, self.dim) or sympy.Matrix(u.tolist()).det() not in (1, -1):
            raise FormError("change of basis must be a unimodular integer matrix")
        t = np.einsum("ijk,ia,jb,kc->abc", self.tensor, u, u, u)
        dbar = None
        if self.dbar is not None:
            inverse = np.array(sympy.Matrix(u.tolist()).inv().tolist(), dtype=np.int64)
            dbar = tuple(int(x) for x in inverse @ np.asarray(self.dbar))
        return IntersectionForm(
            tensor=t, dbar=dbar, name=f"{self.name}-rebased", provenance=self.provenance
        )


def _read(path: Path) -> dict:
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return json.loads(text)
    return yaml.safe_load(text)


def form_from_file(data: FormFile, name: str = "form") -> IntersectionForm:
    r = data.dim
    t = np.zeros((r, r, r), dtype=np.int64)
    seen: Dict[Tuple[int, int, int], int] = {}
    for i, j, k, value in data.entries:
        if not all(1 <= x <= r for x in (i, j, k)):
            raise FormError(f"entry ({i}, {j}, {k}) outside 1..{r}")
        key = tuple(sorted((i, j, k)))
        if seen.setdefault(key, value) != value:  # type: ignore[arg-type]
            raise FormError(f"t{key} given as both {seen[key]} and {value}: tensor is not symmetric")  # type: ignore[index]
        for a, b, c in set(permutations((i - 1, j - 1, k - 1))):
            t[a, b, c] = value
    return IntersectionForm(
        tensor=t,
        basis=tuple(data.basis or ()),
        dbar=tuple(data.dbar) if data.dbar is not None else None,
        dbar_cube=data.dbar_cube,
        name=name,
        provenance=data.provenance,
    )


def load_intersection_form(path: Union[str, Path]) -> IntersectionForm:
    """Load a form file (YAML or JSON) with 1-based sparse entries; symmetric closure applied."""
    path = Path(path)
    try:
        data = FormFile.model_validate(_read(path))
    except FileNotFoundError:
        raise FormError(f"form file {path} does not exist")
    except (ValidationError, yaml.YAMLError, json.JSONDecodeError) as e:
        raise FormError(f"cannot parse form file {path}: {e}")
    form = form_from_file(data, name=path.stem)
    logger.info(f"Loaded intersection form {form.name} of rank {form.dim}")
    return form


def load_form(name_or_path: str) -> IntersectionForm:
    """A bundled preset by name, otherwise a path."""
    preset = FORM_PRESETS.get(name_or_path)
    if preset is not None:
        return load_intersection_form(FORMS_DIR / preset)
    return load_intersection_form(name_or_path)


def square_matrix(form: IntersectionForm) -> GF2Matrix:
    """M[k][i] = t(i, i, k) mod 2: the map D -> D^2 paired against the basis."""
    r = form.dim
    diagonal = np.einsum("iik->ki", form.tensor) % 2
    return GF2Matrix.from_dense(diagonal.astype(np.uint8)) if r else GF2Matrix.zeros(0, 0)


def square_kernel(form: IntersectionForm) -> int:
    return len(kernel_vectors(square_matrix(form)))


def delta_criterion(dbar_cube: int) -> int:
    """1 when the cube is even, else 0."""
    return 1 if int(dbar_cube) % 2 == 0 else 0


def square_report(form: IntersectionForm) -> SquareReport:
    m = square_matrix(form)
    r = rank(m)
    delta = delta_criterion(form.dbar_cube) if form.dbar_cube is not None else None
    if delta is None and form.dim == 1:
        delta = delta_criterion(int(form.tensor[0, 0, 0]))
    return SquareReport(form=form.name, dim=form.dim, rank=r, kernel=form.dim - r, delta=delta)


def betti_via_square(
    h1_base: int,
    form: IntersectionForm,
    hypotheses: Optional[HypothesisFlags] = None,
    side: Side = Side.F,
    components: int = 2,
    expected_dim: Optional[int] = None,
) -> BettiReport:
    """h^1 = h^1(B, R^1) + dim ker(Square), or + delta in the rank-one case."""
    if hypotheses is None or not hypotheses.mirror_simply_connected:
        raise HypothesisError(
            "the square route needs the mirror to satisfy H^1(X, Z2) = 0; "
            "declare it with the mirror_simply_connected flag"
        )
    if expected_dim is not None and form.dim != expected_dim:
        raise DimensionMismatchError(
            f"form {form.name} has rank {form.dim}, but h^1 of the mirror R^1 is {expected_dim}"
        )
    kernel = square_kernel(form)
    delta = None
    if hypotheses.rank_one_torsion_free:
        if form.dim != 1:
            raise HypothesisError(f"rank-one formula used with a form of rank {form.dim}")
        cube = form.dbar_cube if form.dbar_cube is not None else int(form.tensor[0, 0, 0])
        delta = delta_criterion(cube)
        h1 = h1_base + delta
    else:
        h1 = h1_base + kernel
    logger.info(f"Square route for side {side.value}: h1 = {h1_base} + {h1 - h1_base} = {h1}")
    return BettiReport(
        route=Route.SQUARE,
        side=side,
        betti=[components, h1, h1, components],
        h1_base=h1_base,
        kernel_square=kernel,
        delta=delta,
        hypotheses=hypotheses,
    )
