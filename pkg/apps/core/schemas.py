"""Pydantic schemas for pipeline configuration and reports."""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from .config import REFINEMENT_KINDS


class Side(str, Enum):
    """Which fibration of the mirror pair a computation describes."""

    F = "f"
    FDUAL = "fdual"

    @property
    def opposite(self) -> "Side":
        return Side.FDUAL if self is Side.F else Side.F


class Route(str, Enum):
    """Independent ways of computing h*(L_R)."""

    DIRECT = "direct"
    LES = "les"
    SQUARE = "square"


class HypothesisFlags(BaseModel):
    """Assumptions the Square-route formulas are conditional on."""

    mirror_simply_connected: bool = Field(
        default=False, description="H^1 of the mirror threefold with Z2 coefficients vanishes"
    )
    rank_one_torsion_free: bool = Field(
        default=False, description="H^2 has rank one and H^3 has no 2-torsion"
    )


class BaseSource(BaseModel):
    """Where the affine base comes from."""

    preset: Optional[str] = Field(default="quintic", description="Built-in base preset")
    path: Optional[str] = Field(default=None, description="Base file (JSON or YAML)")

    @model_validator(mode="after")
    def exactly_one_source(self) -> "BaseSource":
        """A base has either a preset or a file, not both."""
        if self.path is not None:
            self.preset = None
        if self.preset is None and self.path is None:
            raise ValueError("base needs a preset or a path")
        return self


class FlipTarget(BaseModel):
    """An edge of a face triangulation to flip, by face-local point indices."""

    face: List[int] = Field(..., description="Polytope vertex triple spanning the 2-face")
    edge: List[int] = Field(..., description="Two point indices of the face triangulation")

    @field_validator("face")
    @classmethod
    def validate_face(cls, v: List[int]) -> List[int]:
        """Face is three distinct polytope vertices."""
        if len(v) != 3 or len(set(v)) != 3:
            raise ValueError("face must list three distinct polytope vertices")
        return sorted(v)

    @field_validator("edge")
    @classmethod
    def validate_edge(cls, v: List[int]) -> List[int]:
        """Edge is two distinct points."""
        if len(v) != 2 or v[0] == v[1]:
            raise ValueError("edge must list two distinct point indices")
        return sorted(v)

    def label(self) -> str:
        return f"{tuple(self.face)}:{tuple(self.edge)}"


class PipelineConfig(BaseModel):
    """Configuration of one end-to-end run."""

    base: BaseSource = Field(default_factory=BaseSource)
    sides: List[Side] = Field(default_factory=lambda: [Side.F, Side.FDUAL])
    routes: List[Route] = Field(default_factory=lambda: [Route.DIRECT, Route.LES])
    form: Optional[str] = Field(
        default=None, description="Intersection form (file path or preset name) for every side"
    )
    forms: Dict[Side, str] = Field(
        default_factory=dict, description="Per-side intersection forms, overriding `form`"
    )
    hypotheses: HypothesisFlags = Field(default_factory=HypothesisFlags)
    flips: List[FlipTarget] = Field(default_factory=list)
    refinement: str = Field(default="dual", description="Cell structure for sheaf cohomology")
    output_dir: Optional[str] = None
    seed: int = 0
    threads: int = 1

    @field_validator("sides", "routes")
    @classmethod
    def non_empty(cls, v: List) -> List:
        """At least one entry, duplicates removed, order kept."""
        if not v:
            raise ValueError("at least one entry is required")
        return list(dict.fromkeys(v))

    @field_validator("refinement")
    @classmethod
    def validate_refinement(cls, v: str) -> str:
        """Refinement names a known cell structure."""
        if v not in REFINEMENT_KINDS:
            raise ValueError(f"refinement must be one of {REFINEMENT_KINDS}")
        return v

    @model_validator(mode="after")
    def square_needs_form(self) -> "PipelineConfig":
        """The square route cannot run without an intersection form."""
        if Route.SQUARE in self.routes:
            missing = [s.value for s in self.sides if self.form_for(s) is None]
            if missing:
                raise ValueError(f"square route requires a form for sides {missing}")
        return self

    def form_for(self, side: Side) -> Optional[str]:
        return self.forms.get(side, self.form)


class FaceEntry(BaseModel):
    """Triangles of one 2-face, as point-index triples in face order."""

    face: List[int]
    triangles: List[List[int]]

    @field_validator("face")
    @classmethod
    def validate_face(cls, v: List[int]) -> List[int]:
        """Face is three distinct polytope vertices."""
        if len(v) != 3 or len(set(v)) != 3:
            raise ValueError("face must list three distinct polytope vertices")
        return sorted(v)

    @field_validator("triangles")
    @classmethod
    def validate_triangles(cls, v: List[List[int]]) -> List[List[int]]:
        """Every triangle has three point indices."""
        if any(len(t) != 3 for t in v):
            raise ValueError("every triangle needs exactly three point indices")
        return v


class BaseFile(BaseModel):
    """On-disk description of an affine base (JSON or YAML)."""

    schema_version: int = 1
    name: str = "custom"
    preset: Optional[str] = None
    vertices: List[List[int]]
    faces: List[FaceEntry]

    @field_validator("vertices")
    @classmethod
    def validate_vertices(cls, v: List[List[int]]) -> List[List[int]]:
        """Five integer 4-vectors."""
        if len(v) != 5 or any(len(p) != 4 for p in v):
            raise ValueError("vertices must be five integer 4-vectors")
        return v


class FormFile(BaseModel):
    """On-disk triple intersection form; entries are 1-based ``[i, j, k, t]``."""

    dim: int = Field(..., ge=0)
    basis: Optional[List[str]] = None
    entries: List[List[int]] = Field(default_factory=list)
    dbar: Optional[List[int]] = Field(default=None, alias="Dbar")
    dbar_cube: Optional[int] = Field(default=None, alias="Dbar_cube")
    provenance: Optional[str] = None

    model_config = {"populate_by_name": True}

    @field_validator("entries")
    @classmethod
    def validate_entries(cls, v: List[List[int]]) -> List[List[int]]:
        """Each entry is ``i j k t``."""
        if any(len(e) != 4 for e in v):
            raise ValueError("form entries must have the shape [i, j, k, t]")
        return v


class CheckResult(BaseModel):
    """Outcome of a single diagnostic check."""

    name: str
    passed: bool
    detail: str = ""


class DiagnosticsReport(BaseModel):
    """Result of base validation."""

    checks: List[CheckResult] = Field(default_factory=list)
    passed: bool = True

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name=name, passed=passed, detail=detail))
        self.passed = self.passed and passed

    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]


class OrbitInfo(BaseModel):
    """One connected component of the real locus over a region."""

    points: List[int]
    degree: int
    branch_points: List[str] = Field(default_factory=list)
    ramification: Optional[int] = None
    boundary_euler: Optional[int] = None


class ComponentReport(BaseModel):
    """Orbit partition of the eight 2-torsion labels."""

    side: Optional[Side] = None
    orbits: List[OrbitInfo]
    torus_components: Optional[int] = None

    @property
    def count(self) -> int:
        return len(self.orbits)

    def partition(self) -> List[List[int]]:
        return [o.points for o in self.orbits]


class BettiReport(BaseModel):
    """Mod-2 Betti numbers of the real Lagrangian from one route."""

    route: Route
    side: Side
    betti: List[int] = Field(..., description="h^0..h^3")
    h1_base: Optional[int] = None
    kernel_square: Optional[int] = None
    delta: Optional[int] = None
    hypotheses: Optional[HypothesisFlags] = None

    @field_validator("betti")
    @classmethod
    def four_entries(cls, v: List[int]) -> List[int]:
        """Betti vector covers degrees 0..3."""
        if len(v) != 4:
            raise ValueError("betti must list h^0..h^3")
        return v


class ExactnessNode(BaseModel):
    """One term of the long exact sequence with its incoming and outgoing ranks."""

    name: str
    dim: int
    rank_in: int
    rank_out: int

    @property
    def exact(self) -> bool:
        return self.dim == self.rank_in + self.rank_out


class LESReport(BaseModel):
    """Long exact sequence of 0 -> R^1 -> F -> R^2 -> 0 on the base."""

    side: Side
    refinement: str
    dims: Dict[str, List[int]] = Field(..., description="h^0..h^3 per sheaf")
    beta_ranks: List[int] = Field(..., description="rank of beta_j: H^j(R^2) -> H^{j+1}(R^1)")
    beta_shape: List[int]
    beta_matrix: List[str] = Field(default_factory=list, description="Rows of beta_1 as 0/1 strings")
    beta_rank: int
    beta_kernel: int
    nodes: List[ExactnessNode] = Field(default_factory=list)
    alternating_sum: int = 0
    exact: bool = True
    splitting_holds: Optional[bool] = None
    representative_checks: int = Field(0, description="Seeded checks that beta_1 ignores the representative")
    betti: List[int] = Field(..., description="h^j(L_R) from the sequence and the splitting")


class CohomologyReport(BaseModel):
    """Cohomology dimensions of one sheaf."""

    sheaf: str
    refinement: str
    cells: List[int]
    cochain_dims: List[int]
    dims: List[int]


class SquareReport(BaseModel):
    """Rank data of the Square map of an intersection form."""

    form: str
    dim: int
    rank: int
    kernel: int
    delta: Optional[int] = None
    betti: Optional[BettiReport] = None


class MonodromyRow(BaseModel):
    """One generator of the monodromy table at a polytope vertex."""

    label: str
    d: List[int]
    n: List[int]
    matrix: List[List[int]]
    permutation: str


class SideReport(BaseModel):
    """All routes for one side."""

    side: Side
    routes: Dict[Route, BettiReport] = Field(default_factory=dict)
    les: Optional[LESReport] = None
    components: Optional[ComponentReport] = None
    agreement: bool = True


class RunReport(BaseModel):
    """Top-level report of `run`."""

    config: PipelineConfig
    sides: List[SideReport] = Field(default_factory=list)
    agreement: bool = True
    timings: Dict[str, float] = Field(default_factory=dict, exclude=True)


class FlipStepReport(BaseModel):
    """State after one scripted flip (step 0 is the unflipped base)."""

    step: int
    flip: Optional[FlipTarget] = None
    h1: Dict[Side, int] = Field(default_factory=dict)
    local: Dict[Side, ComponentReport] = Field(default_factory=dict)


class FlipExperimentReport(BaseModel):
    """Sequence of flip steps with per-side invariance verdicts."""

    steps: List[FlipStepReport] = Field(default_factory=list)
    invariant: Dict[Side, bool] = Field(default_factory=dict)
    asserted_sides: List[Side] = Field(default_factory=list)
