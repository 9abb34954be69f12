"""Command-line interface of the toolkit (``syz-lagrangian``)."""

import functools
import logging
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, TypeVar, Union

import click
import typer
from pydantic import BaseModel

from .core.config import REFINEMENT_KINDS, configure_logging, settings
from .core.errors import InputError, RouteDisagreement, SyzError, ValidationFailure
from .core.schemas import (
    BaseSource,
    CohomologyReport,
    ComponentReport,
    DiagnosticsReport,
    FlipExperimentReport,
    HypothesisFlags,
    MonodromyRow,
    PipelineConfig,
    RunReport,
    Side,
    SquareReport,
)
from .geometry.base import PRESETS, BaseComplex, build_base, flip, legal_flips, save_base, validate_base
from .geometry.discriminant import DeltaSign
from .mirror.square import betti_via_square, load_form, square_report
from .monodromy.components import (
    component_orbits,
    euler_characteristic,
    local_negative_edge_analysis,
    local_vertex_analysis,
    negative_edge_rep,
    negative_vertex_rep,
    positive_vertex_rep,
    summarize_components,
)
from .monodromy.loops import global_permutation_rep, vertex_generators, vertex_permutation_rep
from .monodromy.torsion import torsion_action
from .services.pipeline import PipelineRunner, check_invariance, flip_experiment
from .services.storage import ReportStorage, dump_report, load_pipeline_config
from .sheaf.cech import cech_sheaf
from .sheaf.cellular import pushforward_sheaf, sheaf_cohomology
from .sheaf.les import assemble_les, square_comparison
from .sheaf.local_system import SIDE_LABELS, LocalSystemLabel, build_local_system

logger = logging.getLogger(__name__)

CONFIGS_DIR = Path(__file__).parent / "services" / "configs"

app = typer.Typer(
    help="Mod-2 Betti numbers of real Lagrangians in SYZ fibrations.",
    no_args_is_help=True,
)
base_app = typer.Typer(help="Build, flip and validate integral affine bases.", no_args_is_help=True)
mono_app = typer.Typer(help="Monodromy tables, torsion orbits and Euler characteristics.", no_args_is_help=True)
app.add_typer(base_app, name="base")
app.add_typer(mono_app, name="mono")


class ComponentScope(str, Enum):
    GLOBAL = "global"
    VERTEX = "vertex"
    NEGATIVE_EDGE = "negative-edge"
    POSITIVE_VERTEX = "positive-vertex"
    NEGATIVE_VERTEX = "negative-vertex"


@dataclass
class CLIState:
    """Global flags of one invocation."""

    out: Optional[Path] = None
    seed_flag: Optional[int] = None
    threads_flag: Optional[int] = None
    summary: bool = False
    emit_matrices: Optional[Path] = None
    progress: bool = True

    @property
    def threads(self) -> int:
        return self.threads_flag or settings.threads

    @property
    def seed(self) -> int:
        return settings.seed if self.seed_flag is None else self.seed_flag


F = TypeVar("F", bound=Callable[..., Any])


def handle_errors(func: F) -> F:
    """Turn toolkit errors into their exit codes."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except SyzError as e:
            logger.debug(f"{type(e).__name__} in {func.__name__}", exc_info=True)
            typer.echo(f"error: {e}", err=True)
            raise typer.Exit(code=e.exit_code)

    return wrapper  # type: ignore[return-value]


def _state(ctx: typer.Context) -> CLIState:
    root = ctx.find_root()
    if not isinstance(root.obj, CLIState):
        root.obj = CLIState()
    return root.obj


def _load_base(name_or_path: str) -> BaseComplex:
    if name_or_path in PRESETS:
        return build_base(BaseSource(preset=name_or_path))
    return build_base(BaseSource(path=name_or_path))


def _refinement(value: Optional[str]) -> str:
    value = value or settings.refinement
    if value not in REFINEMENT_KINDS:
        raise InputError(f"refinement must be one of {REFINEMENT_KINDS}, got {value!r}")
    return value


def parse_ints(text: str, count: int, what: str) -> List[int]:
    """Integers from "7,8", "(7, 8)" or "7 8"."""
    cleaned = text.strip().strip("()[]").replace(",", " ")
    try:
        values = [int(x) for x in cleaned.split()]
    except ValueError:
        raise InputError(f"{what} must be {count} integers, got {text!r}")
    if len(values) != count:
        raise InputError(f"{what} must be {count} integers, got {text!r}")
    return values


def _config_path(name_or_path: str) -> Path:
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = CONFIGS_DIR / f"{name_or_path}.yaml"
    if bundled.exists():
        return bundled
    raise InputError(f"no config file {name_or_path!r} and no bundled config of that name")


def _load_config(state: CLIState, name_or_path: str) -> PipelineConfig:
    cfg = load_pipeline_config(_config_path(name_or_path))
    if state.threads_flag is not None:
        cfg.threads = state.threads_flag
    if state.seed_flag is not None:
        cfg.seed = state.seed_flag
    return cfg


# Output


Report = Union[BaseModel, Dict[str, Any]]


def _jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, dict):
        return {str(k.value if isinstance(k, Enum) else k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    return value


def _summary_lines(report: Report) -> List[str]:
    if isinstance(report, RunReport):
        lines = ["side    route   h0   h1   h2   h3"]
        for side in report.sides:
            for route, betti in side.routes.items():
                lines.append(f"{side.side.value:<7} {route.value:<7} " + " ".join(f"{b:>4}" for b in betti.betti))
        lines.append(f"agreement: {'pass' if report.agreement else 'FAIL'}")
        return lines
    if isinstance(report, FlipExperimentReport):
        sides = list(report.invariant)
        lines = ["step  flip              " + " ".join(f"{s.value:>7}" for s in sides)]
        for step in report.steps:
            target = f"{step.flip.face}:{step.flip.edge}" if step.flip else "-"
            lines.append(f"{step.step:<5} {target:<17} " + " ".join(f"{step.h1[s]:>7}" for s in sides))
        return lines
    if isinstance(report, DiagnosticsReport):
        return [f"{'ok  ' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in report.checks]
    if isinstance(report, ComponentReport):
        lines = [f"{info.degree} sheets over {info.points} chi(boundary)={info.boundary_euler}" for info in report.orbits]
        return lines + [f"{k}: {v}" for k, v in summarize_components(report).items()]
    data = _jsonable(report)
    if "rows" in data:
        return [f"T'_{row['label']}: {row['permutation']}" for row in data["rows"]]
    return [f"{k}: {v}" for k, v in sorted(data.items()) if not isinstance(v, (dict, list)) or len(str(v)) < 80]


def emit(state: CLIState, name: str, report: Report) -> None:
    """Print a report on stdout and store it under ``--out``."""
    payload = report if isinstance(report, BaseModel) else _jsonable(report)
    if state.summary:
        typer.echo("\n".join(_summary_lines(report)))
    else:
        typer.echo(dump_report(payload), nl=False)
    if state.out is not None:
        ReportStorage(state.out).write(name, payload)


@app.callback()
def main_callback(
    ctx: typer.Context,
    out: Optional[Path] = typer.Option(None, "--out", help="Directory receiving the JSON reports"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for randomized checks"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads for rank computations"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Logging level"),
    summary: bool = typer.Option(False, "--summary", help="Print a human-readable table instead of JSON"),
    emit_matrices: Optional[Path] = typer.Option(
        None, "--emit-matrices", help="Dump every differential in the gf2 text format"
    ),
    progress: Optional[bool] = typer.Option(None, "--progress/--no-progress", help="Show progress bars"),
) -> None:
    configure_logging(log_level)
    if threads is not None and threads < 1:
        typer.echo("error: --threads must be at least 1", err=True)
        raise typer.Exit(code=InputError.exit_code)
    ctx.obj = CLIState(
        out=out,
        seed_flag=seed,
        threads_flag=threads,
        summary=summary,
        emit_matrices=emit_matrices or (Path(settings.emit_matrices_dir) if settings.emit_matrices_dir else None),
        progress=settings.show_progress if progress is None else progress,
    )


# base


BASE_OPTION = typer.Option("quintic", "--base", help="Preset name or base file")


@base_app.command("build")
@handle_errors
def base_build(
    ctx: typer.Context,
    preset: str = typer.Option("quintic", "--preset", help=f"One of {', '.join(PRESETS)}"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write the base file here"),
) -> None:
    """Build a preset base and report its combinatorics."""
    base = build_base(BaseSource(preset=preset))
    graph = base.discriminant
    report = {
        "preset": preset,
        "polytope_cells": base.polytope.cell_counts(),
        "delta_vertices": {sign.value: graph.count(sign) for sign in DeltaSign},
        "delta_edges": len(graph.edges),
        "euler_characteristic": euler_characteristic(graph),
        "path": str(save_base(base, output)) if output is not None else None,
    }
    emit(_state(ctx), "base", report)


@base_app.command("flip")
@handle_errors
def base_flip(
    ctx: typer.Context,
    face: str = typer.Option(..., "--face", help="Polytope vertex triple, e.g. 0,1,2"),
    edge: str = typer.Option(..., "--edge", help="Face-local point pair, e.g. (7,8)"),
    base_name: str = BASE_OPTION,
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write the flipped base here"),
) -> None:
    """Flip one edge of a face triangulation."""
    base = _load_base(base_name)
    face_t = tuple(sorted(parse_ints(face, 3, "--face")))
    a, b = parse_ints(edge, 2, "--edge")
    local = {
        side.value: local_negative_edge_analysis(negative_edge_rep(base, face_t, (a, b), side))  # type: ignore[arg-type]
        for side in Side
    }
    flipped = flip(base, face_t, (a, b))  # type: ignore[arg-type]
    report = {
        "face": list(face_t),
        "edge": [a, b],
        "global_edge": list(base.global_edge(face_t, (a, b))),  # type: ignore[arg-type]
        "local": local,
        "legal_flips_after": [list(e) for e in legal_flips(flipped, face_t)],  # type: ignore[arg-type]
        "path": str(save_base(flipped, output)) if output is not None else None,
    }
    emit(_state(ctx), "flip", report)


@base_app.command("validate")
@handle_errors
def base_validate(
    ctx: typer.Context,
    base_name: str = BASE_OPTION,
    refinement: Optional[str] = typer.Option(None, "--refinement", help="dual, quad or simplicial"),
) -> None:
    """Structural checks on a base; exit code 3 when any fails."""
    report = validate_base(_load_base(base_name), _refinement(refinement))
    emit(_state(ctx), "validation", report)
    if not report.passed:
        raise ValidationFailure(f"base validation failed: {report.failed()}")


# mono


SIDE_OPTION = typer.Option(Side.F, "--side", help="f or fdual")


@mono_app.command("table")
@handle_errors
def mono_table(
    ctx: typer.Context,
    base_name: str = BASE_OPTION,
    side: Side = SIDE_OPTION,
    vertex: int = typer.Option(0, "--vertex", help="Polytope vertex the loops start from"),
) -> None:
    """The twelve generator loops at a vertex with their torsion permutations."""
    loops = vertex_generators(_load_base(base_name), vertex)
    rows = [
        MonodromyRow(
            label=loop.label,
            d=list(loop.d),
            n=list(loop.n),
            matrix=loop.matrix.tolist(),
            permutation=str(torsion_action(loop.matrix, side)),
        )
        for loop in loops
    ]
    emit(_state(ctx), "monodromy", {"side": side, "vertex": vertex, "rows": rows})


@mono_app.command("components")
@handle_errors
def mono_components(
    ctx: typer.Context,
    base_name: str = BASE_OPTION,
    side: Side = SIDE_OPTION,
    scope: ComponentScope = typer.Option(ComponentScope.GLOBAL, "--scope", help="Where to read the monodromy"),
    vertex: int = typer.Option(0, "--vertex", help="Polytope vertex for --scope vertex"),
    face: str = typer.Option("0,1,2", "--face", help="Face for --scope negative-edge"),
    edge: str = typer.Option("7,8", "--edge", help="Face-local edge for --scope negative-edge"),
    unit_edge: str = typer.Option("0,1", "--unit-edge", help="Global point pair for --scope positive-vertex"),
    triangle: int = typer.Option(0, "--triangle", help="Unit triangle for --scope negative-vertex"),
    refinement: Optional[str] = typer.Option(None, "--refinement", help="Cell structure for --scope global"),
) -> None:
    """Orbits of the 2-torsion labels: components of the real locus, globally or locally."""
    base = _load_base(base_name)
    if scope is ComponentScope.GLOBAL:
        report = component_orbits(global_permutation_rep(base, side, _refinement(refinement)))
    elif scope is ComponentScope.VERTEX:
        report = component_orbits(vertex_permutation_rep(base, vertex, side))
    elif scope is ComponentScope.NEGATIVE_EDGE:
        rep = negative_edge_rep(
            base, tuple(sorted(parse_ints(face, 3, "--face"))), tuple(parse_ints(edge, 2, "--edge")), side  # type: ignore[arg-type]
        )
        report = local_negative_edge_analysis(rep)
    elif scope is ComponentScope.POSITIVE_VERTEX:
        pair = parse_ints(unit_edge, 2, "--unit-edge")
        report = local_vertex_analysis(positive_vertex_rep(base, (pair[0], pair[1]), side))
    else:
        report = local_vertex_analysis(negative_vertex_rep(base, triangle, side))
    emit(_state(ctx), "components", report)


@mono_app.command("euler")
@handle_errors
def mono_euler(ctx: typer.Context, base_name: str = BASE_OPTION) -> None:
    """Signed vertex counts of the discriminant and the Euler characteristic of X."""
    graph = _load_base(base_name).discriminant
    report = {
        "positive": graph.count(DeltaSign.POSITIVE),
        "negative": graph.count(DeltaSign.NEGATIVE),
        "bivalent": graph.count(DeltaSign.BIVALENT),
        "euler_characteristic": euler_characteristic(graph),
    }
    emit(_state(ctx), "euler", report)


# sheaves


@app.command("cohomology")
@handle_errors
def cohomology(
    ctx: typer.Context,
    sheaf: LocalSystemLabel = typer.Option(..., "--sheaf", help="Local system pushed forward to the base"),
    base_name: str = BASE_OPTION,
    refinement: Optional[str] = typer.Option(None, "--refinement", help="dual, quad or simplicial"),
    cech: bool = typer.Option(False, "--cech", help="Sections over open stars of a simplicial refinement"),
) -> None:
    """h^0..h^3 of one constructible sheaf on the base."""
    state = _state(ctx)
    base = _load_base(base_name)
    kind = _refinement(refinement or ("simplicial" if cech else None))
    system = build_local_system(sheaf, base)
    if cech:
        cellular = cech_sheaf(system, base.refinement(kind), base.atlas)
    else:
        cellular = pushforward_sheaf(system, base, kind)
    dims = sheaf_cohomology(cellular, threads=state.threads)
    if state.emit_matrices is not None:
        cellular.emit_matrices(state.emit_matrices)
    report = CohomologyReport(
        sheaf=cellular.name,
        refinement=f"{kind}-cech" if cech else kind,
        cells=cellular.complex_.counts(),
        cochain_dims=cellular.cochain_dims,
        dims=dims,
    )
    emit(state, f"cohomology_{cellular.name}", report)


@app.command("les")
@handle_errors
def les(
    ctx: typer.Context,
    base_name: str = BASE_OPTION,
    side: Side = SIDE_OPTION,
    refinement: Optional[str] = typer.Option(None, "--refinement", help="dual, quad or simplicial"),
    check_splitting: bool = typer.Option(True, "--check-splitting/--no-check-splitting"),
    compare_square: bool = typer.Option(
        False, "--compare-square", help="Also compare beta_1 with the squares of the mirror classes"
    ),
) -> None:
    """The long exact sequence of 0 -> R^1 -> Q -> R^2 -> 0 with its connecting maps."""
    state = _state(ctx)
    base = _load_base(base_name)
    kind = _refinement(refinement)
    report = assemble_les(
        base, side, kind, threads=state.threads, check_splitting=check_splitting, seed=state.seed
    )
    if state.emit_matrices is not None:
        r1, quotient, r2, _ = SIDE_LABELS[side]
        for label in (r1, quotient, r2):
            pushforward_sheaf(build_local_system(label, base), base, kind).emit_matrices(state.emit_matrices)
    if not compare_square:
        emit(state, f"les_{side.value}", report)
        return
    comparison = square_comparison(base, side)
    emit(
        state,
        f"les_{side.value}",
        {
            "les": report,
            "square_comparison": {"equal": comparison.equal, "rank": comparison.rank, "kernel": comparison.kernel},
        },
    )
    if not comparison.equal:
        raise RouteDisagreement(f"beta_1 differs from the mirror square map on side {side.value}")


@app.command("square")
@handle_errors
def square(
    ctx: typer.Context,
    form: Optional[str] = typer.Option(None, "--form", help="Form preset (quintic, cube4) or form file"),
    with_betti: bool = typer.Option(False, "--report", help="Also derive h*(L) from the form"),
    side: Side = SIDE_OPTION,
    h1_base: Optional[int] = typer.Option(None, "--h1-base", help="h^1(B, R^1) if already known"),
    base_name: str = BASE_OPTION,
    mirror_simply_connected: bool = typer.Option(False, "--mirror-simply-connected", help="H^1(mirror, Z2) = 0"),
    rank_one: bool = typer.Option(False, "--rank-one-torsion-free", help="H^2(mirror, Z) = Z, torsion free"),
    components: int = typer.Option(2, "--components", help="Components of the real Lagrangian"),
) -> None:
    """Rank and kernel of D -> D^2 mod 2 for a triple intersection form."""
    state = _state(ctx)
    name = form or settings.form_path
    if name is None:
        raise InputError("--form is required (or set FORM_PATH)")
    intersection = load_form(name)
    report: SquareReport = square_report(intersection)
    if with_betti:
        expected = None
        if h1_base is None:
            base = _load_base(base_name)
            runner = PipelineRunner(PipelineConfig(threads=state.threads))
            h1_base = runner.h1_base(base, side)
            expected = runner.h1_base(base, side.opposite)
        report.betti = betti_via_square(
            h1_base,
            intersection,
            HypothesisFlags(mirror_simply_connected=mirror_simply_connected, rank_one_torsion_free=rank_one),
            side=side,
            components=components,
            expected_dim=expected,
        )
    emit(state, f"square_{intersection.name}", report)


# pipelines


@app.command("run")
@handle_errors
def run(
    ctx: typer.Context,
    config: str = typer.Option("quintic_default", "--config", help="Config file or bundled config name"),
) -> None:
    """All requested routes for all requested sides; exit code 2 when they disagree."""
    state = _state(ctx)
    cfg = _load_config(state, config)
    runner = PipelineRunner(cfg, emit_matrices_dir=str(state.emit_matrices) if state.emit_matrices else None)
    report = runner.run()
    if state.out is None and cfg.output_dir is not None:
        state.out = Path(cfg.output_dir)
    emit(state, "run", report)
    if state.out is not None:
        ReportStorage(state.out).write_timings(report.timings)
    if not report.agreement:
        raise RouteDisagreement("routes disagree; see the report")


@app.command("flip-experiment")
@handle_errors
def flip_experiment_command(
    ctx: typer.Context,
    config: str = typer.Option("flip_default", "--config", help="Config file or bundled config name"),
) -> None:
    """h^1 after every scripted flip; exit code 3 when it changes."""
    state = _state(ctx)
    cfg = _load_config(state, config)
    report = flip_experiment(cfg, show_progress=state.progress)
    emit(state, "flip_experiment", report)
    check_invariance(report)


def main() -> None:
    """Console entry point; usage errors exit with the input error code."""
    try:
        code = app(standalone_mode=False)
    except click.UsageError as e:
        e.show()
        sys.exit(InputError.exit_code)
    except click.Abort:
        typer.echo("Aborted.", err=True)
        sys.exit(1)
    sys.exit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    main()
