"""End-to-end runs: base, monodromy, sheaves and the three routes to h*(L_R)."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional

from tqdm import tqdm

from ..core.config import settings
from ..core.errors import InvarianceError, SyzError
from ..core.schemas import (
    BettiReport,
    ComponentReport,
    FlipExperimentReport,
    FlipStepReport,
    FlipTarget,
    PipelineConfig,
    Route,
    RunReport,
    Side,
    SideReport,
)
from ..geometry.base import BaseComplex, build_base, default_flip_script, flip
from ..mirror.square import betti_via_square, load_form
from ..monodromy.components import (
    component_orbits,
    local_negative_edge_analysis,
    negative_edge_rep,
)
from ..monodromy.loops import global_permutation_rep
from ..sheaf.cellular import pushforward_sheaf
from ..sheaf.les import assemble_les
from ..sheaf.local_system import SIDE_LABELS, build_local_system

logger = logging.getLogger(__name__)


@contextmanager
def _timed(timings: Dict[str, float], key: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[key] = timings.get(key, 0.0) + time.perf_counter() - start


class PipelineRunner:
    """Runs the requested routes for every requested side of one base."""

    def __init__(self, config: PipelineConfig, emit_matrices_dir: Optional[str] = None):
        self.config = config
        self.emit_matrices_dir = emit_matrices_dir or settings.emit_matrices_dir
        self.timings: Dict[str, float] = {}
        self._h1_cache: Dict[Side, int] = {}

    def h1_base(self, base: BaseComplex, side: Side) -> int:
        """h^1(B, R^1) for the given side."""
        if side not in self._h1_cache:
            system = build_local_system(SIDE_LABELS[side][0], base)
            sheaf = pushforward_sheaf(system, base, self.config.refinement)
            self._h1_cache[side] = sheaf.cohomology(threads=self.config.threads)[1]
        return self._h1_cache[side]

    def direct_route(self, base: BaseComplex, side: Side) -> BettiReport:
        system = build_local_system(SIDE_LABELS[side][3], base)
        sheaf = pushforward_sheaf(system, base, self.config.refinement)
        if self.emit_matrices_dir:
            sheaf.emit_matrices(self.emit_matrices_dir)
        betti = sheaf.cohomology(threads=self.config.threads)
        return BettiReport(
            route=Route.DIRECT, side=side, betti=betti, h1_base=self.h1_base(base, side)
        )

    def square_route(self, base: BaseComplex, side: Side, components: int) -> BettiReport:
        form = load_form(self.config.form_for(side))  # type: ignore[arg-type]
        return betti_via_square(
            self.h1_base(base, side),
            form,
            hypotheses=self.config.hypotheses,
            side=side,
            components=components,
            expected_dim=self.h1_base(base, side.opposite),
        )

    def run_side(self, base: BaseComplex, side: Side) -> SideReport:
        report = SideReport(side=side)
        with _timed(self.timings, f"{side.value}.components"):
            rep = global_permutation_rep(base, side, self.config.refinement)
            report.components = component_orbits(rep)
        for route in self.config.routes:
            with _timed(self.timings, f"{side.value}.{route.value}"):
                if route is Route.DIRECT:
                    report.routes[route] = self.direct_route(base, side)
                elif route is Route.LES:
                    report.les = assemble_les(
                        base,
                        side,
                        self.config.refinement,
                        threads=self.config.threads,
                        seed=self.config.seed,
                    )
                    report.routes[route] = BettiReport(
                        route=Route.LES,
                        side=side,
                        betti=report.les.betti,
                        h1_base=report.les.dims[SIDE_LABELS[side][0].value][1],
                        kernel_square=report.les.beta_kernel,
                    )
                else:
                    report.routes[route] = self.square_route(base, side, report.components.count)
        bettis = {tuple(r.betti) for r in report.routes.values()}
        report.agreement = len(bettis) == 1
        if not report.agreement:
            logger.warning(
                f"Routes disagree for side {side.value}: "
                f"{ {r.value: b.betti for r, b in report.routes.items()} }"
            )
        return report

    def run(self, base: Optional[BaseComplex] = None) -> RunReport:
        with _timed(self.timings, "base"):
            base = base if base is not None else build_base(self.config.base)
        sides = self.config.sides
        # Shared base data is built here, before any worker thread starts.
        base.refinement(self.config.refinement)
        _ = base.discriminant
        try:
            if self.config.threads > 1 and len(sides) > 1:
                with ThreadPoolExecutor(max_workers=min(len(sides), self.config.threads)) as pool:
                    side_reports = list(pool.map(lambda s: self.run_side(base, s), sides))
            else:
                side_reports = [self.run_side(base, s) for s in sides]
        except SyzError as e:
            logger.error(f"Failed to run pipeline: {e}")
            raise
        report = RunReport(
            config=self.config,
            sides=side_reports,
            agreement=all(s.agreement for s in side_reports),
            timings=dict(self.timings),
        )
        for side in side_reports:
            for route, betti in side.routes.items():
                logger.info(f"h*(L) side {side.side.value} via {route.value}: {betti.betti}")
        return report


def run_pipeline(cfg: PipelineConfig, base: Optional[BaseComplex] = None) -> RunReport:
    return PipelineRunner(cfg).run(base)


# Flip experiments

ASSERTED_SIDES = [Side.FDUAL]


def _h1_of_cover(base: BaseComplex, side: Side, refinement: str, threads: int) -> int:
    system = build_local_system(SIDE_LABELS[side][3], base)
    return pushforward_sheaf(system, base, refinement).cohomology(threads=threads)[1]


def _local_reports(base: BaseComplex, target: FlipTarget, sides: List[Side]) -> Dict[Side, ComponentReport]:
    face = tuple(target.face)
    edge = (target.edge[0], target.edge[1])
    return {
        side: local_negative_edge_analysis(negative_edge_rep(base, face, edge, side))  # type: ignore[arg-type]
        for side in sides
    }


def flip_experiment(cfg: PipelineConfig, show_progress: Optional[bool] = None) -> FlipExperimentReport:
    """h^1 of the real Lagrangian after each scripted flip, with the local model at each flip site."""
    script = cfg.flips or default_flip_script()
    show = settings.show_progress if show_progress is None else show_progress
    base = build_base(cfg.base)
    steps: List[FlipStepReport] = []
    progress = tqdm(total=len(script) + 1, desc="flip steps", disable=not show)
    try:
        for step in range(len(script) + 1):
            target = script[step - 1] if step else None
            local: Dict[Side, ComponentReport] = {}
            if target is not None:
                local = _local_reports(base, target, cfg.sides)
                base = flip(base, tuple(target.face), (target.edge[0], target.edge[1]))  # type: ignore[arg-type]
            h1 = {side: _h1_of_cover(base, side, cfg.refinement, cfg.threads) for side in cfg.sides}
            steps.append(FlipStepReport(step=step, flip=target, h1=h1, local=local))
            logger.info(f"Flip step {step}: h1 = { {s.value: v for s, v in h1.items()} }")
            progress.update(1)
    except SyzError as e:
        logger.error(f"Failed to run flip experiment: {e}")
        raise
    finally:
        progress.close()
    invariant = {side: len({s.h1[side] for s in steps}) == 1 for side in cfg.sides}
    return FlipExperimentReport(
        steps=steps,
        invariant=invariant,
        asserted_sides=[s for s in ASSERTED_SIDES if s in cfg.sides],
    )


def check_invariance(report: FlipExperimentReport) -> None:
    """Raise when h^1 changed along the script on a side where it must not."""
    broken = [s.value for s in report.asserted_sides if not report.invariant.get(s, True)]
    if broken:
        values = {s.value: [step.h1.get(s) for step in report.steps] for s in report.asserted_sides}
        raise InvarianceError(f"h^1 changed under flips on sides {broken}: {values}")
