"""The evolution loop: mutate, screen in stages, keep a Pareto front."""

from __future__ import annotations

import asyncio
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from arnlab.data.dataset import SplitDataset
from arnlab.dsl.ast import NeuronProgram
from arnlab.dsl.parser import parse
from arnlab.evolve.audit import AUDIT_FILE, FRONT_CSV, AuditLog, FrontSnapshot, snapshot_name, write_front_csv
from arnlab.evolve.candidate import Candidate
from arnlab.evolve.mutate import mutate
from arnlab.evolve.pareto import ParetoFront, pareto_update
from arnlab.evolve.plan import StagePlan
from arnlab.evolve.staged import init_worker
from arnlab.stages.screening import ScreeningStage
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class EvolutionResult:
    front: ParetoFront
    candidates: list[Candidate] = field(default_factory=list)
    last_generation: int = 0


@dataclass
class _RunState:
    front: ParetoFront
    parents: list[str]
    generation: int


class Evolution:
    """Coordinator of one run; consumes evaluations in (generation, index) order."""

    def __init__(
        self,
        plan: StagePlan,
        data: SplitDataset,
        seed: int,
        out_dir: Optional[Path] = None,
        on_generation: Optional[Callable[[int, ParetoFront], None]] = None,
    ):
        self.plan = plan
        self.data = data
        self.seed = seed
        self.out_dir = Path(out_dir) if out_dir else None
        self.audit = AuditLog(self.out_dir / AUDIT_FILE) if self.out_dir else None
        self.on_generation = on_generation
        self.candidates: list[Candidate] = []

    async def screen(self, stages: list[ScreeningStage], generation: int, candidates: list[Candidate]) -> list[Candidate]:
        """Run candidates through the stages; returns those finishing the last one."""
        entering = candidates
        for stage in stages:
            if not entering:
                break
            await stage.run(generation, entering)
            if stage is stages[-1]:
                return [c for c in entering if math.isfinite(c.evaluation_value)]
            entering = stage.select(entering)
        return []

    def finish_generation(self, generation: int, candidates: list[Candidate], finished: list[Candidate], state: _RunState) -> None:
        for candidate in sorted(finished, key=lambda c: c.index):
            state.front = pareto_update(state.front, candidate.front_member())
        for candidate in candidates:
            if self.audit:
                self.audit.write(candidate.audit_record())
        self.candidates.extend(candidates)
        state.generation = generation
        if self.out_dir:
            FrontSnapshot(generation, self.seed, state.front, state.parents).save(
                self.out_dir / snapshot_name(generation)
            )
        best = state.front.best()
        logger.info(
            "generation %d: front size %d, best loss %s",
            generation,
            len(state.front),
            f"{best.loss:.6g}" if best else "n/a",
        )
        if self.on_generation:
            self.on_generation(generation, state.front)

    def breed(self, generation: int, state: _RunState) -> list[Candidate]:
        """Mutations of front members and last generation's stage-1 survivors."""
        rng = np.random.default_rng([self.seed, generation])
        pool = [(m.candidate_id, m.source) for m in state.front] + [
            (f"parent{i}", s) for i, s in enumerate(state.parents)
        ]
        parsed = {source: parse(source) for _, source in pool}
        children = []
        for index in range(self.plan.population_size):
            parent_id, source = pool[int(rng.integers(len(pool)))]
            mutation = mutate(parsed[source], rng)
            children.append(
                Candidate.create(mutation.program, generation, index, parent_id, mutation.transformation)
            )
        return children

    async def run(self, seed_program: Optional[NeuronProgram], generations: int, resume: Optional[FrontSnapshot], workers: int) -> EvolutionResult:
        executor = None
        if workers > 1:
            executor = ProcessPoolExecutor(max_workers=workers, initializer=init_worker, initargs=(self.plan, self.data))
        try:
            stages = [
                ScreeningStage(k, self.plan, self.data, self.seed, executor)
                for k in range(len(self.plan.active_stages))
            ]
            if resume is not None:
                state = _RunState(resume.front, list(resume.parents), resume.generation)
            else:
                seed = Candidate.create(seed_program, 0, 0)
                state = _RunState(ParetoFront(), [seed.source], 0)
                finished = await self.screen(stages, 0, [seed])
                self.finish_generation(0, [seed], finished, state)

            for generation in range(state.generation + 1, state.generation + generations + 1):
                if not len(state.front) and not state.parents:
                    logger.warning("no parents left at generation %d", generation)
                    break
                children = self.breed(generation, state)
                finished = await self.screen(stages, generation, children)
                state.parents = [c.source for c in stages[0].select(children)] if children else []
                self.finish_generation(generation, children, finished, state)
        finally:
            if executor is not None:
                executor.shutdown()

        if self.out_dir:
            write_front_csv(self.out_dir / FRONT_CSV, state.front)
        return EvolutionResult(state.front, self.candidates, state.generation)


def evolve_run(
    seed_program: Optional[NeuronProgram],
    plan: StagePlan,
    data: SplitDataset,
    generations: int,
    seed: int = 0,
    workers: int = 1,
    out_dir: Optional[Path] = None,
    resume: Optional[FrontSnapshot] = None,
    on_generation: Optional[Callable[[int, ParetoFront], None]] = None,
) -> EvolutionResult:
    """Evolve neurons from ``seed_program`` (or a resumed front) for ``generations``.

    Args:
        seed_program: Starting neuron, evaluated as generation 0; ignored on resume
        plan: Stage budgets and population size
        data: Preprocessed split
        generations: Generations after the seed (or after the resumed one)
        seed: Run seed; with it the front does not depend on ``workers``
        workers: Process count for candidate evaluation
        out_dir: Where the audit log, snapshots and scatter CSV go
        resume: Snapshot to continue from
        on_generation: Progress callback

    Returns:
        The final front, every candidate evaluated in this call and the last generation
    """
    if resume is None and seed_program is None:
        raise ValueError("a seed program or a snapshot to resume is required")
    if resume is not None:
        seed = resume.run_seed
    evolution = Evolution(plan, data, seed, out_dir, on_generation)
    return asyncio.run(evolution.run(seed_program, generations, resume, workers))
