"""Screening stages: train a generation's candidates with one stage budget."""

from __future__ import annotations

import asyncio
import math
from concurrent.futures import Executor
from typing import Optional

from arnlab.data.dataset import SplitDataset
from arnlab.evolve.candidate import Candidate
from arnlab.evolve.plan import StagePlan
from arnlab.evolve.staged import StageJob, StageOutcome, candidate_seed, evaluate_stage, run_stage_job
from arnlab.stages.base import Stage
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)


def stage_loss(candidate: Candidate, stage: int) -> float:
    results = candidate.stage_results
    return results[stage] if len(results) > stage else math.inf


def survivors(candidates: list[Candidate], pass_fraction: float, stage: int = 0) -> list[Candidate]:
    """The best ceil(pass_fraction * n) candidates by their loss at ``stage``.

    Non-finite losses never pass; ties go to the lower index.
    """
    if not candidates:
        return []
    quota = max(1, math.ceil(pass_fraction * len(candidates)))
    finite = [c for c in candidates if math.isfinite(stage_loss(c, stage))]
    ranked = sorted(finite, key=lambda c: (stage_loss(c, stage), c.index))
    return sorted(ranked[:quota], key=lambda c: c.index)


class ScreeningStage(Stage):
    """Evaluates candidates at one stage, on a process pool when given one."""

    def __init__(
        self,
        stage: int,
        plan: StagePlan,
        data: SplitDataset,
        run_seed: int,
        executor: Optional[Executor] = None,
    ):
        super().__init__(f"stage{stage + 1}")
        self.stage = stage
        self.plan = plan
        self.data = data
        self.run_seed = run_seed
        self.executor = executor

    def job(self, candidate: Candidate) -> StageJob:
        seed = candidate_seed(self.run_seed, candidate.generation, candidate.index)
        return StageJob(candidate.candidate_id, candidate.source, self.stage, seed)

    async def run(self, generation: int, items: list[Candidate]) -> list[StageOutcome]:
        """Evaluate ``items`` and record each loss on its candidate.

        Results come back in submission order whatever the worker timing.
        """
        jobs = [self.job(c) for c in items]
        if self.executor is None:
            outcomes = [evaluate_stage(job, self.plan, self.data) for job in jobs]
        else:
            loop = asyncio.get_running_loop()
            futures = [loop.run_in_executor(self.executor, run_stage_job, job) for job in jobs]
            outcomes = await asyncio.gather(*futures)
        for candidate, outcome in zip(items, outcomes):
            candidate.record(outcome.loss)
            if outcome.diagnostic:
                candidate.diagnostic = outcome.diagnostic
        logger.info(
            "generation %d %s: %d evaluated, %d finite",
            generation,
            self.stage_name,
            len(items),
            sum(math.isfinite(o.loss) for o in outcomes),
        )
        return list(outcomes)

    def select(self, items: list[Candidate]) -> list[Candidate]:
        return survivors(items, self.plan.stages[self.stage].pass_fraction, self.stage)
