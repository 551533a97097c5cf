"""Evaluation of one candidate at one screening stage."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from arnlab.data.dataset import SplitDataset
from arnlab.dsl.parser import parse
from arnlab.errors import CompileError, DslError
from arnlab.evolve.candidate import Candidate
from arnlab.evolve.plan import StagePlan
from arnlab.network.net import Network, NetworkConfig
from arnlab.trainer.session import train
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class StageJob:
    candidate_id: str
    source: str
    stage: int
    seed: int


@dataclass(frozen=True)
class StageOutcome:
    candidate_id: str
    stage: int
    loss: float
    diagnostic: Optional[str] = None


def candidate_seed(run_seed: int, generation: int, index: int) -> int:
    """Training seed of a candidate, independent of worker scheduling."""
    return int(np.random.SeedSequence([run_seed, generation, index]).generate_state(1)[0])


def stage_data(data: SplitDataset, last_timesteps: Optional[int]) -> SplitDataset:
    if last_timesteps is None:
        return data
    return SplitDataset(
        train=data.train.last_timesteps(last_timesteps),
        validation=data.validation.last_timesteps(last_timesteps),
        test=data.test,
    )


def evaluate_stage(job: StageJob, plan: StagePlan, data: SplitDataset) -> StageOutcome:
    """Train the job's program with the stage budget; failures become +inf."""
    spec = plan.stages[job.stage]
    config = plan.stage_config(job.stage, job.seed)
    try:
        program = parse(job.source)
        network = Network.from_program(
            program,
            NetworkConfig(
                nodes=config.nodes,
                n_in=data.train.n_in,
                n_out=data.train.n_out,
                task=data.train.task,
            ),
        )
    except (DslError, CompileError) as e:
        logger.warning("candidate %s does not compile: %s", job.candidate_id, e)
        return StageOutcome(job.candidate_id, job.stage, math.inf, f"compile: {e}")

    result = train(network, stage_data(data, spec.last_timesteps), config)
    value = result.evaluation_value
    diagnostic = "diverged" if result.diverged else None
    if not math.isfinite(value):
        logger.warning("candidate %s failed stage %d (%s)", job.candidate_id, job.stage + 1, diagnostic or "non-finite")
    return StageOutcome(job.candidate_id, job.stage, value, diagnostic)


# Worker processes receive the data once through the pool initializer.
_worker_plan: Optional[StagePlan] = None
_worker_data: Optional[SplitDataset] = None


def init_worker(plan: StagePlan, data: SplitDataset) -> None:
    global _worker_plan, _worker_data
    _worker_plan, _worker_data = plan, data


def run_stage_job(job: StageJob) -> StageOutcome:
    return evaluate_stage(job, _worker_plan, _worker_data)


def evaluate_staged(candidate: Candidate, plan: StagePlan, data: SplitDataset, seed: int) -> Candidate:
    """Run one candidate through every active stage, stopping at a failure.

    Generation-level culling lives in the screening stages; a lone
    candidate always ranks first among itself.
    """
    for stage in range(len(plan.active_stages)):
        job = StageJob(candidate.candidate_id, candidate.source, stage, seed)
        outcome = evaluate_stage(job, plan, data)
        candidate.record(outcome.loss)
        candidate.diagnostic = outcome.diagnostic
        if not math.isfinite(outcome.loss):
            break
    return candidate
