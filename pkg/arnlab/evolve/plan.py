"""Staged screening plan and its cost arithmetic."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from arnlab.network.net import is_node_count
from arnlab.trainer.config import TrainConfig

STAGE3_COST_RATIO = 128.0


def stage_cost_multiplier(l: int, n_t: int) -> float:
    """Run-time ratio of stage 2 to stage 1: 8 (l/16)^2 n_t / 5."""
    return 8.0 * (l / 16.0) ** 2 * n_t / 5.0


def total_speedup(l: int, n_t: int) -> float:
    """Amplification of the staged scheme when each stage gets equal run time."""
    return stage_cost_multiplier(l, n_t) * STAGE3_COST_RATIO / 3.0


class StageSpec(BaseModel):
    """Budget of one screening stage.

    ``nodes`` fixes the layer size; otherwise it is the plan's node count
    divided by ``node_divisor``.
    """

    nodes: Optional[int] = Field(None, description="Fixed node count for this stage")
    node_divisor: int = Field(1, ge=1, description="Divisor of the full node count when nodes is unset")
    examples: int = Field(..., ge=1, description="Training examples for one candidate")
    last_timesteps: Optional[int] = Field(None, ge=1, description="Train and validate on the final k steps only")
    pass_fraction: float = Field(0.01, gt=0, le=1, description="Share of the generation that advances")

    @field_validator("nodes")
    @classmethod
    def validate_nodes(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and not is_node_count(v):
            raise ValueError(f"stage nodes must be a power of two between 2 and 128, got {v}")
        return v

    def resolve_nodes(self, full_nodes: int) -> int:
        return self.nodes if self.nodes is not None else max(2, full_nodes // self.node_divisor)


def default_stages() -> list[StageSpec]:
    return [
        StageSpec(nodes=4, examples=5_000, last_timesteps=5),
        StageSpec(node_divisor=4, examples=40_000),
        StageSpec(examples=320_000),
    ]


class StagePlan(BaseModel):
    """How candidates are screened and how large generations are."""

    nodes: int = Field(16, description="Full node count l")
    stages: list[StageSpec] = Field(default_factory=default_stages)
    max_stage: int = Field(3, ge=1, description="Deepest stage any candidate may reach")
    population_size: int = Field(256, ge=1, description="New candidates per generation")
    train: TrainConfig = Field(default_factory=TrainConfig, description="Optimizer settings shared by all stages")

    @field_validator("nodes")
    @classmethod
    def validate_nodes(cls, v: int) -> int:
        if not is_node_count(v):
            raise ValueError(f"nodes must be a power of two between 2 and 128, got {v}")
        return v

    @model_validator(mode="after")
    def validate_stages(self) -> "StagePlan":
        if not self.stages:
            raise ValueError("a plan needs at least one stage")
        examples = [s.examples for s in self.stages]
        if any(b <= a for a, b in zip(examples, examples[1:])):
            raise ValueError(f"stage example budgets must increase, got {examples}")
        for spec in self.stages:
            if not is_node_count(spec.resolve_nodes(self.nodes)):
                raise ValueError(f"stage resolves to {spec.resolve_nodes(self.nodes)} nodes, not a power of two")
            if spec.examples % self.train.batch_size:
                raise ValueError("stage example budgets must be multiples of the batch size")
        return self

    @property
    def active_stages(self) -> list[StageSpec]:
        return self.stages[: self.max_stage]

    def stage_config(self, stage: int, seed: int) -> TrainConfig:
        """TrainConfig for 0-based ``stage`` with a single end-of-session checkpoint."""
        spec = self.stages[stage]
        data = self.train.model_dump()
        data.update(
            nodes=spec.resolve_nodes(self.nodes),
            total_examples=spec.examples,
            checkpoint_every=spec.examples,
            seed=seed,
        )
        return TrainConfig.model_validate(data)
