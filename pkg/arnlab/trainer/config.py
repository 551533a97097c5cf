"""Training hyperparameters."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from arnlab.network.net import MAX_NODES, is_node_count


class AdamConfig(BaseModel):
    lr0: float = Field(1e-3, gt=0, description="Initial learning rate")
    beta1: float = Field(0.9, ge=0, lt=1, description="First moment decay")
    beta2: float = Field(0.999, ge=0, lt=1, description="Second moment decay")
    epsilon: float = Field(1e-8, gt=0, description="Denominator guard")


class ScheduleConfig(BaseModel):
    """Linear decay from lr0 to lr0 * decay_factor, then constant."""

    decay_steps: Optional[int] = Field(
        None, ge=1, description="Updates over which to decay; unset means the whole session"
    )
    decay_factor: float = Field(0.1, description="Final learning rate as a fraction of lr0")

    @field_validator("decay_factor")
    @classmethod
    def validate_decay_factor(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"decay_factor must lie in [0, 1], got {v}")
        return v


class TrainConfig(BaseModel):
    """Everything that determines a training session besides program and data."""

    adam: AdamConfig = Field(default_factory=AdamConfig)
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)
    batch_size: int = Field(4, ge=1, description="Examples per update")
    total_examples: int = Field(320_000, ge=1, description="Training examples consumed per session")
    checkpoint_every: int = Field(20_000, ge=1, description="Examples between validation checkpoints")
    nodes: int = Field(16, description="Recurrent nodes l")
    seed: int = Field(0, description="Seed for weights and shuffling")
    bias_offsets: dict[int, float] = Field(
        default_factory=dict, description="Mapping index -> constant added to its initial bias"
    )

    @field_validator("nodes")
    @classmethod
    def validate_nodes(cls, v: int) -> int:
        if not is_node_count(v):
            raise ValueError(f"nodes must be a power of two between 2 and {MAX_NODES}, got {v}")
        return v

    @model_validator(mode="after")
    def validate_budget(self) -> "TrainConfig":
        if self.total_examples % self.batch_size:
            raise ValueError("total_examples must be a multiple of batch_size")
        if self.checkpoint_every % self.batch_size:
            raise ValueError("checkpoint_every must be a multiple of batch_size")
        return self

    @property
    def total_updates(self) -> int:
        return self.total_examples // self.batch_size
