"""Random search over training hyperparameters."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from arnlab.data.dataset import SplitDataset
from arnlab.dsl.parser import parse
from arnlab.network.net import Network, NetworkConfig
from arnlab.trainer.config import TrainConfig
from arnlab.trainer.session import train
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)

Objective = Callable[[TrainConfig], float]

# Parameters a search space may range over, with where they live in TrainConfig.
SEARCHABLE = {
    "lr0": ("adam", "lr0"),
    "beta1": ("adam", "beta1"),
    "beta2": ("adam", "beta2"),
    "epsilon": ("adam", "epsilon"),
    "decay_factor": ("schedule", "decay_factor"),
    "decay_fraction": ("schedule", "decay_steps"),
}


class Range(BaseModel):
    """Sampling range of one hyperparameter.

    ``log`` samples log-uniformly in [low, high]; ``log1m`` samples 1 - v
    log-uniformly, for momentum-like values close to one.
    """

    low: float
    high: float
    scale: Literal["linear", "log", "log1m"] = "linear"

    @model_validator(mode="after")
    def validate_bounds(self) -> "Range":
        if self.low > self.high:
            raise ValueError(f"empty range [{self.low}, {self.high}]")
        if self.scale == "log" and self.low <= 0:
            raise ValueError("log ranges need positive bounds")
        if self.scale == "log1m" and self.high >= 1:
            raise ValueError("log1m ranges need bounds below 1")
        return self

    def sample(self, rng: np.random.Generator) -> float:
        match self.scale:
            case "log":
                return float(np.exp(rng.uniform(np.log(self.low), np.log(self.high))))
            case "log1m":
                lo, hi = np.log(1.0 - self.high), np.log(1.0 - self.low)
                return float(np.clip(1.0 - np.exp(rng.uniform(lo, hi)), self.low, self.high))
        return float(rng.uniform(self.low, self.high))


class SearchSpace(BaseModel):
    """Ranges per hyperparameter plus optional node-count choices."""

    ranges: dict[str, Range] = Field(default_factory=dict)
    nodes: list[int] = Field(default_factory=list, description="Candidate node counts, sampled uniformly")

    @model_validator(mode="after")
    def validate_names(self) -> "SearchSpace":
        unknown = set(self.ranges) - set(SEARCHABLE)
        if unknown:
            raise ValueError(f"cannot search over {sorted(unknown)}; choose from {sorted(SEARCHABLE)}")
        return self

    @property
    def is_empty(self) -> bool:
        return not self.ranges and not self.nodes

    def sample(self, rng: np.random.Generator, base: TrainConfig) -> TrainConfig:
        """A copy of ``base`` with every searched parameter drawn from its range."""
        data = base.model_dump()
        for name in sorted(self.ranges):
            section, key = SEARCHABLE[name]
            value = self.ranges[name].sample(rng)
            if name == "decay_fraction":
                value = max(1, int(round(value * base.total_updates)))
            data[section][key] = value
        if self.nodes:
            data["nodes"] = int(self.nodes[int(rng.integers(len(self.nodes)))])
        return TrainConfig.model_validate(data)


@dataclass(frozen=True)
class SearchResult:
    best: TrainConfig
    best_index: int
    best_value: float
    values: list[float]
    configs: list[TrainConfig]


def sample_configs(space: SearchSpace, budget: int, seed: int, base: TrainConfig) -> list[TrainConfig]:
    rng = np.random.default_rng(seed)
    return [space.sample(rng, base) for _ in range(budget)]


def random_search(
    space: SearchSpace,
    objective: Objective,
    budget: int = 512,
    seed: int = 0,
    base: Optional[TrainConfig] = None,
    workers: int = 1,
) -> SearchResult:
    """Evaluate ``budget`` sampled configs and return the one with least validation loss.

    Ties go to the lowest sample index; non-finite values never win unless
    every sample failed.  With ``workers > 1`` the objective must be picklable.

    Raises:
        ValueError: empty space or budget below one
    """
    if space.is_empty:
        raise ValueError("search space has no parameters")
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    configs = sample_configs(space, budget, seed, base or TrainConfig())
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(objective, configs))
    else:
        values = [objective(c) for c in configs]

    values = [v if math.isfinite(v) else math.inf for v in values]
    best_index = 0
    for i, value in enumerate(values):
        if value < values[best_index]:
            best_index = i
    logger.info("random search: best sample %d of %d, value %.6g", best_index, budget, values[best_index])
    return SearchResult(configs[best_index], best_index, values[best_index], values, configs)


@dataclass(frozen=True)
class TrainObjective:
    """Validation loss of one full session; picklable for worker processes."""

    source: str
    data: SplitDataset

    def __call__(self, config: TrainConfig) -> float:
        train_set = self.data.train
        network = Network.from_program(
            parse(self.source),
            NetworkConfig(nodes=config.nodes, n_in=train_set.n_in, n_out=train_set.n_out, task=train_set.task),
        )
        return train(network, self.data, config).evaluation_value
