"""One training session: minibatch ADAM with validation checkpointing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from arnlab.data.dataset import Dataset, SplitDataset
from arnlab.network.losses import loss, metrics
from arnlab.network.net import Network
from arnlab.runtime.init import Weights
from arnlab.runtime.tape import Tape, backward
from arnlab.trainer.adam import Moments, adam_step
from arnlab.trainer.config import TrainConfig
from arnlab.trainer.schedule import lr_at
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SessionPlan:
    updates: int
    checkpoints: int


def plan_session(config: TrainConfig) -> SessionPlan:
    """Number of updates and validation checkpoints of a full session."""
    updates = config.total_updates
    checkpoints = config.total_examples // config.checkpoint_every
    if config.total_examples % config.checkpoint_every:
        checkpoints += 1
    return SessionPlan(updates, checkpoints)


@dataclass
class Checkpoint:
    """Best weights seen so far and when they were captured."""

    validation_loss: float = math.inf
    weights: Optional[Weights] = None
    examples_seen: int = 0


@dataclass(frozen=True)
class HistoryRow:
    examples_seen: int
    train_loss: float
    validation_loss: float
    learning_rate: float


@dataclass
class SessionResult:
    checkpoint: Checkpoint
    history: list[HistoryRow] = field(default_factory=list)
    updates: int = 0
    diverged: bool = False

    @property
    def evaluation_value(self) -> float:
        """Best validation loss, or +inf when the session diverged."""
        return math.inf if self.diverged else self.checkpoint.validation_loss

    @property
    def failed(self) -> bool:
        return self.checkpoint.weights is None


def batches(n: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """Endless minibatch indices, reshuffling fully at every epoch."""
    buffer = np.empty(0, dtype=int)
    while True:
        while len(buffer) < batch_size:
            buffer = np.concatenate([buffer, rng.permutation(n)])
        yield buffer[:batch_size]
        buffer = buffer[batch_size:]


def validation_loss(
    network: Network,
    weights: Weights,
    dataset: Dataset,
    last_timesteps: Optional[int] = None,
) -> float:
    """Loss over a whole split without recording gradients; non-finite -> inf."""
    predictions = network.predict(weights, dataset.inputs)
    targets = dataset.targets
    if network.config.task == "regression" and last_timesteps is not None:
        predictions = predictions[:, -last_timesteps:]
        targets = targets[:, -last_timesteps:]
    with np.errstate(all="ignore"):
        values = metrics(predictions, targets, network.config.task)
    value = values["cce"] if network.config.task == "classification" else values["mse"]
    return value if math.isfinite(value) else math.inf


def _finite(grads: Weights) -> bool:
    return all(np.isfinite(g).all() for g in grads.values())


def train(
    network: Network,
    data: SplitDataset,
    config: TrainConfig,
    last_timesteps: Optional[int] = None,
    on_checkpoint: Optional[Callable[[HistoryRow], None]] = None,
) -> SessionResult:
    """Train ``network`` on ``data.train`` and keep the best validation weights.

    Args:
        network: Compiled network; its node count should match ``config.nodes``
        data: Preprocessed split
        config: Hyperparameters and budget
        last_timesteps: Regression loss only over the final k timesteps
        on_checkpoint: Called after every validation evaluation

    Returns:
        The best checkpoint with the loss history; a non-finite loss or
        gradient ends the session with ``diverged`` set
    """
    train_set = data.train
    if not train_set.is_encoded:
        raise ValueError("train() needs a preprocessed dataset")
    task = network.config.task
    total_updates = config.total_updates
    weights = network.init_weights(config.seed, config.bias_offsets)
    moments = Moments.zeros_like(weights)
    draw = batches(train_set.n_series, config.batch_size, np.random.default_rng([config.seed, 2]))

    result = SessionResult(checkpoint=Checkpoint())
    running = 0.0
    since_checkpoint = 0
    for step in range(1, total_updates + 1):
        idx = next(draw)
        lr = lr_at(config.schedule, config.adam.lr0, step - 1, total_updates)
        tape = Tape()
        with np.errstate(all="ignore"):
            predictions, leaves = network.forward(weights, train_set.inputs[idx], tape)
            value = loss(tape, predictions, train_set.targets[idx], task, last_timesteps)
            batch_loss = float(value.value)
            grads = backward(tape, value, leaves) if math.isfinite(batch_loss) else None
        if grads is None or not _finite(grads):
            logger.warning("session diverged at update %d (loss %s)", step, batch_loss)
            result.diverged = True
            break
        weights, moments = adam_step(weights, grads, moments, step, lr, config.adam)
        result.updates = step
        running += batch_loss
        since_checkpoint += 1

        examples_seen = step * config.batch_size
        if examples_seen % config.checkpoint_every == 0 or step == total_updates:
            val = validation_loss(network, weights, data.validation, last_timesteps)
            row = HistoryRow(examples_seen, running / since_checkpoint, val, lr)
            result.history.append(row)
            running, since_checkpoint = 0.0, 0
            if val < result.checkpoint.validation_loss:
                result.checkpoint = Checkpoint(val, {k: w.copy() for k, w in weights.items()}, examples_seen)
                logger.info("checkpoint at %d examples: validation loss %.6g", examples_seen, val)
            if on_checkpoint:
                on_checkpoint(row)
    return result
