"""Learning-rate schedule."""

from __future__ import annotations

from typing import Optional

from arnlab.trainer.config import ScheduleConfig


def lr_at(schedule: ScheduleConfig, lr0: float, step: int, total_updates: Optional[int] = None) -> float:
    """Linearly decayed learning rate for update ``step`` (counted from 0).

    ``schedule.decay_steps`` falls back to ``total_updates`` when unset.
    """
    if step < 0:
        raise ValueError(f"step must be non-negative, got {step}")
    decay_steps = schedule.decay_steps or total_updates
    if not decay_steps:
        return lr0
    final = lr0 * schedule.decay_factor
    if step >= decay_steps:
        return final
    return lr0 + (final - lr0) * (step / decay_steps)
