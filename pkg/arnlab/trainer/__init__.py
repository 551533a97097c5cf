"""ADAM training sessions and hyperparameter search."""

from arnlab.trainer.adam import Moments, adam_step
from arnlab.trainer.config import AdamConfig, ScheduleConfig, TrainConfig
from arnlab.trainer.schedule import lr_at
from arnlab.trainer.search import SearchSpace, TrainObjective, random_search
from arnlab.trainer.session import Checkpoint, SessionResult, plan_session, train

__all__ = [
    "AdamConfig",
    "Checkpoint",
    "Moments",
    "ScheduleConfig",
    "SearchSpace",
    "SessionResult",
    "TrainConfig",
    "TrainObjective",
    "adam_step",
    "lr_at",
    "plan_session",
    "random_search",
    "train",
]
