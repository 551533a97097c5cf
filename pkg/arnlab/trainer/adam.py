"""ADAM with bias correction over named weight arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from arnlab.runtime.init import HOLLOW_KEYS, Weights, zero_diagonals
from arnlab.trainer.config import AdamConfig


@dataclass
class Moments:
    m: Weights
    v: Weights

    @classmethod
    def zeros_like(cls, weights: Weights) -> "Moments":
        return cls(
            m={k: np.zeros_like(w) for k, w in weights.items()},
            v={k: np.zeros_like(w) for k, w in weights.items()},
        )


def adam_step(
    weights: Weights,
    grads: Weights,
    moments: Moments,
    t: int,
    lr_t: float,
    config: AdamConfig,
) -> tuple[Weights, Moments]:
    """One update at step ``t >= 1``; returns new weights and moments.

    Diagonals of the recurrent and peep stacks are zeroed afterwards.
    """
    if t < 1:
        raise ValueError(f"ADAM steps count from 1, got {t}")
    b1, b2 = config.beta1, config.beta2
    correction1 = 1.0 - b1**t
    correction2 = 1.0 - b2**t
    new_weights: Weights = {}
    m: Weights = {}
    v: Weights = {}
    for key, w in weights.items():
        g = grads[key]
        m[key] = b1 * moments.m[key] + (1.0 - b1) * g
        v[key] = b2 * moments.v[key] + (1.0 - b2) * g * g
        m_hat = m[key] / correction1
        v_hat = v[key] / correction2
        new_weights[key] = w - lr_t * m_hat / (np.sqrt(v_hat) + config.epsilon)
    if all(k in new_weights for k in HOLLOW_KEYS):
        zero_diagonals(new_weights)
    return new_weights, Moments(m, v)
