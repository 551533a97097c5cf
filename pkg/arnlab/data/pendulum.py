"""Planar double pendulum with point masses, integrated with classical RK4.

State rows are ``(theta1, theta2, omega1, omega2)``; angles are measured
from the downward vertical.  Masses and rod lengths are 1 and g = 9.81.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field

from arnlab.data.dataset import Dataset
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)

GRAVITY = 9.81
MASS = 1.0
LENGTH = 1.0
DT_INTERNAL = 1e-3
DT_SAMPLE = 0.05
FEATURES = ("x0", "x1", "x2", "x3")
TARGETS = ("y0", "y1", "y2", "y3")


class PendulumConfig(BaseModel):
    """Defaults for generated pendulum datasets (the ``pendulum`` section of app.yaml)."""

    series: int = Field(2000, ge=1, description="Number of series")
    steps: int = Field(64, ge=2, description="Timesteps per series")
    dt_sample: float = Field(DT_SAMPLE, gt=0, description="Sampling interval in seconds")


def derivatives(state: np.ndarray) -> np.ndarray:
    """Time derivative of (N, 4) states."""
    th1, th2, w1, w2 = state.T
    m1 = m2 = MASS
    l1 = l2 = LENGTH
    g = GRAVITY
    delta = th2 - th1
    sin_d, cos_d = np.sin(delta), np.cos(delta)
    den1 = (m1 + m2) * l1 - m2 * l1 * cos_d * cos_d
    den2 = (l2 / l1) * den1
    dw1 = (
        m2 * l1 * w1 * w1 * sin_d * cos_d
        + m2 * g * np.sin(th2) * cos_d
        + m2 * l2 * w2 * w2 * sin_d
        - (m1 + m2) * g * np.sin(th1)
    ) / den1
    dw2 = (
        -m2 * l2 * w2 * w2 * sin_d * cos_d
        + (m1 + m2) * (g * np.sin(th1) * cos_d - l1 * w1 * w1 * sin_d - g * np.sin(th2))
    ) / den2
    return np.stack([w1, w2, dw1, dw2], axis=1)


def rk4_step(state: np.ndarray, dt: float) -> np.ndarray:
    k1 = derivatives(state)
    k2 = derivatives(state + 0.5 * dt * k1)
    k3 = derivatives(state + 0.5 * dt * k2)
    k4 = derivatives(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(state: np.ndarray, dt: float, steps: int) -> np.ndarray:
    for _ in range(steps):
        state = rk4_step(state, dt)
    return state


def positions(state: np.ndarray) -> np.ndarray:
    """Cartesian (x1, y1, x2, y2) of both bobs for (N, 4) states."""
    th1, th2 = state[:, 0], state[:, 1]
    x1 = LENGTH * np.sin(th1)
    y1 = -LENGTH * np.cos(th1)
    x2 = x1 + LENGTH * np.sin(th2)
    y2 = y1 - LENGTH * np.cos(th2)
    return np.stack([x1, y1, x2, y2], axis=1)


def pendulum_energy(state: np.ndarray) -> np.ndarray:
    """Total mechanical energy per state row."""
    th1, th2, w1, w2 = state.T
    kinetic = 0.5 * MASS * (LENGTH * w1) ** 2 + 0.5 * MASS * (
        (LENGTH * w1) ** 2 + (LENGTH * w2) ** 2 + 2 * LENGTH * LENGTH * w1 * w2 * np.cos(th1 - th2)
    )
    potential = -2 * MASS * GRAVITY * LENGTH * np.cos(th1) - MASS * GRAVITY * LENGTH * np.cos(th2)
    return kinetic + potential


def random_initial_states(n_series: int, rng: np.random.Generator) -> np.ndarray:
    angles = rng.uniform(-np.pi, np.pi, size=(n_series, 2))
    velocities = rng.uniform(-2.0, 2.0, size=(n_series, 2))
    return np.concatenate([angles, velocities], axis=1)


def trajectories(initial: np.ndarray, n_samples: int, dt_sample: float = DT_SAMPLE, dt_internal: float = DT_INTERNAL) -> np.ndarray:
    """Bob positions at ``n_samples`` sampling instants: (N, n_samples, 4)."""
    substeps = max(1, int(round(dt_sample / dt_internal)))
    dt = dt_sample / substeps
    state = np.asarray(initial, dtype=np.float64)
    frames = [positions(state)]
    for _ in range(n_samples - 1):
        state = integrate(state, dt, substeps)
        frames.append(positions(state))
    return np.stack(frames, axis=1)


def gen_double_pendulum(
    n_series: int,
    n_steps: int,
    dt_sample: float = DT_SAMPLE,
    seed: int = 0,
) -> Dataset:
    """Next-step prediction dataset from random double-pendulum swings.

    Each series has ``n_steps`` timesteps whose inputs are the four bob
    coordinates at t and whose targets are the same coordinates at t + 1.
    """
    if n_steps < 2:
        raise ValueError(f"n_steps must be at least 2, got {n_steps}")
    if n_series < 1:
        raise ValueError(f"n_series must be positive, got {n_series}")
    rng = np.random.default_rng(seed)
    coords = trajectories(random_initial_states(n_series, rng), n_steps + 1, dt_sample)
    logger.info("generated %d pendulum series of %d steps", n_series, n_steps)
    return Dataset(
        series_ids=tuple(f"p{i:05d}" for i in range(n_series)),
        inputs=coords[:, :-1, :],
        targets=coords[:, 1:, :],
        task="regression",
        feature_names=FEATURES,
        target_names=TARGETS,
        metadata={"generator": "double-pendulum", "dt_sample": dt_sample, "seed": seed},
    )
