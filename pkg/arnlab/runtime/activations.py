"""Builtin activation functions and their derivatives.

Derivatives at kinks are fixed at 0: relu'(0) = 0 and srelu'(+-1) = 0.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

ArrayFn = Callable[[np.ndarray], np.ndarray]


def tanh(x: np.ndarray) -> np.ndarray:
    return np.tanh(x)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def srelu(x: np.ndarray) -> np.ndarray:
    """Saturated relu: the identity on [-1, 1], clamped outside."""
    return np.clip(x, -1.0, 1.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function written as a scaled tanh."""
    return (np.tanh(x / 2.0) + 1.0) / 2.0


# Derivatives take the input and the already computed output.
def _dtanh(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return 1.0 - y * y


def _drelu(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (x > 0.0).astype(np.float64)


def _dsrelu(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (np.abs(x) < 1.0).astype(np.float64)


def _dsigmoid(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return y * (1.0 - y)


ACTIVATION_FNS: dict[str, ArrayFn] = {
    "tanh": tanh,
    "relu": relu,
    "srelu": srelu,
    "sigmoid": sigmoid,
}

DERIVATIVES: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "tanh": _dtanh,
    "relu": _drelu,
    "srelu": _dsrelu,
    "sigmoid": _dsigmoid,
}


def activation(fn: str, x):
    """Apply a builtin by name to a scalar or an array."""
    if fn not in ACTIVATION_FNS:
        raise KeyError(f"unknown activation {fn!r}")
    result = ACTIVATION_FNS[fn](np.asarray(x, dtype=np.float64))
    return float(result) if np.ndim(result) == 0 else result


def derivative(fn: str, x):
    x = np.asarray(x, dtype=np.float64)
    result = DERIVATIVES[fn](x, ACTIVATION_FNS[fn](x))
    return float(result) if np.ndim(result) == 0 else result
