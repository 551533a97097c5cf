"""Weight initialization for the recurrent layer."""

from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from arnlab.compiler.layout import WeightLayout

INIT_SCALE = 0.1
HOLLOW_KEYS = ("W", "P")
LAYER_KEYS = ("U", "W", "P", "b", "aux")

Weights = dict[str, np.ndarray]


def glorot_uniform(rng: np.random.Generator, fan_out: int, fan_in: int, scale: float = INIT_SCALE) -> np.ndarray:
    bound = scale * np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_out, fan_in))


def orthogonal(rng: np.random.Generator, n: int, scale: float = INIT_SCALE) -> np.ndarray:
    """Scaled orthogonal matrix from the sign-corrected QR of a Gaussian."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q *= np.sign(np.diag(r))
    return scale * q


def zero_diagonals(weights: Weights) -> None:
    """Restore the hollow invariant of every recurrent and peep matrix in place."""
    for key in HOLLOW_KEYS:
        stack = weights[key]
        idx = np.arange(stack.shape[-1])
        stack[..., idx, idx] = 0.0


def init_weights(
    layout: WeightLayout,
    seed: int,
    bias_offsets: Optional[Mapping[int, float]] = None,
) -> Weights:
    """Fresh layer weights for ``layout``.

    Input matrices are Glorot-uniform and recurrent/peep matrices orthogonal,
    both scaled by 0.1, then hollowed.  Biases start at zero plus the optional
    per-mapping ``bias_offsets``; auxiliary vectors start at one.

    Args:
        layout: Shapes to fill
        seed: Seed of the generator; equal seeds give identical weights
        bias_offsets: Mapping index -> constant added to that bias vector

    Returns:
        Dict with keys U, W, P, b and aux
    """
    rng = np.random.default_rng(seed)
    shapes = layout.shapes()
    n_maps, l, n_in = shapes["U"]
    weights: Weights = {
        "U": np.stack([glorot_uniform(rng, l, n_in) for _ in range(n_maps)]),
        "W": np.stack([orthogonal(rng, l) for _ in range(n_maps)]),
        "P": np.stack([orthogonal(rng, l) for _ in range(n_maps)]),
        "b": np.zeros(shapes["b"]),
        "aux": np.ones(shapes["aux"]),
    }
    for mapping, offset in (bias_offsets or {}).items():
        if not 0 <= mapping < n_maps:
            raise ValueError(f"bias offset for unknown mapping {mapping}")
        weights["b"][mapping] += offset
    zero_diagonals(weights)
    return weights
