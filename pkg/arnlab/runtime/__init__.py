"""Vectorized kernel execution with reverse-mode gradients."""

from arnlab.runtime.activations import activation
from arnlab.runtime.executor import LayerParams, LayerState, forward_kernel
from arnlab.runtime.init import init_weights, zero_diagonals
from arnlab.runtime.tape import Tape, Tensor, backward, softmax

__all__ = [
    "LayerParams",
    "LayerState",
    "Tape",
    "Tensor",
    "activation",
    "backward",
    "forward_kernel",
    "init_weights",
    "softmax",
    "zero_diagonals",
]
