"""The full network: one ARN layer unrolled in time plus a two-layer backend."""

from __future__ import annotations

from typing import Literal, Mapping, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from arnlab.compiler.kernel import NeuronKernel, compile_program
from arnlab.dsl.ast import NeuronProgram
from arnlab.dsl.typecheck import typecheck
from arnlab.runtime.executor import LayerParams, LayerState, forward_kernel
from arnlab.runtime.init import INIT_SCALE, Weights, glorot_uniform, init_weights
from arnlab.runtime.tape import Tape, Tensor

Task = Literal["regression", "classification"]
BACKEND_KEYS = ("V1", "c1", "V2", "c2")
MAX_NODES = 128


def is_node_count(n: int) -> bool:
    """True for l = 2^i, i = 1..7."""
    return 2 <= n <= MAX_NODES and n & (n - 1) == 0


class NetworkConfig(BaseModel):
    """Shape of a network around one neuron."""

    nodes: int = Field(16, description="Recurrent nodes l, a power of two up to 128")
    n_in: int = Field(..., ge=1, description="Input features per timestep")
    n_out: int = Field(..., ge=1, description="Outputs (classes or regression targets)")
    task: Task = Field(..., description="regression or classification")

    @field_validator("nodes")
    @classmethod
    def validate_nodes(cls, v: int) -> int:
        if not is_node_count(v):
            raise ValueError(f"nodes must be a power of two between 2 and {MAX_NODES}, got {v}")
        return v


class Network:
    """A compiled neuron wired into the recurrent-layer-plus-backend architecture."""

    def __init__(self, config: NetworkConfig, kernel: NeuronKernel):
        if kernel.layout.nodes != config.nodes or kernel.layout.n_in != config.n_in:
            raise ValueError("kernel was compiled for a different layer size")
        self.config = config
        self.kernel = kernel

    @classmethod
    def from_program(cls, program: NeuronProgram, config: NetworkConfig) -> "Network":
        kernel = compile_program(typecheck(program), config.nodes, config.n_in)
        return cls(config, kernel)

    def init_weights(self, seed: int, bias_offsets: Optional[Mapping[int, float]] = None) -> Weights:
        """Layer weights plus Glorot x 0.1 backend weights with zero biases."""
        weights = init_weights(self.kernel.layout, seed, bias_offsets)
        rng = np.random.default_rng([seed, 1])
        l, n_out = self.config.nodes, self.config.n_out
        weights["V1"] = glorot_uniform(rng, n_out, l, INIT_SCALE)
        weights["c1"] = np.zeros(n_out)
        weights["V2"] = glorot_uniform(rng, n_out, n_out, INIT_SCALE)
        weights["c2"] = np.zeros(n_out)
        return weights

    def forward(self, weights: Weights, inputs: np.ndarray, tape: Tape) -> tuple[Tensor, dict[str, Tensor]]:
        """Unroll the layer over ``inputs`` (B, n_t, n_in) from zero states.

        Returns:
            Predictions, (B, n_t, n_out) for regression and final-step logits
            (B, n_out) for classification, and the parameter leaves by name
        """
        if inputs.ndim != 3 or inputs.shape[2] != self.config.n_in:
            raise ValueError(f"expected inputs (B, n_t, {self.config.n_in}), got {inputs.shape}")
        batch, n_t, _ = inputs.shape
        if n_t < 1:
            raise ValueError("series need at least one timestep")

        params = LayerParams.bind(weights, tape)
        backend = {key: tape.parameter(weights[key]) for key in BACKEND_KEYS}
        state = LayerState.zeros(batch, self.config.nodes)
        outputs: list[Tensor] = []
        for t in range(n_t):
            state = forward_kernel(self.kernel, params, state, tape.constant(inputs[:, t, :]), tape)
            outputs.append(state.y)

        if self.config.task == "classification":
            hidden = outputs[-1]
        else:
            hidden = tape.stack(outputs, axis=1)
        h = tape.activation("tanh", tape.linear(hidden, backend["V1"], backend["c1"]))
        predictions = tape.linear(h, backend["V2"], backend["c2"])
        return predictions, {**params.leaves, **backend}

    def predict(self, weights: Weights, inputs: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            predictions, _ = self.forward(weights, inputs, Tape(record=False))
        return predictions.value


def forward_net(config: NetworkConfig, kernel: NeuronKernel, weights: Weights, inputs: np.ndarray) -> np.ndarray:
    """Predictions of the network without recording gradients."""
    return Network(config, kernel).predict(weights, inputs)
