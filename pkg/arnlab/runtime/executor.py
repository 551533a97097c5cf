"""Execution of a compiled kernel for one timestep of a whole layer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from arnlab.compiler.kernel import BINARY_OPCODES, NeuronKernel
from arnlab.runtime.init import LAYER_KEYS, Weights
from arnlab.runtime.tape import Tape, Tensor

ARITHMETIC = frozenset(BINARY_OPCODES.values())


@dataclass(frozen=True)
class LayerState:
    """The four internal states and the output of all l neurons, each (B, l)."""

    s0: Tensor
    s1: Tensor
    s2: Tensor
    s3: Tensor
    y: Tensor

    @classmethod
    def zeros(cls, batch: int, nodes: int) -> "LayerState":
        return cls(*(Tensor(np.zeros((batch, nodes))) for _ in range(5)))

    def as_tuple(self) -> tuple[Tensor, ...]:
        return (self.s0, self.s1, self.s2, self.s3, self.y)

    def is_finite(self) -> bool:
        return all(np.isfinite(t.value).all() for t in self.as_tuple())


@dataclass(frozen=True)
class LayerParams:
    """Layer weights as tape tensors; W and P are already hollow-masked."""

    U: Tensor
    W: Tensor
    P: Tensor
    b: Tensor
    aux: Tensor
    leaves: dict[str, Tensor]

    @classmethod
    def bind(cls, weights: Weights, tape: Tape) -> "LayerParams":
        leaves = {key: tape.parameter(weights[key]) for key in LAYER_KEYS}
        nodes = weights["W"].shape[-1]
        mask = tape.constant(1.0 - np.eye(nodes))
        return cls(
            U=leaves["U"],
            W=tape.mul(leaves["W"], mask),
            P=tape.mul(leaves["P"], mask),
            b=leaves["b"],
            aux=leaves["aux"],
            leaves=leaves,
        )


def forward_kernel(
    kernel: NeuronKernel,
    params: LayerParams,
    state: LayerState,
    x_t: Tensor,
    tape: Tape,
) -> LayerState:
    """Evaluate the neuron once for every node: (s0', s1', s2', s3', y').

    Args:
        kernel: Compiled neuron
        params: Bound layer weights
        state: States at time t, each (B, l)
        x_t: Inputs at time t, (B, n_in)
        tape: Records the operations when ``tape.record`` is set

    Returns:
        The next state; non-finite values propagate and are left to the caller
    """
    batch, nodes = state.y.shape
    if x_t.shape != (batch, kernel.layout.n_in):
        raise ValueError(f"input shape {x_t.shape} does not match ({batch}, {kernel.layout.n_in})")

    # One stacked product per list source covers every mapping.
    sources: dict[str, Tensor] = {}
    if kernel.uses_source("x"):
        sources["x"] = tape.stacked_linear(x_t, params.U)
    if kernel.uses_source("y"):
        sources["y"] = tape.stacked_linear(state.y, params.W)
    if kernel.uses_source("s0"):
        sources["s0"] = tape.stacked_linear(state.s0, params.P)

    inputs = {"s0": state.s0, "s1": state.s1, "s2": state.s2, "s3": state.s3, "y": state.y}
    regs: list[Tensor] = []
    for instr in kernel.instructions:
        match instr.op:
            case "param":
                out = inputs[instr.name]
            case "const":
                out = tape.constant(instr.value)
            case "lc":
                out = tape.take(params.b, (instr.mapping,))
                if instr.source in sources:
                    out = tape.add(out, tape.take(sources[instr.source], (slice(None), instr.mapping)))
                for k, arg in zip(instr.aux, instr.args):
                    out = tape.add(out, tape.mul(tape.take(params.aux, (k,)), regs[arg]))
            case op if op in ARITHMETIC:
                out = getattr(tape, op)(regs[instr.args[0]], regs[instr.args[1]])
            case fn:
                out = tape.activation(fn, regs[instr.args[0]])
        regs.append(out)

    shape = (batch, nodes)
    return LayerState(*(tape.broadcast_to(regs[r], shape) for r in kernel.outputs))
