"""Tape-based reverse-mode differentiation over numpy arrays.

Every operation is a method of :class:`Tape`.  With ``record=True`` an
operation whose inputs require gradients appends a node holding its
backward rule; :meth:`Tape.backward` replays the nodes in exact reverse
order.  With ``record=False`` the same calls only compute values, which is
how validation and prediction run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from arnlab.runtime.activations import ACTIVATION_FNS, DERIVATIVES

Backward = Callable[[np.ndarray], Sequence[np.ndarray | None]]


class Tensor:
    """A float64 array with an optional gradient slot."""

    __slots__ = ("value", "requires_grad", "grad")

    def __init__(self, value, requires_grad: bool = False):
        self.value = np.asarray(value, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


@dataclass
class _Node:
    out: Tensor
    inputs: tuple[Tensor, ...]
    backward: Backward


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tape:
    def __init__(self, record: bool = True):
        self.record = record
        self.nodes: list[_Node] = []

    def __len__(self) -> int:
        return len(self.nodes)

    def _result(self, value: np.ndarray, inputs: tuple[Tensor, ...], backward: Backward) -> Tensor:
        out = Tensor(value)
        if self.record and any(t.requires_grad for t in inputs):
            out.requires_grad = True
            self.nodes.append(_Node(out, inputs, backward))
        return out

    @staticmethod
    def constant(value) -> Tensor:
        return Tensor(value)

    @staticmethod
    def parameter(value) -> Tensor:
        return Tensor(value, requires_grad=True)

    # elementwise arithmetic

    def add(self, a: Tensor, b: Tensor) -> Tensor:
        sa, sb = a.shape, b.shape
        return self._result(
            a.value + b.value, (a, b), lambda g: (unbroadcast(g, sa), unbroadcast(g, sb))
        )

    def sub(self, a: Tensor, b: Tensor) -> Tensor:
        sa, sb = a.shape, b.shape
        return self._result(
            a.value - b.value, (a, b), lambda g: (unbroadcast(g, sa), unbroadcast(-g, sb))
        )

    def mul(self, a: Tensor, b: Tensor) -> Tensor:
        va, vb = a.value, b.value
        return self._result(
            va * vb,
            (a, b),
            lambda g: (unbroadcast(g * vb, va.shape), unbroadcast(g * va, vb.shape)),
        )

    def div(self, a: Tensor, b: Tensor) -> Tensor:
        va, vb = a.value, b.value
        return self._result(
            va / vb,
            (a, b),
            lambda g: (
                unbroadcast(g / vb, va.shape),
                unbroadcast(-g * va / (vb * vb), vb.shape),
            ),
        )

    def activation(self, fn: str, a: Tensor) -> Tensor:
        x = a.value
        y = ACTIVATION_FNS[fn](x)
        return self._result(y, (a,), lambda g: (g * DERIVATIVES[fn](x, y),))

    # shape plumbing

    def take(self, a: Tensor, key: tuple) -> Tensor:
        """Basic (slice/int) indexing."""
        shape = a.shape

        def backward(g: np.ndarray):
            full = np.zeros(shape)
            full[key] = g
            return (full,)

        return self._result(a.value[key], (a,), backward)

    def broadcast_to(self, a: Tensor, shape: tuple[int, ...]) -> Tensor:
        if a.shape == shape:
            return a
        source = a.shape
        return self._result(
            np.broadcast_to(a.value, shape).copy(), (a,), lambda g: (unbroadcast(g, source),)
        )

    def stack(self, items: Sequence[Tensor], axis: int = 1) -> Tensor:
        value = np.stack([t.value for t in items], axis=axis)
        count = len(items)

        def backward(g: np.ndarray):
            return tuple(np.take(g, i, axis=axis) for i in range(count))

        return self._result(value, tuple(items), backward)

    # linear algebra

    def stacked_linear(self, x: Tensor, m: Tensor) -> Tensor:
        """``x`` (B, n) through a stack ``m`` (k, l, n) of matrices: (B, k, l)."""
        vx, vm = x.value, m.value
        return self._result(
            np.einsum("bn,kln->bkl", vx, vm),
            (x, m),
            lambda g: (np.einsum("bkl,kln->bn", g, vm), np.einsum("bkl,bn->kln", g, vx)),
        )

    def linear(self, x: Tensor, m: Tensor, c: Tensor) -> Tensor:
        """Dense layer ``x @ m.T + c`` for ``x`` (..., n), ``m`` (k, n), ``c`` (k,)."""
        vx, vm = x.value, m.value

        def backward(g: np.ndarray):
            flat_g = g.reshape(-1, g.shape[-1])
            flat_x = vx.reshape(-1, vx.shape[-1])
            return g @ vm, flat_g.T @ flat_x, flat_g.sum(axis=0)

        return self._result(vx @ vm.T + c.value, (x, m, c), backward)

    # losses (scalar results)

    def mean_squared_error(self, pred: Tensor, target: np.ndarray) -> Tensor:
        diff = pred.value - target
        return self._result(
            np.asarray(np.mean(diff * diff)), (pred,), lambda g: (g * 2.0 * diff / diff.size,)
        )

    def softmax_cross_entropy(self, logits: Tensor, onehot: np.ndarray) -> Tensor:
        """Batch mean of categorical cross entropy over softmax(logits)."""
        probs = softmax(logits.value)
        shifted = logits.value - logits.value.max(axis=-1, keepdims=True)
        log_probs = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
        batch = logits.shape[0]
        loss = -np.sum(onehot * log_probs) / batch
        return self._result(
            np.asarray(loss), (logits,), lambda g: (g * (probs - onehot) / batch,)
        )

    def backward(self, loss: Tensor) -> None:
        """Accumulate d(loss)/d(t) into ``t.grad`` for every tensor on the tape."""
        loss.grad = np.ones_like(loss.value)
        for node in reversed(self.nodes):
            g = node.out.grad
            if g is None:
                continue
            for tensor, grad in zip(node.inputs, node.backward(g)):
                if grad is None or not tensor.requires_grad:
                    continue
                tensor.grad = grad if tensor.grad is None else tensor.grad + grad


def softmax(logits: np.ndarray) -> np.ndarray:
    """Softmax over the last axis with max subtraction."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def backward(tape: Tape, loss: Tensor, params: dict[str, Tensor]) -> dict[str, np.ndarray]:
    """Run the reverse sweep and collect gradients by parameter name.

    Parameters the loss does not depend on get zero gradients.
    """
    tape.backward(loss)
    return {
        name: t.grad if t.grad is not None else np.zeros_like(t.value)
        for name, t in params.items()
    }
