"""Abstract syntax of neuron programs.

All nodes are frozen dataclasses, so structural equality is plain ``==``
and trees can be shared between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Iterator, Union

SCALAR_PARAMS = ("SelfPeep0", "SelfPeep1", "SelfPeep2", "SelfPeep3", "SelfOutput")
LIST_PARAMS = ("OtherPeepsLC", "OtherOutputsLC", "InputsLC")

# Order as printed by the synthesis system; InputsLC comes last.
PARAMS = SCALAR_PARAMS + LIST_PARAMS

BIN_OPS = ("+", "-", "*", "/")
ACTIVATIONS = ("tanh", "relu", "srelu", "sigmoid")
EVOLVED_ACTIVATIONS = ("tanh", "relu", "srelu")
N_MAPPINGS = 5


@dataclass(frozen=True)
class RealConst:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Activation:
    fn: str
    arg: Expr


@dataclass(frozen=True)
class LinCombApply:
    mapping: int
    arg: Expr


@dataclass(frozen=True)
class Bias:
    pass


@dataclass(frozen=True)
class Cons:
    head: Expr
    tail: Expr


@dataclass(frozen=True)
class ListVar:
    """One of the three linComb parameters."""

    name: str


@dataclass(frozen=True)
class Case:
    """``case scrutinee of pattern => body``.

    ``pattern`` holds one name for a variable pattern; ``tuple_pattern``
    tells a 1-name variable pattern from a tuple pattern.
    """

    scrutinee: Expr
    pattern: tuple[str, ...]
    body: Expr
    tuple_pattern: bool = False


@dataclass(frozen=True)
class LetFun:
    fn_name: str
    param: str
    fn_body: Expr
    in_body: Expr


@dataclass(frozen=True)
class Apply:
    fn_name: str
    arg: Expr


@dataclass(frozen=True)
class Tuple:
    elements: tuple[Expr, ...]


Expr = Union[
    RealConst, Var, BinOp, Activation, LinCombApply, Bias, Cons, ListVar, Case, LetFun, Apply, Tuple
]

EXPR_TYPES = (RealConst, Var, BinOp, Activation, LinCombApply, Bias, Cons, ListVar, Case, LetFun, Apply, Tuple)


@dataclass(frozen=True)
class NeuronProgram:
    """A neuron: the eight-parameter transition function ``f``."""

    body: Expr
    params: tuple[str, ...] = PARAMS
    name: str = "f"


# A path addresses a subexpression: a sequence of (field name, tuple index or None).
Path = tuple[tuple[str, int | None], ...]


def children(node: Expr) -> Iterator[tuple[tuple[str, int | None], Expr]]:
    """Yield ``(step, child)`` for every direct subexpression, left to right."""
    for f in fields(node):
        value = getattr(node, f.name)
        if isinstance(value, EXPR_TYPES):
            yield (f.name, None), value
        elif isinstance(value, tuple) and value and isinstance(value[0], EXPR_TYPES):
            for i, item in enumerate(value):
                yield (f.name, i), item


def walk(node: Expr, path: Path = ()) -> Iterator[tuple[Path, Expr]]:
    """Pre-order traversal yielding ``(path, node)``."""
    yield path, node
    for step, child in children(node):
        yield from walk(child, path + (step,))


def node_at(node: Expr, path: Path) -> Expr:
    for name, index in path:
        value = getattr(node, name)
        node = value if index is None else value[index]
    return node


def replace_at(node: Expr, path: Path, new: Expr) -> Expr:
    """Return a copy of ``node`` with the subexpression at ``path`` replaced."""
    if not path:
        return new
    (name, index), rest = path[0], path[1:]
    value = getattr(node, name)
    if index is None:
        return replace(node, **{name: replace_at(value, rest, new)})
    items = list(value)
    items[index] = replace_at(items[index], rest, new)
    return replace(node, **{name: tuple(items)})


def node_count(node: Expr | NeuronProgram) -> int:
    if isinstance(node, NeuronProgram):
        node = node.body
    return sum(1 for _ in walk(node))
