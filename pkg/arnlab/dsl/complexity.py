"""Syntactic complexity: program size in bits.

Each AST node is coded by its symbol; the cost of a program is the sum of
``-log2 p(symbol)`` over its nodes.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, Field, field_validator

from arnlab.dsl.ast import (
    ACTIVATIONS,
    BIN_OPS,
    N_MAPPINGS,
    PARAMS,
    Activation,
    Apply,
    BinOp,
    Bias,
    Case,
    Cons,
    Expr,
    LetFun,
    LinCombApply,
    ListVar,
    NeuronProgram,
    RealConst,
    Tuple,
    Var,
    walk,
)
from arnlab.errors import SymbolCostError

STRUCTURAL_SYMBOLS = ("bias", "cons", "case", "let", "apply", "tuple")
BOUND_VAR = "var"
CONSTANT = "const"

ALPHABET: tuple[str, ...] = (
    BIN_OPS
    + ACTIVATIONS
    + tuple(f"lc{i}" for i in range(N_MAPPINGS))
    + PARAMS
    + (BOUND_VAR, CONSTANT)
    + STRUCTURAL_SYMBOLS
)


def symbol(node: Expr) -> str:
    """The coding symbol of one node."""
    match node:
        case RealConst():
            return CONSTANT
        case Var(name=name):
            return name if name in PARAMS else BOUND_VAR
        case ListVar(name=name):
            return name
        case BinOp(op=op):
            return op
        case Activation(fn=fn):
            return fn
        case LinCombApply(mapping=mapping):
            return f"lc{mapping}"
        case Bias():
            return "bias"
        case Cons():
            return "cons"
        case Case():
            return "case"
        case LetFun():
            return "let"
        case Apply():
            return "apply"
        case Tuple():
            return "tuple"
    raise TypeError(f"not an expression: {node!r}")


class SymbolCost(BaseModel):
    """Occurrence probability per symbol, a per-node coding model."""

    probabilities: dict[str, float] = Field(
        ..., description="Symbol -> occurrence probability in (0, 1]"
    )

    @field_validator("probabilities")
    @classmethod
    def validate_probabilities(cls, v: dict[str, float]) -> dict[str, float]:
        bad = {k: p for k, p in v.items() if not 0.0 < p <= 1.0}
        if bad:
            raise ValueError(f"probabilities must lie in (0, 1]: {bad}")
        return v

    @classmethod
    def uniform(cls, alphabet: tuple[str, ...] = ALPHABET) -> "SymbolCost":
        p = 1.0 / len(alphabet)
        return cls(probabilities={s: p for s in alphabet})

    def bits(self, sym: str) -> float:
        if sym not in self.probabilities:
            raise SymbolCostError(f"symbol {sym!r} missing from cost table")
        return -math.log2(self.probabilities[sym])


DEFAULT_COSTS = SymbolCost.uniform()


def complexity(program: NeuronProgram | Expr, costs: SymbolCost = DEFAULT_COSTS) -> float:
    """Sum of ``-log2 p`` over all nodes of the program body."""
    body = program.body if isinstance(program, NeuronProgram) else program
    return sum(costs.bits(symbol(node)) for _, node in walk(body))
