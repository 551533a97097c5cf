"""Type-preserving random edits of neuron programs."""

from __future__ import annotations

import copy
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from arnlab.dsl.ast import (
    BIN_OPS,
    EVOLVED_ACTIVATIONS,
    LIST_PARAMS,
    N_MAPPINGS,
    SCALAR_PARAMS,
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
    Path,
    RealConst,
    Tuple,
    Var,
    node_at,
    replace_at,
    walk,
)
from arnlab.dsl.typecheck import SCALAR, typecheck
from arnlab.errors import DslError

MAX_ATTEMPTS = 20
MAX_GROW_DEPTH = 3
STATE_SLOTS = 4


@dataclass(frozen=True)
class Mutation:
    program: NeuronProgram
    transformation: str


def grow(rng: np.random.Generator, depth: int = MAX_GROW_DEPTH) -> Expr:
    """Random scalar expression of at most ``depth`` levels (sigmoid excluded)."""
    if depth <= 1 or rng.random() < 0.3:
        kind = rng.integers(3)
        if kind == 0:
            return RealConst(round(float(rng.normal(0.0, 1.0)), 4))
        if kind == 1:
            return Var(SCALAR_PARAMS[rng.integers(len(SCALAR_PARAMS))])
        return LinCombApply(int(rng.integers(N_MAPPINGS)), ListVar(LIST_PARAMS[rng.integers(len(LIST_PARAMS))]))
    kind = rng.integers(3)
    if kind == 0:
        op = BIN_OPS[rng.integers(len(BIN_OPS))]
        return BinOp(op, grow(rng, depth - 1), grow(rng, depth - 1))
    if kind == 1:
        return Activation(EVOLVED_ACTIVATIONS[rng.integers(len(EVOLVED_ACTIVATIONS))], grow(rng, depth - 1))
    tail = Bias() if rng.random() < 0.25 else ListVar(LIST_PARAMS[rng.integers(len(LIST_PARAMS))])
    return LinCombApply(int(rng.integers(N_MAPPINGS)), Cons(grow(rng, depth - 1), tail))


def _pick(rng: np.random.Generator, items: list):
    return items[int(rng.integers(len(items)))] if items else None


def grow_subexpression(program: NeuronProgram, rng: np.random.Generator) -> Optional[Expr]:
    typed = typecheck(program)
    scalar_paths = [path for path, node in walk(program.body) if typed.types.get(id(node)) == SCALAR]
    path = _pick(rng, scalar_paths)
    if path is None:
        return None
    return replace_at(program.body, path, grow(rng))


def perturb_constant(program: NeuronProgram, rng: np.random.Generator) -> Optional[Expr]:
    path = _pick(rng, [p for p, node in walk(program.body) if isinstance(node, RealConst)])
    if path is None:
        return None
    old = node_at(program.body, path).value
    new = old + float(rng.normal(0.0, 0.1 * max(1.0, abs(old))))
    return replace_at(program.body, path, RealConst(new))


def swap_activation(program: NeuronProgram, rng: np.random.Generator) -> Optional[Expr]:
    path = _pick(rng, [p for p, node in walk(program.body) if isinstance(node, Activation)])
    if path is None:
        return None
    node = node_at(program.body, path)
    choices = [fn for fn in EVOLVED_ACTIVATIONS if fn != node.fn]
    return replace_at(program.body, path, replace(node, fn=_pick(rng, choices)))


def result_tuple_path(body: Expr) -> Optional[Path]:
    """Path of the 5-tuple the program returns, following case, let and calls."""
    funs: dict[str, Path] = {}
    path: Path = ()
    node = body
    for _ in range(10_000):
        match node:
            case Tuple(elements=elements) if len(elements) == 5:
                return path
            case Case():
                path = path + (("body", None),)
            case LetFun(fn_name=name):
                funs[name] = path + (("fn_body", None),)
                path = path + (("in_body", None),)
            case Apply(fn_name=name) if name in funs:
                path = funs[name]
            case _:
                return None
        node = node_at(body, path)
    return None


def rewire_state(program: NeuronProgram, rng: np.random.Generator) -> Optional[Expr]:
    """Route a state slot to the previous output, a state, zero or another slot."""
    path = result_tuple_path(program.body)
    if path is None:
        return None
    result = node_at(program.body, path)
    slot = int(rng.integers(STATE_SLOTS))
    options: list[Expr] = [Var(name) for name in SCALAR_PARAMS] + [RealConst(0.0)]
    options += [copy.deepcopy(e) for i, e in enumerate(result.elements) if i != slot]
    elements = list(result.elements)
    elements[slot] = _pick(rng, options)
    return replace_at(program.body, path, Tuple(tuple(elements)))


MUTATIONS: dict[str, Callable[[NeuronProgram, np.random.Generator], Optional[Expr]]] = {
    "grow": grow_subexpression,
    "perturb-constant": perturb_constant,
    "swap-activation": swap_activation,
    "rewire-state": rewire_state,
}


def mutate(parent: NeuronProgram, rng: np.random.Generator) -> Mutation:
    """One random edit that still type-checks.

    Up to 20 attempts are made; when all fail the parent is returned
    unchanged with transformation ``none``.
    """
    names = list(MUTATIONS)
    for _ in range(MAX_ATTEMPTS):
        name = names[int(rng.integers(len(names)))]
        body = MUTATIONS[name](parent, rng)
        if body is None or body == parent.body:
            continue
        child = replace(parent, body=body)
        try:
            typecheck(child)
        except DslError:
            continue
        return Mutation(child, name)
    return Mutation(parent, "none")
