"""Lowering of typed neuron programs to register bytecode.

Every register holds one l-vector, one lane per neuron of the layer.
``lcI(list)`` lowers to a single ``lc`` instruction computing

    b_I + sum_k a_k * head_k + (U_I x | W_I y | P_I s0)

where the heads are the scalar ``cons`` heads of the list, each with its own
auxiliary vector, and the last term depends on how the list terminates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from arnlab.compiler.layout import AuxSite, WeightLayout
from arnlab.dsl.ast import (
    LIST_PARAMS,
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
from arnlab.dsl.typecheck import TypedProgram
from arnlab.errors import CompileError
from arnlab.utils.logging import get_logger

logger = get_logger(__name__)

BINARY_OPCODES = {"+": "add", "-": "sub", "*": "mul", "/": "div"}
STATE_PARAMS = {
    "SelfPeep0": "s0",
    "SelfPeep1": "s1",
    "SelfPeep2": "s2",
    "SelfPeep3": "s3",
    "SelfOutput": "y",
}
LIST_SOURCES = {"InputsLC": "x", "OtherOutputsLC": "y", "OtherPeepsLC": "s0"}
OUTPUT_NAMES = ("s0_next", "s1_next", "s2_next", "s3_next", "y_next")


@dataclass(frozen=True)
class Instr:
    """One bytecode instruction writing register ``dest``.

    op: param | const | add | sub | mul | div | tanh | relu | srelu | sigmoid | lc
    """

    op: str
    dest: int
    args: tuple[int, ...] = ()
    value: float | None = None
    name: str | None = None
    mapping: int | None = None
    aux: tuple[int, ...] = ()
    source: str | None = None
    sites: tuple[int, ...] = ()

    def key(self) -> tuple:
        value = repr(self.value) if self.value is not None else None
        return (self.op, self.args, value, self.name, self.mapping, self.source, self.sites)


@dataclass(frozen=True)
class NeuronKernel:
    """Compiled neuron: bytecode plus the weight layout it reads."""

    instructions: tuple[Instr, ...]
    outputs: tuple[int, ...]
    layout: WeightLayout
    state_usage: frozenset[str]
    program: NeuronProgram

    @property
    def register_count(self) -> int:
        return len(self.instructions)

    def uses_source(self, source: str) -> bool:
        return any(i.op == "lc" and i.source == source for i in self.instructions)


@dataclass(frozen=True)
class ListValue:
    """Compile-time linComb: cons heads with their site ids, plus the terminus."""

    heads: tuple[tuple[int, int], ...]
    source: str


@dataclass(frozen=True)
class FunctionValue:
    node: LetFun
    env: dict
    funs: dict


Value = Union[int, ListValue, tuple]


class _Lowering:
    def __init__(self, program: NeuronProgram):
        self.instructions: list[Instr] = []
        self.numbering: dict[tuple, int] = {}
        cons_nodes = [node for _, node in walk(program.body) if isinstance(node, Cons)]
        self.sites = {id(node): i for i, node in enumerate(cons_nodes)}

    def emit(self, op: str, **fields) -> int:
        instr = Instr(op=op, dest=len(self.instructions), **fields)
        key = instr.key()
        if key in self.numbering:
            return self.numbering[key]
        self.instructions.append(instr)
        self.numbering[key] = instr.dest
        return instr.dest

    def scalar(self, node: Expr, env: dict, funs: dict) -> int:
        value = self.lower(node, env, funs)
        if not isinstance(value, int):
            raise CompileError(f"expected a scalar, got {type(value).__name__}")
        return value

    def lower(self, node: Expr, env: dict[str, Value], funs: dict[str, FunctionValue]) -> Value:
        match node:
            case RealConst(value=value):
                return self.emit("const", value=float(value))
            case Var(name=name):
                if name in env:
                    return env[name]
                if name in STATE_PARAMS:
                    return self.emit("param", name=STATE_PARAMS[name])
                raise CompileError(f"free variable {name!r}")
            case ListVar(name=name):
                if name not in LIST_PARAMS:
                    raise CompileError(f"unknown list {name!r}")
                return ListValue((), LIST_SOURCES[name])
            case Bias():
                return ListValue((), "bias")
            case Cons(head=head, tail=tail):
                reg = self.scalar(head, env, funs)
                rest = self.lower(tail, env, funs)
                if not isinstance(rest, ListValue):
                    raise CompileError("cons tail is not a list")
                return ListValue(((self.sites[id(node)], reg),) + rest.heads, rest.source)
            case LinCombApply(mapping=mapping, arg=arg):
                lv = self.lower(arg, env, funs)
                if not isinstance(lv, ListValue):
                    raise CompileError(f"lc{mapping} applied to a non-list")
                return self.emit(
                    "lc",
                    args=tuple(reg for _, reg in lv.heads),
                    sites=tuple(site for site, _ in lv.heads),
                    mapping=mapping,
                    source=lv.source,
                )
            case BinOp(op=op, lhs=lhs, rhs=rhs):
                a = self.scalar(lhs, env, funs)
                b = self.scalar(rhs, env, funs)
                return self.emit(BINARY_OPCODES[op], args=(a, b))
            case Activation(fn=fn, arg=arg):
                return self.emit(fn, args=(self.scalar(arg, env, funs),))
            case Tuple(elements=elements):
                return tuple(self.scalar(e, env, funs) for e in elements)
            case Case(scrutinee=scrutinee, pattern=pattern, body=body, tuple_pattern=is_tuple):
                value = self.lower(scrutinee, env, funs)
                if is_tuple:
                    if not isinstance(value, tuple) or len(value) != len(pattern):
                        raise CompileError("tuple pattern does not match scrutinee")
                    bound = dict(zip(pattern, value))
                else:
                    bound = {pattern[0]: value}
                return self.lower(body, {**env, **bound}, funs)
            case LetFun(fn_name=fn_name, in_body=in_body):
                fn = FunctionValue(node, env, funs)
                return self.lower(in_body, env, {**funs, fn_name: fn})
            case Apply(fn_name=fn_name, arg=arg):
                if fn_name not in funs:
                    raise CompileError(f"unknown function {fn_name!r}")
                fn = funs[fn_name]
                value = self.lower(arg, env, funs)
                return self.lower(fn.node.fn_body, {**fn.env, fn.node.param: value}, fn.funs)
        raise CompileError(f"unsupported construct {type(node).__name__}")


def _prune(instructions: list[Instr], outputs: tuple[int, ...]) -> tuple[list[Instr], tuple[int, ...]]:
    """Drop instructions not reachable from the outputs and renumber registers."""
    live = set(outputs)
    for instr in reversed(instructions):
        if instr.dest in live:
            live.update(instr.args)
    renumber: dict[int, int] = {}
    kept: list[Instr] = []
    for instr in instructions:
        if instr.dest not in live:
            continue
        renumber[instr.dest] = len(kept)
        kept.append(
            replace(instr, dest=len(kept), args=tuple(renumber[a] for a in instr.args))
        )
    return kept, tuple(renumber[o] for o in outputs)


def compile_program(typed: TypedProgram, nodes: int, n_in: int) -> NeuronKernel:
    """Lower a type-checked program for a layer of ``nodes`` neurons and ``n_in`` inputs.

    Raises:
        CompileError: if ``nodes < 2`` or ``n_in < 1``.
    """
    if nodes < 2:
        raise CompileError(f"a layer needs at least 2 nodes for hollow matrices, got {nodes}")
    if n_in < 1:
        raise CompileError(f"at least one input is required, got {n_in}")
    program = typed.program
    lowering = _Lowering(program)
    result = lowering.lower(program.body, {}, {})
    if not isinstance(result, tuple) or len(result) != 5:
        raise CompileError("program does not return a 5-tuple")
    instructions, outputs = _prune(lowering.instructions, result)

    # auxiliary vectors are allocated for live (mapping, cons site) pairs only
    aux_sites: list[AuxSite] = []
    index: dict[AuxSite, int] = {}
    final: list[Instr] = []
    for instr in instructions:
        if instr.op == "lc":
            aux = []
            for site in instr.sites:
                key = AuxSite(instr.mapping, site)
                if key not in index:
                    index[key] = len(aux_sites)
                    aux_sites.append(key)
                aux.append(index[key])
            instr = replace(instr, aux=tuple(aux))
        final.append(instr)

    mappings = tuple(sorted({i.mapping for i in final if i.op == "lc"}))
    state_usage = frozenset(i.name for i in final if i.op == "param")
    layout = WeightLayout(nodes, n_in, mappings, tuple(aux_sites))
    logger.debug(
        "compiled %d instructions, mappings %s, %d aux vectors",
        len(final),
        mappings,
        len(aux_sites),
    )
    return NeuronKernel(tuple(final), outputs, layout, state_usage, program)
